"""Baker-Campbell-Hausdorff arithmetic over truncated free Lie rings.

The two-letter series log(exp X exp T) is computed once, straight from its
definition in the truncated free associative algebra on two letters, and
projected onto the two-letter Hall basis with the Dynkin idempotent.  All
group-side helpers reduce to substituting rational Lie vectors for the two
letters, with monomials pruned by the weights of the arguments.

Rational vectors are sparse dicts {Hall basis index: Fraction}.  The helpers
here power the construction of integer collection tables: logs of the
polycyclic generators (each defined as an iterated group commutator),
conjugation series, and the peeling of an exponential back into normal-form
exponents.  Peeling is where consistency is enforced: every peeled exponent
must come out an integer, and any defect raises immediately."""

from __future__ import annotations

import threading
from fractions import Fraction
from math import factorial

from . import hall_lie

MAX_CLASS = 6


def fadd(out: dict, vec: dict, scale=1) -> dict:
    """In-place out += scale * vec, dropping zeros; returns out."""
    for k, c in vec.items():
        nv = out.get(k, 0) + scale * c
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def fneg(vec: dict) -> dict:
    return {k: -c for k, c in vec.items()}


def frac_bracket(basis: hall_lie.HallBasis, a: dict, b: dict) -> dict:
    out: dict = {}
    for i, ci in a.items():
        for j, cj in b.items():
            c = ci * cj
            for t, d in basis.product(i, j).items():
                nv = out.get(t, 0) + c * d
                if nv:
                    out[t] = nv
                else:
                    del out[t]
    return out


def _min_weight(basis: hall_lie.HallBasis, vec: dict) -> int:
    return min(basis.words[i].weight for i in vec)


# -- the universal two-letter series -------------------------------------------

def _amul(a: dict, b: dict, cap: int) -> dict:
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            if len(wa) + len(wb) > cap:
                continue
            w = wa + wb
            nv = out.get(w, 0) + ca * cb
            if nv:
                out[w] = nv
            else:
                del out[w]
    return out


def _aexp(x: dict, cap: int) -> dict:
    """exp of an associative element with no constant term."""
    out = {(): Fraction(1)}
    term = {(): Fraction(1)}
    for k in range(1, cap + 1):
        term = _amul(term, x, cap)
        term = {w: c / k for w, c in term.items()}
        if not term:
            break
        fadd(out, term)
    return out


def _alog(a: dict, cap: int) -> dict:
    """log of an associative element with constant term 1."""
    u = {w: c for w, c in a.items() if w}
    out: dict = {}
    upow = dict(u)
    for k in range(1, cap + 1):
        if not upow:
            break
        fadd(out, upow, Fraction((-1) ** (k + 1), k))
        upow = _amul(upow, u, cap)
    return out


_series: dict[int, Fraction] | None = None
_series_lock = threading.Lock()


def universal_bch() -> dict[int, Fraction]:
    """Coefficients of log(exp X exp T) on the two-letter Hall basis, through
    bracket degree MAX_CLASS.  Letter X is generator 1, letter T generator 2."""
    global _series
    if _series is not None:
        return _series
    with _series_lock:
        if _series is not None:
            return _series
        cap = MAX_CLASS
        basis = hall_lie.get_basis(2, cap)
        prod = _amul(_aexp({(0,): Fraction(1)}, cap),
                     _aexp({(1,): Fraction(1)}, cap), cap)
        assoc = _alog(prod, cap)
        # Dynkin projection: a degree-n Lie element equals 1/n times the sum
        # of the left-normed bracketings of its words
        series: dict[int, Fraction] = {}
        for word, c in assoc.items():
            vec = {word[0]: Fraction(1)}
            for letter in word[1:]:
                vec = frac_bracket(basis, vec, {letter: Fraction(1)})
            fadd(series, vec, c / len(word))
        _series = series
    return _series


def bch_combine(basis: hall_lie.HallBasis, a: dict, b: dict) -> dict:
    """log(exp(a) exp(b)) truncated at the basis cap."""
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    cap = basis.cap
    wa = _min_weight(basis, a)
    wb = _min_weight(basis, b)
    uni = hall_lie.get_basis(2, MAX_CLASS)
    memo: dict[int, dict] = {}

    def ev(idx: int) -> dict:
        hit = memo.get(idx)
        if hit is None:
            w = uni.words[idx]
            if w.generator == 1:
                hit = a
            elif w.generator == 2:
                hit = b
            else:
                hit = frac_bracket(basis, ev(w.left.index), ev(w.right.index))
            memo[idx] = hit
        return hit

    out: dict = {}
    for idx, c in universal_bch().items():
        leaves = uni.words[idx].leaves()
        nx = leaves.count(1)
        if nx * wa + (len(leaves) - nx) * wb > cap:
            continue
        vec = ev(idx)
        if vec:
            fadd(out, vec, c)
    return out


# -- group-side helpers ----------------------------------------------------------

_logs_cache: dict[tuple[int, int], list[dict]] = {}
_logs_lock = threading.Lock()


def generator_logs(basis: hall_lie.HallBasis) -> list[dict]:
    """log of every polycyclic generator.  Weight-1 generators are
    exponentials of basis vectors; every deeper generator is defined as the
    group commutator of its two parents, so its log is the BCH commutator
    of theirs.  The weight-w layer of logs[i] is exactly the basis vector of
    index i, which is what makes normal-form peeling triangular."""
    key = (basis.rank, basis.cap)
    hit = _logs_cache.get(key)
    if hit is not None:
        return hit
    with _logs_lock:
        hit = _logs_cache.get(key)
        if hit is not None:
            return hit
        logs: list[dict] = []
        for i, w in enumerate(basis.words):
            if w.generator is not None:
                logs.append({i: Fraction(1)})
            else:
                lu, lv = logs[w.left.index], logs[w.right.index]
                x = bch_combine(basis, fneg(lu), fneg(lv))
                x = bch_combine(basis, x, lu)
                x = bch_combine(basis, x, lv)
                logs.append(x)
        _logs_cache[key] = logs
    return logs


def conjugate_log(basis: hall_lie.HallBasis, i: int, j: int, eps: int) -> dict:
    """log of g_i^-eps g_j g_i^eps: the exponential of -eps ad(log g_i)
    applied to log g_j.  A pure Lie series, no BCH needed."""
    logs = generator_logs(basis)
    li, lj = logs[i], logs[j]
    out = dict(lj)
    wi = _min_weight(basis, li)
    wj = _min_weight(basis, lj)
    term = lj
    k = 0
    while (k + 1) * wi + wj <= basis.cap:
        k += 1
        term = frac_bracket(basis, li, term)
        if not term:
            break
        fadd(out, term, Fraction((-eps) ** k, factorial(k)))
    return out


def log_pc_word(basis: hall_lie.HallBasis, exps: dict[int, int]) -> dict:
    """log of the normal-form word prod g_i^{e_i}, indices ascending."""
    acc: dict = {}
    logs = generator_logs(basis)
    for i in sorted(exps):
        if exps[i]:
            acc = bch_combine(
                basis, acc, {k: c * exps[i] for k, c in logs[i].items()})
    return acc


def peel_to_exponents(basis: hall_lie.HallBasis, vec: dict) -> dict[int, int]:
    """Normal-form exponents of exp(vec), peeled off one weight layer at a
    time.  Each peeled coefficient must be an integer; a non-integer means
    the element is not in the integer span of the generators, which for the
    table constructions here is an internal inconsistency, so it raises."""
    logs = generator_logs(basis)
    exps: dict[int, int] = {}
    cur = {i: c for i, c in vec.items() if c}
    while cur:
        d = _min_weight(basis, cur)
        m: dict = {}
        for i in sorted(k for k in cur if basis.words[k].weight == d):
            c = cur[i]
            if c.denominator != 1:
                raise ArithmeticError(
                    "non-integer exponent %s on basis index %d" % (c, i))
            exps[i] = int(c)
            m = bch_combine(basis, m, {k: v * c for k, v in logs[i].items()})
        cur = bch_combine(basis, fneg(m), cur)
        if cur and _min_weight(basis, cur) <= d:
            raise ArithmeticError("peeling stalled at weight %d" % d)
    return exps
