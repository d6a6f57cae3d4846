"""Exact arithmetic in free nilpotent groups via weighted polycyclic
presentations, with quotients by normal closures, lower central series data,
and nilpotency class bounds for groups and subgroups.

Generators correspond to Hall basis elements of weight up to the class cap;
weight-1 generators are free generators and every deeper generator is defined
as a commutator [g_j, g_i] of earlier ones (j > i).  Conjugation tables
g_j^(g_i^±1) are built once per presentation; the builder works in rational
Baker-Campbell-Hausdorff coordinates, and the peeling step certifies that
every stored table entry is integral.  All element arithmetic after
construction is integer collection from the left.

Elements are exponent dicts internally and immutable exponent tuples on the
public GroupElement.  Presentations are immutable once built and safe to
share between threads."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import _bch, hall_lie
from ._lattice import smith_divisors, xgcd

MAX_RANK = 4
MAX_CLASS = 6


class PcPresentation:
    """Weighted polycyclic presentation of a free nilpotent group."""

    def __init__(self, rank: int, cap: int, _tables=None):
        if rank < 1 or cap < 1:
            raise ValueError("rank and class must be positive")
        if rank > MAX_RANK or cap > MAX_CLASS:
            raise ValueError(
                "refusing rank %d class %d: supported envelope is rank <= %d, "
                "class <= %d" % (rank, cap, MAX_RANK, MAX_CLASS))
        self.rank = rank
        self.cap = cap
        self.basis = hall_lie.get_basis(rank, cap)
        self.ngens = len(self.basis.words)
        self.weights = [w.weight for w in self.basis.words]
        self._conj_cache: dict[tuple[int, int, int], dict[int, int]] = {}
        self._ad_cache: dict = {}
        self._lock = threading.Lock()
        if _tables is None:
            self._build_tables()
        else:
            self._conj_cache.update(_tables)

    # -- construction ---------------------------------------------------------

    def _build_tables(self) -> None:
        for j in range(self.ngens):
            wj = self.weights[j]
            for i in range(j):
                if self.weights[i] + wj > self.cap:
                    continue
                for eps in (1, -1):
                    self._conj_gen(j, i, eps)

    def definition(self, i: int) -> tuple[int, int] | None:
        """(j, k) with g_{i+1} = [g_{j+1}, g_{k+1}], or None for a free
        generator; indices 0-based."""
        w = self.basis.words[i]
        if w.generator is not None:
            return None
        return (w.left.index, w.right.index)

    # -- elements ---------------------------------------------------------------

    def identity(self) -> "GroupElement":
        return GroupElement(self, ())

    def generator(self, i: int) -> "GroupElement":
        if not 1 <= i <= self.ngens:
            raise ValueError("generator index out of range")
        return GroupElement(self, ((i - 1, 1),))

    def generators(self) -> list["GroupElement"]:
        return [self.generator(i) for i in range(1, self.ngens + 1)]

    def element(self, exps: dict[int, int]) -> "GroupElement":
        """Element from a 0-based {index: exponent} dict (collected as-is:
        the dict is read as the normal-form word in ascending index order)."""
        d = self._reduce({i: e for i, e in exps.items() if e})
        return GroupElement(self, tuple(sorted(d.items())))

    # -- collection ---------------------------------------------------------------

    def _conj_gen(self, s: int, t: int, e: int) -> dict[int, int]:
        """Normal form of g_s conjugated by g_t^e, as an exponent dict."""
        if e == 0 or s == t or self.weights[s] + self.weights[t] > self.cap:
            return {s: 1}
        key = (s, t, e)
        hit = self._conj_cache.get(key)
        if hit is not None:
            return hit
        ads = self._ad_cache.get((s, t))
        if ads is None:
            logs = _bch.generator_logs(self.basis)
            ads = [logs[s]]
            k = 0
            while (k + 1) * self.weights[t] + self.weights[s] <= self.cap:
                k += 1
                nxt = _bch.frac_bracket(self.basis, logs[t], ads[-1])
                ads.append(nxt)
                if not nxt:
                    break
            with self._lock:
                self._ad_cache[(s, t)] = ads
        w: dict = {}
        for k, vec in enumerate(ads):
            if vec:
                _bch.fadd(w, vec, Fraction((-e) ** k, factorial(k)))
        out = _bch.peel_to_exponents(self.basis, w)
        out = {i: c for i, c in out.items() if c}
        with self._lock:
            self._conj_cache[key] = out
        return out

    def _insert(self, w: dict, t: int, e: int) -> None:
        if not e:
            return
        wt = self.weights[t]
        deeper = [s for s in w if s > t]
        if all(self.weights[s] + wt > self.cap for s in deeper):
            ne = w.get(t, 0) + e
            if ne:
                w[t] = ne
            else:
                w.pop(t, None)
            return
        deeper.sort()
        moved = [(s, w.pop(s)) for s in deeper]
        ne = w.get(t, 0) + e
        if ne:
            w[t] = ne
        else:
            w.pop(t, None)
        for s, h in moved:
            tail = self._conj_gen(s, t, e)
            if len(tail) == 1:
                self._insert(w, s, h)
                continue
            x = self._pow(tail, h)
            for tt in sorted(x):
                self._insert(w, tt, x[tt])

    def _mul(self, a: dict, b: dict) -> dict:
        w = dict(a)
        for t in sorted(b):
            self._insert(w, t, b[t])
        return w

    def _inv(self, a: dict) -> dict:
        out: dict = {}
        for i in sorted(a, reverse=True):
            self._insert(out, i, -a[i])
        return out

    def _pow(self, a: dict, n: int) -> dict:
        if not a or n == 0:
            return {}
        if n < 0:
            return self._pow(self._inv(a), -n)
        result: dict = {}
        base = dict(a)
        while True:
            if n & 1:
                result = self._mul(result, base)
            n >>= 1
            if not n:
                return result
            base = self._mul(base, base)

    def _reduce(self, a: dict) -> dict:
        return a

    # -- comparison and serialization -----------------------------------------------

    def _table_items(self):
        return sorted((k, tuple(sorted(v.items())))
                      for k, v in self._conj_cache.items() if abs(k[2]) == 1)

    def __eq__(self, other):
        return (type(other) is PcPresentation
                and (self.rank, self.cap) == (other.rank, other.cap)
                and self._table_items() == other._table_items())

    def __hash__(self):
        return hash((PcPresentation, self.rank, self.cap))

    def __repr__(self):
        return "PcPresentation(rank=%d, class=%d, %d generators)" % (
            self.rank, self.cap, self.ngens)


class GroupElement:
    """Collected normal form: immutable sorted tuple of (index, exponent)."""

    __slots__ = ("group", "exps")

    def __init__(self, group, exps: tuple[tuple[int, int], ...]):
        self.group = group
        self.exps = exps

    def exponent_dict(self) -> dict[int, int]:
        return dict(self.exps)

    @property
    def is_identity(self) -> bool:
        return not self.exps

    def __bool__(self):
        return bool(self.exps)

    def __eq__(self, other):
        return (isinstance(other, GroupElement)
                and self.group is other.group and self.exps == other.exps)

    def __hash__(self):
        return hash((id(self.group), self.exps))

    def __mul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        if not self.exps:
            return "<identity>"
        return "*".join("g%d" % (i + 1) if e == 1 else "g%d^%d" % (i + 1, e)
                        for i, e in self.exps)


def _same_group(u: GroupElement, v: GroupElement):
    if u.group is not v.group:
        raise ValueError("elements from different presentations")
    return u.group


def normal_form(P, word) -> GroupElement:
    """Collect a word given as signed 1-based generator letters: letter k
    means g_k, letter -k means g_k inverse."""
    d: dict = {}
    for letter in word:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > P.ngens:
            raise ValueError("bad letter %r" % (letter,))
        d = P._mul(d, {abs(letter) - 1: 1 if letter > 0 else -1})
    d = P._reduce(d)
    return GroupElement(P, tuple(sorted(d.items())))


def multiply(u: GroupElement, v: GroupElement) -> GroupElement:
    G = _same_group(u, v)
    d = G._reduce(G._mul(dict(u.exps), dict(v.exps)))
    return GroupElement(G, tuple(sorted(d.items())))


def inverse(u: GroupElement) -> GroupElement:
    G = u.group
    d = G._reduce(G._inv(dict(u.exps)))
    return GroupElement(G, tuple(sorted(d.items())))


def power(u: GroupElement, n: int) -> GroupElement:
    G = u.group
    d = G._reduce(G._pow(dict(u.exps), n))
    return GroupElement(G, tuple(sorted(d.items())))


def conjugate(u: GroupElement, v: GroupElement) -> GroupElement:
    """u conjugated by v: v^-1 u v."""
    G = _same_group(u, v)
    uv, vd = dict(u.exps), dict(v.exps)
    d = G._mul(G._mul(G._inv(vd), uv), vd)
    return GroupElement(G, tuple(sorted(G._reduce(d).items())))


def commutator(u: GroupElement, v: GroupElement) -> GroupElement:
    """[u, v] = u^-1 v^-1 u v."""
    G = _same_group(u, v)
    ud, vd = dict(u.exps), dict(v.exps)
    vu = G._mul(vd, ud)
    uv = G._mul(ud, vd)
    d = G._mul(G._inv(vu), uv)
    return GroupElement(G, tuple(sorted(G._reduce(d).items())))


def left_normed_commutator(elems) -> GroupElement:
    """[[...[x1, x2], x3], ..., xn], folding from the left."""
    elems = list(elems)
    if not elems:
        raise ValueError("need at least one element")
    acc = elems[0]
    for x in elems[1:]:
        acc = commutator(acc, x)
    return acc


# -- normal closures and quotients ------------------------------------------------


class NormalClosure:
    """Echelonized generating rows (ascending distinct leads, positive lead
    exponents) for a normal subgroup of a free presentation.  Sifting to the
    identity certifies membership; after stabilize() the row set is closed
    under conjugation by every pc generator, which makes it the full normal
    closure of everything ever added."""

    __slots__ = ("free", "rows", "_plan")

    def __init__(self, free: PcPresentation):
        self.free = free
        self.rows: dict[int, dict[int, int]] = {}
        self._plan = None

    def copy(self) -> "NormalClosure":
        nc = NormalClosure(self.free)
        nc.rows = {k: dict(v) for k, v in self.rows.items()}
        return nc

    def add(self, elem: dict[int, int]) -> bool:
        free = self.free
        changed = False
        pending = [dict(elem)]
        while pending:
            v = pending.pop()
            while v:
                lead = min(v)
                if v[lead] < 0:
                    v = free._inv(v)
                row = self.rows.get(lead)
                if row is None:
                    self.rows[lead] = v
                    changed = True
                    break
                a, b = row[lead], v[lead]
                if b % a == 0:
                    v = free._mul(v, free._pow(row, -(b // a)))
                    continue
                g, x, y = xgcd(a, b)
                new_row = free._mul(free._pow(row, x), free._pow(v, y))
                self.rows[lead] = new_row
                changed = True
                pending.append(row)
                v = free._mul(v, free._pow(new_row, -(b // g)))
        if changed:
            self._plan = None
        return changed

    def sifts_to_identity(self, elem: dict[int, int]) -> bool:
        free = self.free
        v = dict(elem)
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None or v[lead] % row[lead]:
                return False
            v = free._mul(v, free._pow(row, -(v[lead] // row[lead])))
        return True

    def _reduce_plan(self):
        # threshold m: every index >= m is a lead whose exponent is 1.  Row
        # tails sit at strictly larger indices, so descending induction puts
        # every generator from m on inside the subgroup those rows generate,
        # and the index->m suffix of any normal form can be dropped wholesale
        # instead of divided out one lead at a time.
        plan = self._plan
        if plan is None:
            rows = self.rows
            m = self.free.ngens
            while m > 0:
                row = rows.get(m - 1)
                if row is None or row[m - 1] != 1:
                    break
                m -= 1
            plan = (m, sorted(l for l in rows if l < m))
            self._plan = plan
        return plan

    def reduce_coset(self, elem: dict[int, int]) -> dict[int, int]:
        """Canonical coset representative: at every row lead the exponent is
        reduced into [0, lead exponent)."""
        free = self.free
        m, low_leads = self._reduce_plan()
        x = {i: e for i, e in elem.items() if e and i < m}
        for lead in low_leads:
            e = x.get(lead, 0)
            if not e:
                continue
            row = self.rows[lead]
            q = e // row[lead]
            if q:
                x = free._mul(x, free._pow(row, -q))
                if any(i >= m for i in x):
                    x = {i: e for i, e in x.items() if i < m}
        return x

    def stabilize(self) -> None:
        """Close under conjugation by all pc generators, both signs; a full
        pass with no echelon change certifies closure."""
        free = self.free
        while True:
            changed = False
            for lead in sorted(self.rows):
                wrow = free.weights[lead]
                for t in range(free.ngens):
                    if free.weights[t] + wrow > free.cap:
                        break  # generators are weight-sorted
                    for eps in (1, -1):
                        row = self.rows[lead]
                        conj = free._mul(free._mul({t: -eps}, row), {t: eps})
                        if conj != row and self.add(conj):
                            changed = True
            if not changed:
                return


class QuotientPresentation:
    """A free presentation together with the normal closure of a relator
    set; elements are canonical coset representatives, so torsion layers
    reduce exponents automatically."""

    def __init__(self, free: PcPresentation, closure: NormalClosure):
        self.free = free
        self.closure = closure
        self.rank = free.rank
        self.cap = free.cap
        self.ngens = free.ngens
        self.weights = free.weights
        self.basis = free.basis

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def generator(self, i: int) -> GroupElement:
        if not 1 <= i <= self.ngens:
            raise ValueError("generator index out of range")
        return self.element({i - 1: 1})

    def generators(self) -> list[GroupElement]:
        return [self.generator(i) for i in range(1, self.ngens + 1)]

    def element(self, exps: dict[int, int]) -> GroupElement:
        d = self._reduce({i: e for i, e in exps.items() if e})
        return GroupElement(self, tuple(sorted(d.items())))

    def image(self, u: GroupElement) -> GroupElement:
        """Canonical image of a parent-presentation element."""
        if u.group is not self.free:
            raise ValueError("element does not live in the parent presentation")
        return self.element(dict(u.exps))

    def _conj_gen(self, s, t, e):
        return self.free._conj_gen(s, t, e)

    def _mul(self, a, b):
        return self.free._mul(a, b)

    def _inv(self, a):
        return self.free._inv(a)

    def _pow(self, a, n):
        return self.free._pow(a, n)

    def _reduce(self, a):
        return self.closure.reduce_coset(a)

    def __eq__(self, other):
        return (type(other) is QuotientPresentation
                and self.free == other.free
                and {k: v for k, v in self.closure.rows.items()}
                == {k: v for k, v in other.closure.rows.items()})

    def __hash__(self):
        return hash((QuotientPresentation, self.rank, self.cap,
                     tuple(sorted(self.closure.rows))))

    def __repr__(self):
        return "QuotientPresentation(rank=%d, class=%d, %d relator rows)" % (
            self.rank, self.cap, len(self.closure.rows))


def quotient(P, relators) -> QuotientPresentation:
    """Quotient by the normal closure of the relators.  P may itself be a
    quotient, in which case the relator sets accumulate."""
    if isinstance(P, QuotientPresentation):
        free = P.free
        nc = P.closure.copy()
    else:
        free = P
        nc = NormalClosure(free)
    for r in relators:
        d = dict(r.exps) if isinstance(r, GroupElement) else dict(r)
        if d:
            nc.add(d)
    nc.stabilize()
    return QuotientPresentation(free, nc)


# -- lower central series ------------------------------------------------------------


@dataclass(frozen=True)
class LayerDescription:
    """One lower-central quotient layer: a finitely generated abelian group
    Z^free_rank x prod Z/t for t in torsion."""

    weight: int
    free_rank: int
    torsion: tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        if self.trivial:
            return "1"
        parts = []
        if self.free_rank:
            parts.append("Z^%d" % self.free_rank if self.free_rank > 1 else "Z")
        parts.extend("Z/%d" % t for t in self.torsion)
        return " x ".join(parts)


class ClassBound:
    """Nilpotency class measured inside a class-cap truncation.  When the
    deepest layer is nontrivial the true class may exceed the cap, so the
    textual form is ">= cap" rather than a bare number."""

    __slots__ = ("value", "at_cap", "cap")

    def __init__(self, value: int, at_cap: bool, cap: int):
        self.value = value
        self.at_cap = at_cap
        self.cap = cap

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, ClassBound):
            return (self.value, self.at_cap) == (other.value, other.at_cap)
        return self.value == other and not self.at_cap

    def __le__(self, other):
        return self.value <= other

    def __lt__(self, other):
        return self.value < other

    def __hash__(self):
        return hash((self.value, self.at_cap))

    def __str__(self):
        return ">= %d" % self.value if self.at_cap else str(self.value)

    def __repr__(self):
        return "ClassBound(%s, cap=%d)" % (self, self.cap)


def _layer_indices(G) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, w in enumerate(G.weights):
        out.setdefault(w, []).append(i)
    return out


def lower_central_series(G) -> list[LayerDescription]:
    """Per-weight descriptions of gamma_k / gamma_(k+1) for k = 1..cap."""
    layers = _layer_indices(G)
    rows = G.closure.rows if isinstance(G, QuotientPresentation) else {}
    blocks: dict[int, list[list[int]]] = {}
    for lead, row in rows.items():
        w = G.weights[lead]
        blocks.setdefault(w, []).append([row.get(i, 0) for i in layers[w]])
    out = []
    for k in range(1, G.cap + 1):
        dim = len(layers.get(k, ()))
        divs = smith_divisors(blocks[k]) if k in blocks else []
        out.append(LayerDescription(
            weight=k,
            free_rank=dim - len(divs),
            torsion=tuple(t for t in divs if t > 1)))
    return out


def nilpotency_class(G) -> ClassBound:
    nontrivial = [L.weight for L in lower_central_series(G) if not L.trivial]
    value = max(nontrivial, default=0)
    return ClassBound(value, value == G.cap, G.cap)


def subgroup_class(G, gens) -> ClassBound:
    """Class of the subgroup generated by gens: gamma_k of the subgroup is
    trivial exactly when every left-normed commutator of length k in the
    generators is trivial (longer commutators extend length-k ones, and the
    identity only extends to the identity)."""
    elems = [g for g in gens if not g.is_identity]
    if not elems:
        return ClassBound(0, False, G.cap)
    for g in elems:
        if g.group is not G:
            raise ValueError("generator from a different presentation")
    level = elems
    depth = 1
    while depth < G.cap:
        nxt = []
        seen = set()
        for w in level:
            for g in elems:
                c = commutator(w, g)
                if c.exps and c.exps not in seen:
                    seen.add(c.exps)
                    nxt.append(c)
        if not nxt:
            return ClassBound(depth, False, G.cap)
        level = nxt
        depth += 1
    return ClassBound(G.cap, True, G.cap)


class Subgroup:
    """Subgroup given by generators, with membership and per-layer lattice
    data through an induced echelon row set computed on demand.  For a
    quotient the rows live in the parent free presentation and include the
    quotient's relator rows, so membership lifts correctly."""

    def __init__(self, G, gens):
        self.group = G
        self.gens = list(gens)
        for g in self.gens:
            if g.group is not G:
                raise ValueError("generator from a different presentation")
        self._rows: dict[int, dict[int, int]] | None = None

    def _free(self) -> PcPresentation:
        return self.group.free if isinstance(self.group, QuotientPresentation) else self.group

    def _echelon(self) -> dict[int, dict[int, int]]:
        if self._rows is not None:
            return self._rows
        free = self._free()
        nc = NormalClosure(free)  # reuse the echelon+sift machinery
        seeds = [dict(g.exps) for g in self.gens]
        if isinstance(self.group, QuotientPresentation):
            seeds.extend(dict(r) for r in self.group.closure.rows.values())
        for s in seeds:
            if s:
                nc.add(s)
        # close under conjugation of rows by rows (both signs) so that
        # sifting against the rows decides membership
        while True:
            changed = False
            rows = [dict(r) for r in nc.rows.values()]
            for u in rows:
                for v in rows:
                    if u is v:
                        continue
                    for arg in (u, free._inv(u)):
                        c = free._mul(free._mul(free._inv(arg), v), arg)
                        if c != v and nc.add(c):
                            changed = True
            if not changed:
                break
        self._rows = nc.rows
        return self._rows

    def contains(self, u: GroupElement) -> bool:
        if u.group is not self.group:
            raise ValueError("element from a different presentation")
        free = self._free()
        nc = NormalClosure(free)
        nc.rows = self._echelon()
        return nc.sifts_to_identity(dict(u.exps))

    def layer_lattice(self, k: int) -> list[list[int]]:
        """Echelon rows of the weight-k layer image of the subgroup's
        members supported on weights >= k."""
        free = self._free()
        layers = _layer_indices(free)
        idx = layers.get(k, [])
        out = []
        for lead, row in sorted(self._echelon().items()):
            if free.weights[lead] == k:
                out.append([row.get(i, 0) for i in idx])
        return out


# -- serialization ---------------------------------------------------------------------


def dump_presentation(G) -> str:
    """Text form: one line per pc generator (index, weight, definition), one
    line per stored conjugation relation as an exponent vector, and for
    quotients one line per closure row.  Indices are 1-based."""
    free = G.free if isinstance(G, QuotientPresentation) else G
    lines = ["nilpotent-pc rank=%d class=%d" % (free.rank, free.cap)]
    for i in range(free.ngens):
        d = free.definition(i)
        dtxt = "free" if d is None else "[%d,%d]" % (d[0] + 1, d[1] + 1)
        lines.append("gen %d weight=%d def=%s" % (i + 1, free.weights[i], dtxt))
    for (s, t, e) in sorted(k for k in free._conj_cache if abs(k[2]) == 1):
        tail = free._conj_cache[(s, t, e)]
        if tail == {s: 1}:
            continue
        vec = " ".join("%d:%d" % (i + 1, c) for i, c in sorted(tail.items()))
        lines.append("conj %d %d %d %s" % (s + 1, t + 1, e, vec))
    if isinstance(G, QuotientPresentation):
        for lead in sorted(G.closure.rows):
            row = G.closure.rows[lead]
            vec = " ".join("%d:%d" % (i + 1, c) for i, c in sorted(row.items()))
            lines.append("row %s" % vec)
    return "\n".join(lines) + "\n"


def read_presentation(text: str):
    """Inverse of dump_presentation; the stored tables are installed rather
    than recomputed, so read(dump(P)) is bit-exact."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("nilpotent-pc "):
        raise ValueError("not a presentation dump")
    head = dict(part.split("=") for part in lines[0].split()[1:])
    rank, cap = int(head["rank"]), int(head["class"])
    basis = hall_lie.get_basis(rank, cap)
    ngens = len(basis.words)
    weights = [w.weight for w in basis.words]
    tables: dict[tuple[int, int, int], dict[int, int]] = {}
    for j in range(ngens):
        for i in range(j):
            if weights[i] + weights[j] <= cap:
                tables[(j, i, 1)] = {j: 1}
                tables[(j, i, -1)] = {j: 1}
    rows: list[dict[int, int]] = []
    ngen_lines = 0
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "gen":
            idx = int(parts[1]) - 1
            w = int(parts[2].split("=")[1])
            d = parts[3].split("=")[1]
            word = basis.words[idx]
            if w != word.weight:
                raise ValueError("weight mismatch on generator %d" % (idx + 1))
            if d == "free":
                if word.generator is None:
                    raise ValueError("bad definition on generator %d" % (idx + 1))
            else:
                j, k = (int(x) for x in d.strip("[]").split(","))
                if word.generator is not None or \
                        (word.left.index, word.right.index) != (j - 1, k - 1):
                    raise ValueError("bad definition on generator %d" % (idx + 1))
            ngen_lines += 1
        elif parts[0] == "conj":
            s, t, e = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
            vec = {}
            for item in parts[4:]:
                i, c = item.split(":")
                vec[int(i) - 1] = int(c)
            tables[(s, t, e)] = vec
        elif parts[0] == "row":
            vec = {}
            for item in parts[1:]:
                i, c = item.split(":")
                vec[int(i) - 1] = int(c)
            rows.append(vec)
        else:
            raise ValueError("bad line: %r" % ln)
    if ngen_lines != ngens:
        raise ValueError("expected %d generator lines, got %d" % (ngens, ngen_lines))
    P = PcPresentation(rank, cap, _tables=tables)
    if not rows:
        return P
    nc = NormalClosure(P)
    for row in rows:
        nc.rows[min(row)] = row
    return QuotientPresentation(P, nc)


def presentation_digest(G) -> str:
    return hashlib.sha256(dump_presentation(G).encode()).hexdigest()


# -- construction entry point ------------------------------------------------------------


_pc_cache: dict[tuple[int, int], PcPresentation] = {}
_pc_lock = threading.Lock()


def free_nilpotent(rank: int, cap: int) -> PcPresentation:
    """The free nilpotent group of the given rank and class, as a weighted
    polycyclic presentation.  Presentations are immutable and cached."""
    key = (rank, cap)
    hit = _pc_cache.get(key)
    if hit is None:
        with _pc_lock:
            hit = _pc_cache.get(key)
            if hit is None:
                hit = PcPresentation(rank, cap)
                _pc_cache[key] = hit
    return hit
