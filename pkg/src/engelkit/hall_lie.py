"""Free Lie rings over the integers or GF(p), truncated at a degree cap.

Basis machinery: the classical Hall family on generators x1 < ... < xr,
where [u, v] belongs to the family iff u and v do, u > v, and (when
u = [u1, u2]) u2 <= v.  Elements are ordered by (weight, creation index).
Every bracket of basis elements rewrites into the family by the Jacobi
recursion [[u1,u2],v] = [[u1,v],u2] + [u1,[u2,v]]; the resulting structure
constants are integers, computed once and shared by every coefficient ring
of the same rank and cap (prime fields reduce at the element level).

Terms of weight above the cap are silently dropped everywhere: that is the
defining property of the truncated ring, not an error condition.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from ._lattice import FieldSpace, Gf2Space, IntLattice


@dataclass(frozen=True, eq=False)
class HallWord:
    """A basic-commutator tree: a generator leaf or a bracket of two trees."""

    weight: int
    index: int                    # position in the basis, (weight, creation) order
    generator: int | None = None  # 1-based, for leaves
    left: "HallWord | None" = None
    right: "HallWord | None" = None

    def leaves(self) -> list[int]:
        if self.generator is not None:
            return [self.generator]
        return self.left.leaves() + self.right.leaves()

    def label(self, names: tuple[str, ...]) -> str:
        if self.generator is not None:
            return names[self.generator - 1]
        return "[%s,%s]" % (self.left.label(names), self.right.label(names))

    def __repr__(self):
        return self.label(tuple("x%d" % (i + 1) for i in range(max(self.leaves()))))


class HallBasis:
    """Hall basis of the free Lie ring of the given rank, up to weight cap,
    together with memoized integer structure constants."""

    def __init__(self, rank: int, cap: int):
        if rank < 1 or cap < 1:
            raise ValueError("rank and cap must be positive")
        self.rank = rank
        self.cap = cap
        self.words: list[HallWord] = []
        self.by_weight: list[list[HallWord]] = [[] for _ in range(cap + 1)]
        self.pair_index: dict[tuple[int, int], HallWord] = {}
        # local position of a word inside its weight layer
        self.layer_pos: list[int] = []
        for i in range(1, rank + 1):
            self._new_word(1, generator=i)
        for w in range(2, cap + 1):
            for v in list(self.words):
                if v.weight >= w:
                    break
                wu = w - v.weight
                for u in self.by_weight[wu]:
                    if u.index <= v.index:
                        continue
                    if u.generator is None and u.right.index > v.index:
                        continue
                    word = self._new_word(w, left=u, right=v)
                    self.pair_index[(u.index, v.index)] = word
        self._prod: dict[tuple[int, int], dict[int, int]] = {}
        self._lock = threading.Lock()

    def _new_word(self, weight, generator=None, left=None, right=None) -> HallWord:
        word = HallWord(weight=weight, index=len(self.words),
                        generator=generator, left=left, right=right)
        self.words.append(word)
        self.layer_pos.append(len(self.by_weight[weight]))
        self.by_weight[weight].append(word)
        return word

    def layer_sizes(self) -> list[int]:
        return [len(self.by_weight[w]) for w in range(1, self.cap + 1)]

    # -- structure constants -------------------------------------------------

    def product(self, i: int, j: int) -> dict[int, int]:
        """[b_i, b_j] as {basis index: integer coefficient}."""
        if i == j:
            return {}
        if i < j:
            return {k: -c for k, c in self.product(j, i).items()}
        key = (i, j)
        hit = self._prod.get(key)
        if hit is not None:
            return hit
        u, v = self.words[i], self.words[j]
        if u.weight + v.weight > self.cap:
            out: dict[int, int] = {}
        elif u.generator is not None or u.right.index <= j:
            out = {self.pair_index[(i, j)].index: 1}
        else:
            # [[u1,u2],v] = [[u1,v],u2] + [u1,[u2,v]]
            u1, u2 = u.left.index, u.right.index
            out = {}
            for k, c in self.product(u1, j).items():
                for t, d in self.product(k, u2).items():
                    out[t] = out.get(t, 0) + c * d
            for k, c in self.product(u2, j).items():
                for t, d in self.product(u1, k).items():
                    out[t] = out.get(t, 0) + c * d
            out = {t: c for t, c in out.items() if c}
        with self._lock:
            self._prod[key] = out
        return out

    def product_vec(self, va: dict[int, int], vb: dict[int, int]) -> dict[int, int]:
        """Bracket of two coefficient vectors over the integers."""
        out: dict[int, int] = {}
        for i, ci in va.items():
            for j, cj in vb.items():
                c = ci * cj
                for t, d in self.product(i, j).items():
                    nv = out.get(t, 0) + c * d
                    if nv:
                        out[t] = nv
                    else:
                        del out[t]
        return out


_basis_cache: dict[tuple[int, int], HallBasis] = {}
_basis_lock = threading.Lock()


def get_basis(rank: int, cap: int) -> HallBasis:
    key = (rank, cap)
    basis = _basis_cache.get(key)
    if basis is None:
        with _basis_lock:
            basis = _basis_cache.get(key)
            if basis is None:
                basis = HallBasis(rank, cap)
                _basis_cache[key] = basis
    return basis


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class CoefficientRing:
    """Integers (p = 0) or the prime field GF(p)."""

    p: int = 0

    def __post_init__(self):
        if self.p and not _is_prime(self.p):
            raise ValueError("modulus must be prime (or 0 for the integers)")

    def normalize(self, c: int) -> int:
        return c % self.p if self.p else c

    def __str__(self):
        return "GF(%d)" % self.p if self.p else "Z"


INTEGERS = CoefficientRing(0)


class FreeLieRing:
    """Context object: rank, degree cap, coefficient ring, generator names."""

    def __init__(self, rank: int, cap: int, ring: CoefficientRing = INTEGERS,
                 names: tuple[str, ...] | None = None):
        self.basis = get_basis(rank, cap)
        self.rank = rank
        self.cap = cap
        self.ring = ring
        if names is None:
            names = tuple("x%d" % i for i in range(1, rank + 1))
        if len(names) != rank:
            raise ValueError("need one name per generator")
        self.names = tuple(names)

    def generator(self, i: int) -> "LieElement":
        if not 1 <= i <= self.rank:
            raise ValueError("generator index out of range")
        return LieElement(self, {i - 1: 1})

    def generators(self) -> list["LieElement"]:
        return [self.generator(i) for i in range(1, self.rank + 1)]

    def zero(self) -> "LieElement":
        return LieElement(self, {})

    def element(self, coords: dict[HallWord, int]) -> "LieElement":
        return LieElement(self, {w.index: c for w, c in coords.items()})

    def compatible(self, other: "FreeLieRing") -> bool:
        return (self.rank, self.cap, self.ring) == (other.rank, other.cap, other.ring)

    def __repr__(self):
        return "FreeLieRing(rank=%d, cap=%d, %s)" % (self.rank, self.cap, self.ring)


class LieElement:
    """Sparse coefficient vector over the Hall basis of its context."""

    __slots__ = ("context", "vec")

    def __init__(self, context: FreeLieRing, vec: dict[int, int]):
        norm = context.ring.normalize
        self.context = context
        self.vec = {}
        for k, c in vec.items():
            c = norm(c)
            if c:
                self.vec[k] = c

    @property
    def coords(self) -> dict[HallWord, int]:
        words = self.context.basis.words
        return {words[k]: c for k, c in self.vec.items()}

    def is_zero(self) -> bool:
        return not self.vec

    def weights(self) -> set[int]:
        words = self.context.basis.words
        return {words[k].weight for k in self.vec}

    def component(self, w: int) -> "LieElement":
        words = self.context.basis.words
        return LieElement(self.context,
                          {k: c for k, c in self.vec.items() if words[k].weight == w})

    def _check(self, other: "LieElement") -> None:
        if self.context is not other.context and not self.context.compatible(other.context):
            raise ValueError("elements from mismatched contexts")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        out = dict(self.vec)
        for k, c in other.vec.items():
            out[k] = out.get(k, 0) + c
        return LieElement(self.context, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.context, {k: -c for k, c in self.vec.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def scale(self, c: int) -> "LieElement":
        return LieElement(self.context, {k: c * v for k, v in self.vec.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        self._check(other)
        return self.vec == other.vec

    def __hash__(self):
        return hash(frozenset(self.vec.items()))

    def __repr__(self):
        if not self.vec:
            return "0"
        words = self.context.basis.words
        names = self.context.names
        parts = []
        for k in sorted(self.vec):
            c = self.vec[k]
            lbl = words[k].label(names)
            parts.append(lbl if c == 1 else "%d*%s" % (c, lbl))
        return " + ".join(parts)


def build_hall_basis(r: int, D: int) -> list[list[HallWord]]:
    """Hall basis elements grouped by weight 1..D, each layer in basis order."""
    basis = get_basis(r, D)
    return [list(basis.by_weight[w]) for w in range(1, D + 1)]


def bracket(x: LieElement, y: LieElement) -> LieElement:
    x._check(y)
    return LieElement(x.context, x.context.basis.product_vec(x.vec, y.vec))


def left_normed(xs: list[LieElement]) -> LieElement:
    """((x1 . x2) . x3) . ... folded from the left."""
    if not xs:
        raise ValueError("left_normed of an empty list")
    acc = xs[0]
    for x in xs[1:]:
        acc = bracket(acc, x)
    return acc


class LieIdeal:
    """Graded ideal, one echelonized row space per weight layer.

    Coordinates are local: the position of a basis element inside its
    weight layer.  Over GF(2) the rows are bitmasks."""

    def __init__(self, ring: FreeLieRing):
        self.ring = ring
        p = ring.ring.p
        if p == 2:
            self.spaces = [Gf2Space() for _ in range(ring.cap + 1)]
        elif p:
            self.spaces = [FieldSpace(p) for _ in range(ring.cap + 1)]
        else:
            self.spaces = [IntLattice() for _ in range(ring.cap + 1)]
        self._gf2 = p == 2

    def _to_local(self, elem: LieElement, w: int):
        basis = self.ring.basis
        if self._gf2:
            mask = 0
            for k in elem.vec:
                if basis.words[k].weight == w:
                    mask |= 1 << basis.layer_pos[k]
            return mask
        return {basis.layer_pos[k]: c for k, c in elem.vec.items()
                if basis.words[k].weight == w}

    def _from_local(self, local, w: int) -> LieElement:
        layer = self.ring.basis.by_weight[w]
        if self._gf2:
            vec = {}
            pos = 0
            while local:
                if local & 1:
                    vec[layer[pos].index] = 1
                local >>= 1
                pos += 1
            return LieElement(self.ring, vec)
        return LieElement(self.ring, {layer[pos].index: c for pos, c in local.items()})

    def add(self, elem: LieElement) -> bool:
        grew = False
        for w in elem.weights():
            if self.spaces[w].add(self._to_local(elem, w)):
                grew = True
        return grew

    def reduce(self, elem: LieElement) -> LieElement:
        out = self.ring.zero()
        for w in elem.weights():
            local = self.spaces[w].reduce(self._to_local(elem, w))
            out = out + self._from_local(local, w)
        return out

    def contains(self, elem: LieElement) -> bool:
        return self.reduce(elem).is_zero()

    def rank(self, w: int) -> int:
        return self.spaces[w].rank

    def layer_rows(self, w: int) -> list[LieElement]:
        space = self.spaces[w]
        if self._gf2:
            return [self._from_local(m, w) for m in space.rows.values()]
        return [self._from_local(dict(row), w) for row in space.rows.values()]


def ideal_closure(gens: list[LieElement], ring: FreeLieRing) -> LieIdeal:
    """Smallest graded ideal containing the generators, truncated at the cap.

    Single ascending pass: the weight-w layer is spanned by the weight-w
    components of the generators plus brackets of the settled weight-(w-1)
    layer with the ring's degree-1 generators.  Inhomogeneous generators
    contribute each homogeneous component separately."""
    ideal = LieIdeal(ring)
    by_weight: dict[int, list[LieElement]] = {}
    for g in gens:
        if g.context is not ring and not g.context.compatible(ring):
            raise ValueError("generator from a mismatched context")
        for w in g.weights():
            by_weight.setdefault(w, []).append(g.component(w))
    xs = ring.generators()
    for w in range(1, ring.cap + 1):
        for g in by_weight.get(w, ()):
            ideal.add(g)
        if w + 1 > ring.cap:
            break
        for row in ideal.layer_rows(w):
            for x in xs:
                v = bracket(row, x)
                if not v.is_zero():
                    ideal.add(v)
    return ideal


def reduce(x: LieElement, I: LieIdeal) -> LieElement:
    """Canonical representative of x modulo I; zero iff x lies in I."""
    if x.context is not I.ring and not x.context.compatible(I.ring):
        raise ValueError("element and ideal from mismatched contexts")
    return I.reduce(x)


def quotient_dims(I: LieIdeal) -> list[int]:
    """Per-degree dimensions (ranks) of (free ring)/I for degrees 1..cap."""
    ring = I.ring
    return [len(ring.basis.by_weight[w]) - I.rank(w) for w in range(1, ring.cap + 1)]


@dataclass
class SandwichCheck:
    """Outcome of a pointwise product-vanishing check, with witness."""

    ok: bool
    mode: str
    witness: tuple[HallWord, ...] | None = None

    def __bool__(self):
        return self.ok


def is_sandwich(a: LieElement, Q: LieIdeal, mode: str = "full") -> SandwichCheck:
    """Check [[a,h],a] = 0 (condition1) and, for mode "full", also
    [[[a,h],k],a] = 0 in the quotient by Q, with h, k running over Hall
    basis elements of every admissible weight.  Instantiating over basis
    elements suffices by multilinearity.  The first failing instance, in
    ascending basis order, is returned as the witness."""
    if mode not in ("condition1", "full"):
        raise ValueError("mode must be 'condition1' or 'full'")
    ring = Q.ring
    a = Q.reduce(a)
    if a.is_zero():
        return SandwichCheck(True, mode)
    wa = min(a.weights())
    cap = ring.cap
    budget = cap - 2 * wa
    if budget < 1:
        raise ValueError("degree cap %d leaves no room to instantiate any "
                         "condition on an element of weight %d" % (cap, wa))
    words = ring.basis.words
    candidates = [w for w in words if w.weight <= budget]
    for h in candidates:
        he = LieElement(ring, {h.index: 1})
        if not Q.reduce(left_normed([a, he, a])).is_zero():
            return SandwichCheck(False, mode, (h,))
    if mode == "full":
        for h in candidates:
            he = LieElement(ring, {h.index: 1})
            ah = Q.reduce(bracket(a, he))
            if ah.is_zero():
                continue
            for k in words:
                if h.weight + k.weight > budget:
                    continue
                ke = LieElement(ring, {k.index: 1})
                if not Q.reduce(bracket(bracket(ah, ke), a)).is_zero():
                    return SandwichCheck(False, mode, (h, k))
    return SandwichCheck(True, mode)
