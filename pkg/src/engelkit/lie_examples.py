"""The rank-3 GF(2) quotient algebra with relations bc = 0, gxg = 0 for each
generator g, and an abelian ideal closure of c; plus the odd-characteristic
redundancy check for the second product-vanishing condition.

Two interchangeable engines build the quotient.  The "free" engine quotients
an honestly constructed truncated free Lie ring (feasible up to degree cap 8
on three generators).  The "graded" engine builds the quotient layer by
layer: each new layer starts from candidate symbols [q, x] (q a basis element
of the previous layer, x a generator), and is cut down by bilinearity/Jacobi
consequences plus the relator instances of that degree.  Both engines compute
the same object; the test suite cross-validates them where both run, which is
what licenses the graded engine at caps the free ring cannot reach.
"""

from __future__ import annotations

from . import hall_lie
from ._lattice import FieldSpace, Gf2Space


def _vadd(out: dict, vec: dict, scale: int, p: int) -> None:
    for k, c in vec.items():
        nv = (out.get(k, 0) + scale * c) % p
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)


class GradedLieQuotient:
    """Layer-by-layer quotient of the free Lie ring over GF(p) by homogeneous
    relators supplied per degree.

    Degree-d basis elements for d >= 2 are surviving candidate symbols
    (parent, generator) meaning [parent, x_generator]; every basis element
    therefore carries a definition, which drives the recursive expansion of
    arbitrary products.  With no relators at all the layer dimensions must
    reproduce the free-ring (necklace) dimensions; that is tested."""

    def __init__(self, rank: int, cap: int, p: int, names: tuple[str, ...] | None = None):
        self.rank = rank
        self.cap = cap
        self.p = p
        self.names = names or tuple("x%d" % i for i in range(1, rank + 1))
        self.basis: list[list] = [[]]      # basis[d], 1-based degrees
        self.reduction: list[dict] = [{}]  # candidate id -> basis vector, per degree
        self._pmemo: dict = {}
        self._built = 0

    # -- candidate bookkeeping ------------------------------------------------

    @property
    def next_degree(self) -> int:
        return self._built + 1

    def dim(self, d: int) -> int:
        return len(self.basis[d])

    def dims(self) -> list[int]:
        return [len(self.basis[d]) for d in range(1, self._built + 1)]

    def _cand_count(self, d: int) -> int:
        if d == 1:
            return self.rank
        if d == 2:
            return self.rank * (self.rank - 1) // 2
        return len(self.basis[d - 1]) * self.rank

    def _cand_pairs2(self) -> list[tuple[int, int]]:
        # degree-2 candidate symbols [x_i, x_j], i > j, in ascending order
        return [(i, j) for i in range(2, self.rank + 1) for j in range(1, i)]

    def _cand2_id(self, i: int, j: int) -> int:
        return self._cand_pairs2().index((i, j))

    def _pair_cand(self, i: int, j: int) -> tuple[int, int]:
        """Candidate id and sign for [x_i, x_j] at degree 2 (i != j)."""
        if i > j:
            return self._cand2_id(i, j), 1
        return self._cand2_id(j, i), -1

    def gen_vec(self, g: int) -> dict[int, int]:
        """Image of generator g as a vector over the degree-1 basis."""
        return dict(self.reduction[1][g - 1])

    def gen_bracket_vec(self, i: int, j: int) -> dict[int, int]:
        """[x_i, x_j] over the degree-2 basis (degree 2 must be built)."""
        if i == j:
            return {}
        sign = 1
        if i < j:
            i, j, sign = j, i, -1
        out: dict[int, int] = {}
        _vadd(out, self.reduction[2][self._cand2_id(i, j)], sign, self.p)
        return out

    def bracket_gen_to_cand(self, vec: dict[int, int], g: int) -> dict[int, int]:
        """[vec, x_g] in candidate coordinates of the frontier degree; vec is
        over the basis of degree next_degree - 1."""
        out: dict[int, int] = {}
        if self.next_degree == 2:
            for q, c in vec.items():
                gi = self.basis[1][q]
                if gi == g:
                    continue
                cid, sign = self._pair_cand(gi, g)
                out[cid] = (out.get(cid, 0) + sign * c) % self.p
        else:
            for q, c in vec.items():
                cid = q * self.rank + (g - 1)
                out[cid] = (out.get(cid, 0) + c) % self.p
        return {k: c for k, c in out.items() if c}

    # -- products over settled layers ------------------------------------------

    def product_basis(self, d1: int, i1: int, d2: int, i2: int) -> dict[int, int]:
        """[b, b'] for basis elements, as a vector over basis(d1 + d2)."""
        if d1 + d2 > self._built:
            return {}
        if d2 > d1 or (d2 == d1 and i2 > i1):
            flipped = self.product_basis(d2, i2, d1, i1)
            return {k: (-c) % self.p for k, c in flipped.items()}
        if d1 == d2 and i1 == i2:
            return {}
        # now (d1, i1) >= (d2, i2); recurse on the second argument's degree
        if d2 == 1:
            if d1 == 1:
                gi = self.basis[1][i1]
                gj = self.basis[1][i2]
                return self.gen_bracket_vec(gi, gj)
            g = self.basis[1][i2]
            cid = i1 * self.rank + (g - 1)
            return dict(self.reduction[d1 + 1][cid])
        key = (d1, i1, d2, i2)
        hit = self._pmemo.get(key)
        if hit is not None:
            return dict(hit)
        # second argument b' = [parent, x_g]; [u,[v,w]] = [[u,v],w] - [[u,w],v]
        parent, g = self.basis[d2][i2]
        t1_inner = self.product_basis(d1, i1, d2 - 1, parent)
        out: dict[int, int] = {}
        for q, c in t1_inner.items():
            _vadd(out, self.reduction[d1 + d2][q * self.rank + (g - 1)], c, self.p)
        u_g = self.product_vec(d1, {i1: 1}, 1, self._gen_local_vec(g))
        t2 = self.product_vec(d1 + 1, u_g, d2 - 1, {parent: 1})
        _vadd(out, t2, -1, self.p)
        out = {k: c for k, c in out.items() if c}
        self._pmemo[key] = dict(out)
        return out

    def _gen_local_vec(self, g: int) -> dict[int, int]:
        return {k: c for k, c in self.reduction[1][g - 1].items()}

    def product_vec(self, d1: int, v1: dict[int, int], d2: int, v2: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for i1, c1 in v1.items():
            for i2, c2 in v2.items():
                _vadd(out, self.product_basis(d1, i1, d2, i2), c1 * c2, self.p)
        return out

    def product_to_cand(self, d1: int, v1: dict[int, int], d2: int, v2: dict[int, int]) -> dict[int, int]:
        """Bilinear product landing in the frontier degree, in candidate
        coordinates (the frontier layer is not reduced yet)."""
        assert d1 + d2 == self.next_degree
        out: dict[int, int] = {}
        self._ptc(d1, v1, d2, v2, 1, out)
        return {k: c for k, c in out.items() if c}

    def _ptc(self, d1, v1, d2, v2, scale, out) -> None:
        if not v1 or not v2:
            return
        if d2 == 1:
            for g_loc, cg in v2.items():
                g = self.basis[1][g_loc]
                for q, c in v1.items():
                    if d1 == 1:
                        gi = self.basis[1][q]
                        if gi == g:
                            continue
                        cid, sign = self._pair_cand(gi, g)
                        out[cid] = (out.get(cid, 0) + sign * scale * c * cg) % self.p
                    else:
                        cid = q * self.rank + (g - 1)
                        out[cid] = (out.get(cid, 0) + scale * c * cg) % self.p
            return
        if d1 == 1 and d2 > 1:
            self._ptc(d2, v2, d1, v1, -scale, out)
            return
        # expand each second-argument basis element by its definition
        for i2, c2 in v2.items():
            parent, g = self.basis[d2][i2]
            t1 = self.product_vec(d1, v1, d2 - 1, {parent: 1})
            self._ptc(d1 + d2 - 1, t1, 1, self._gen_local_vec(g), scale * c2, out)
            ug = self.product_vec(d1, v1, 1, self._gen_local_vec(g))
            self._ptc(d1 + 1, ug, d2 - 1, {parent: 1}, -scale * c2, out)

    # -- layer construction -----------------------------------------------------

    def extend(self, relator_rows: list[dict[int, int]]) -> None:
        """Build the next degree layer, cutting the candidate space by the
        structural (bilinearity/Jacobi) rows and the given relator rows."""
        d = self.next_degree
        if d > self.cap:
            raise ValueError("cap reached")
        ncand = self._cand_count(d)
        rows: list[dict[int, int]] = list(relator_rows)
        if d == 3:
            # Jacobi instances [[q,x],y] - [[q,y],x] - [q,[x,y]] over
            # generator triples; for deeper layers these expand to zero
            # identically because composite second arguments are evaluated
            # through the same rearrangement
            rank = self.rank
            for q in range(len(self.basis[1])):
                for x in range(1, rank + 1):
                    for y in range(x + 1, rank + 1):
                        row: dict[int, int] = {}
                        vqx = self._qgen_vec(1, q, x)
                        for k, c in vqx.items():
                            cid = k * rank + (y - 1)
                            row[cid] = (row.get(cid, 0) + c) % self.p
                        vqy = self._qgen_vec(1, q, y)
                        for k, c in vqy.items():
                            cid = k * rank + (x - 1)
                            row[cid] = (row.get(cid, 0) - c) % self.p
                        xy = self.gen_bracket_vec(x, y)
                        self._ptc(1, {q: 1}, 2, xy, -1, row)
                        row = {k: c for k, c in row.items() if c}
                        if row:
                            rows.append(row)
        if d >= 4:
            # antisymmetry and alternation among pairs of composite degree;
            # pairs with a degree-1 factor hold structurally (the evaluation
            # rule flips them), so the content starts at degree 2 + 2
            for i in range(2, d // 2 + 1):
                j = d - i
                for u in range(len(self.basis[i])):
                    vstart = u if i == j else 0
                    for v in range(vstart, len(self.basis[j])):
                        row = {}
                        self._ptc(i, {u: 1}, j, {v: 1}, 1, row)
                        if not (i == j and v == u):
                            self._ptc(j, {v: 1}, i, {u: 1}, 1, row)
                        row = {k: c for k, c in row.items() if c}
                        if row:
                            rows.append(row)
        self._cut(d, ncand, rows)

    def _qgen_vec(self, dq: int, q: int, g: int) -> dict[int, int]:
        """[q, x_g] over the basis of degree dq + 1 (settled)."""
        if dq == 1:
            gq = self.basis[1][q]
            return self.gen_bracket_vec(gq, g)
        return dict(self.reduction[dq + 1][q * self.rank + (g - 1)])

    def _cut(self, d: int, ncand: int, rows: list[dict[int, int]]) -> None:
        p = self.p
        if p == 2:
            space = Gf2Space()
            for row in rows:
                mask = 0
                for k, c in row.items():
                    if c % 2:
                        mask |= 1 << k
                space.add(mask)
            space.to_rref()
            pivot_expr = {}
            for lead, mask in space.rows.items():
                expr = {}
                rest = mask & ~(1 << lead)
                while rest:
                    bit = rest & -rest
                    expr[bit.bit_length() - 1] = 1
                    rest ^= bit
                pivot_expr[lead] = expr
        else:
            space = FieldSpace(p)
            for row in rows:
                space.add(row)
            space.to_rref()
            pivot_expr = {}
            for lead, rowd in space.rows.items():
                pivot_expr[lead] = {k: (-c) % p for k, c in rowd.items() if k != lead}
        survivors = [cid for cid in range(ncand) if cid not in pivot_expr]
        local_of = {cid: pos for pos, cid in enumerate(survivors)}
        reduction: dict[int, dict[int, int]] = {}
        for cid in range(ncand):
            if cid in local_of:
                reduction[cid] = {local_of[cid]: 1}
            else:
                reduction[cid] = {local_of[k]: c for k, c in pivot_expr[cid].items()}
        if d == 1:
            syms = list(range(1, self.rank + 1))
            self.basis.append([syms[cid] for cid in survivors])
        elif d == 2:
            pairs = self._cand_pairs2()
            self.basis.append([pairs[cid] for cid in survivors])
            # re-key surviving pairs [x_i, x_j] as (parent local index, j) so
            # degree-2 symbols carry definitions like every deeper layer
            self.basis[2] = [(self._deg1_local(i), j) for (i, j) in self.basis[2]]
        else:
            syms = [(cid // self.rank, self.basis[1][cid % self.rank])
                    for cid in range(ncand)]
            self.basis.append([syms[cid] for cid in survivors])
        self.reduction.append(reduction)
        self._built = d

    def _deg1_local(self, g: int) -> int:
        return self.basis[1].index(g)

    # -- element helpers --------------------------------------------------------

    def generator_element(self, g: int) -> dict[tuple[int, int], int]:
        return {(1, k): c for k, c in self.gen_vec(g).items()}

    def bracket_elements(self, u: dict, v: dict) -> dict[tuple[int, int], int]:
        """Bracket of inhomogeneous elements given as {(degree, local): coeff}."""
        out: dict[tuple[int, int], int] = {}
        by_deg_u: dict[int, dict[int, int]] = {}
        by_deg_v: dict[int, dict[int, int]] = {}
        for (d, k), c in u.items():
            by_deg_u.setdefault(d, {})[k] = c
        for (d, k), c in v.items():
            by_deg_v.setdefault(d, {})[k] = c
        for d1, v1 in by_deg_u.items():
            for d2, v2 in by_deg_v.items():
                if d1 + d2 > self._built:
                    continue
                prod = self.product_vec(d1, v1, d2, v2)
                for k, c in prod.items():
                    key = (d1 + d2, k)
                    nv = (out.get(key, 0) + c) % self.p
                    if nv:
                        out[key] = nv
                    else:
                        out.pop(key, None)
        return out

    def left_normed_elements(self, parts: list[dict]) -> dict:
        acc = parts[0]
        for x in parts[1:]:
            acc = self.bracket_elements(acc, x)
        return acc

    def basis_label(self, d: int, local: int) -> str:
        if d == 1:
            return self.names[self.basis[1][local] - 1]
        parent, g = self.basis[d][local]
        return "[%s,%s]" % (self.basis_label(d - 1, parent), self.names[g - 1])


class ExampleAlgebra:
    """The rank-3 GF(2) quotient with its defining relator families, backed
    by either engine; exposes layer dimensions, product evaluation, the
    nonvanishing witness family, and the product-vanishing checks."""

    def __init__(self, cap: int, engine: str):
        self.cap = cap
        self.engine = engine
        self.names = ("a", "b", "c")
        if engine == "free":
            self._build_free()
        elif engine == "graded":
            self._build_graded()
        else:
            raise ValueError("engine must be 'free' or 'graded'")

    # -- free-ring engine -------------------------------------------------------

    def _build_free(self):
        ring = hall_lie.FreeLieRing(3, self.cap, hall_lie.CoefficientRing(2),
                                    names=self.names)
        a, b, c = ring.generators()
        gens = [hall_lie.bracket(b, c)]
        for g in (a, b, c):
            for layer in hall_lie.build_hall_basis(3, self.cap)[:self.cap - 2]:
                for h in layer:
                    gens.append(hall_lie.left_normed([g, ring.element({h: 1}), g]))
        c_closure = hall_lie.ideal_closure([c], ring)
        rows_by_weight = {w: c_closure.layer_rows(w) for w in range(1, self.cap + 1)}
        for wi in range(1, self.cap + 1):
            for wj in range(wi, self.cap + 1 - wi):
                rows_i, rows_j = rows_by_weight[wi], rows_by_weight[wj]
                for ui, u in enumerate(rows_i):
                    for vj, v in enumerate(rows_j):
                        if wi == wj and vj <= ui:
                            continue
                        gens.append(hall_lie.bracket(u, v))
        self.ring = ring
        self.relators = gens
        self.ideal = hall_lie.ideal_closure(gens, ring)

    # -- graded engine ----------------------------------------------------------

    def _build_graded(self):
        q = GradedLieQuotient(3, self.cap, 2, names=self.names)
        c_span: dict[int, list[dict[int, int]]] = {}
        q.extend([])  # degree 1
        c_span[1] = [q.gen_vec(3)]
        for d in range(2, self.cap + 1):
            rows: list[dict[int, int]] = []
            if d == 2:
                rows.append(q.bracket_gen_to_cand(q.gen_vec(2), 3))  # [b, c]
            else:
                for g in (1, 2, 3):
                    for h in range(q.dim(d - 2)):
                        gh = {k: (-cc) % 2 for k, cc in q._qgen_vec(d - 2, h, g).items()}
                        rows.append(q.bracket_gen_to_cand(gh, g))
                for i in range(1, d):
                    j = d - i
                    if i > j:
                        break
                    for ui, u in enumerate(c_span.get(i, ())):
                        for vj, v in enumerate(c_span.get(j, ())):
                            if i == j and vj <= ui:
                                continue
                            row = q.product_to_cand(i, u, j, v)
                            if row:
                                rows.append(row)
            q.extend(rows)
            # settle the ideal-closure span of c at the new degree
            span_rows: list[dict[int, int]] = []
            space = Gf2Space()
            for v in c_span.get(d - 1, ()):
                for g in (1, 2, 3):
                    img = q.product_vec(d - 1, v, 1, q._gen_local_vec(g))
                    mask = 0
                    for k in img:
                        mask |= 1 << k
                    if mask and space.add(mask):
                        span_rows.append(img)
            c_span[d] = span_rows
        self.graded = q
        self._c_span = c_span

    # -- common interface ---------------------------------------------------------

    def dims(self) -> list[int]:
        if self.engine == "free":
            return hall_lie.quotient_dims(self.ideal)
        return self.graded.dims()

    def generator(self, name: str):
        i = self.names.index(name) + 1
        if self.engine == "free":
            return self.ring.generator(i)
        return self.graded.generator_element(i)

    def bracket(self, u, v):
        if self.engine == "free":
            return self.ideal.reduce(hall_lie.bracket(u, v))
        return self.graded.bracket_elements(u, v)

    def left_normed(self, parts):
        if self.engine == "free":
            return self.ideal.reduce(hall_lie.left_normed(parts))
        return self.graded.left_normed_elements(parts)

    def is_zero(self, elem) -> bool:
        if self.engine == "free":
            return self.ideal.reduce(elem).is_zero()
        return not elem

    def relations_hold(self) -> bool:
        """Re-evaluate every defining relator instance in the quotient."""
        a, b, c = (self.generator(n) for n in self.names)
        if not self.is_zero(self.bracket(b, c)):
            return False
        basis_elems = self._all_basis_elements(self.cap - 2)
        for g in (a, b, c):
            for h in basis_elems:
                if not self.is_zero(self.left_normed([g, h, g])):
                    return False
        for u, v in self._c_ideal_pairs():
            if not self.is_zero(self.bracket(u, v)):
                return False
        return True

    def _all_basis_elements(self, max_weight: int):
        out = []
        if self.engine == "free":
            for layer in hall_lie.build_hall_basis(3, self.cap)[:max_weight]:
                for h in layer:
                    out.append(self.ring.element({h: 1}))
        else:
            for d in range(1, min(max_weight, self.cap) + 1):
                for k in range(self.graded.dim(d)):
                    out.append({(d, k): 1})
        return out

    def _c_ideal_pairs(self):
        pairs = []
        if self.engine == "free":
            closure = hall_lie.ideal_closure([self.generator("c")], self.ring)
            rows = {w: closure.layer_rows(w) for w in range(1, self.cap + 1)}
        else:
            rows = {w: [{(w, k): c for k, c in v.items()} for v in self._c_span.get(w, ())]
                    for w in range(1, self.cap + 1)}
        for wi in range(1, self.cap + 1):
            for wj in range(wi, self.cap + 1 - wi):
                for ui, u in enumerate(rows[wi]):
                    for vj, v in enumerate(rows[wj]):
                        if wi == wj and vj <= ui:
                            continue
                        pairs.append((u, v))
        return pairs

    def sandwich_check(self, name: str, mode: str):
        """Product-vanishing check for a generator, with a labelled witness.

        The free engine instantiates over the free Hall basis; the graded
        engine instantiates over the quotient basis, which spans the same
        instances since the quotient map is onto."""
        if self.engine == "free":
            res = hall_lie.is_sandwich(self.generator(name), self.ideal, mode)
            witness = None
            if res.witness:
                witness = tuple(w.label(self.names) for w in res.witness)
            return res.ok, witness
        q = self.graded
        a = self.generator(name)
        budget = self.cap - 2
        candidates = [(d, k) for d in range(1, budget + 1)
                      for k in range(q.dim(d))]
        for (d, k) in candidates:
            h = {(d, k): 1}
            if self.left_normed([a, h, a]):
                return False, (q.basis_label(d, k),)
        if mode == "full":
            for (d, k) in candidates:
                h = {(d, k): 1}
                ah = self.bracket(a, h)
                if not ah:
                    continue
                for (d2, k2) in candidates:
                    if d + d2 > budget:
                        continue
                    k_elem = {(d2, k2): 1}
                    if self.bracket(self.bracket(ah, k_elem), a):
                        return False, (q.basis_label(d, k), q.basis_label(d2, k2))
        return True, None


def build_gf2_example(D: int, engine: str = "auto") -> ExampleAlgebra:
    """The largest GF(2) Lie ring on a, b, c with [b,c] = 0, all [[g,h],g] = 0,
    and an abelian ideal closure of c, truncated at degree D."""
    if D < 4:
        raise ValueError("degree cap must be at least 4")
    if engine == "auto":
        engine = "free" if D <= 8 else "graded"
    return ExampleAlgebra(D, engine)


def nonnilpotence_witness(A: ExampleAlgebra, n: int):
    """The left-normed product c,a,b,a,b,... with n repetitions of (a, b);
    asserts it is nonzero in the quotient and returns it."""
    if 1 + 2 * n > A.cap:
        raise ValueError("witness weight %d exceeds the degree cap %d"
                         % (1 + 2 * n, A.cap))
    parts = [A.generator("c")]
    for _ in range(n):
        parts.append(A.generator("a"))
        parts.append(A.generator("b"))
    elem = A.left_normed(parts)
    if A.is_zero(elem):
        raise AssertionError("witness of weight %d vanished" % (1 + 2 * n))
    return elem


def odd_char_check(p: int, r: int = 3, D: int = 4) -> bool:
    """True iff [[[a,x],y],a] lies in the ideal generated by all [[a,h],a]
    in the free GF(p) Lie ring on a, x, y truncated at degree D."""
    ring = hall_lie.FreeLieRing(r, D, hall_lie.CoefficientRing(p),
                                names=("a", "x", "y"))
    a, x, y = ring.generators()
    gens = []
    for layer in hall_lie.build_hall_basis(r, D)[:D - 2]:
        for h in layer:
            gens.append(hall_lie.left_normed([a, ring.element({h: 1}), a]))
    ideal = hall_lie.ideal_closure(gens, ring)
    return ideal.contains(hall_lie.left_normed([a, x, y, a]))
