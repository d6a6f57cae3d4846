"""Row-echelon spans over GF(2), GF(p) and the integers.

Internal helper module.  Vectors are sparse dicts {coordinate: value} except
over GF(2), where a vector is an int bitmask (bit k = coordinate k).  Rows
are kept with distinct lead coordinates, leads ascending; reduction against
such a row set is a unique normal form for the spanned subgroup, so
membership tests and canonical residues need no back-substitution pass.
"""

from __future__ import annotations


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y, g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


class Gf2Space:
    """Echelonized GF(2) row space; vectors are int bitmasks."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        rows = self.rows
        out = 0
        while v:
            lead_bit = v & -v
            row = rows.get(lead_bit.bit_length() - 1)
            if row is None:
                out |= lead_bit
                v ^= lead_bit
            else:
                v ^= row
        return out

    def add(self, v: int) -> bool:
        """Insert v; return True if the rank grew."""
        rows = self.rows
        while v:
            lead = (v & -v).bit_length() - 1
            row = rows.get(lead)
            if row is None:
                rows[lead] = v
                return True
            v ^= row
        return False

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def to_rref(self) -> None:
        """Back-substitute so no row touches another row's lead coordinate."""
        rows = self.rows
        for lead in sorted(rows, reverse=True):
            v = rows[lead]
            rest = v & ~(1 << lead)
            while rest:
                bit = rest & -rest
                rest ^= bit
                other = rows.get(bit.bit_length() - 1)
                if other is not None:
                    v ^= other
            rows[lead] = v

    @property
    def rank(self) -> int:
        return len(self.rows)


class FieldSpace:
    """Echelonized row space over GF(p), rows monic at their lead."""

    __slots__ = ("p", "rows")

    def __init__(self, p: int):
        self.p = p
        self.rows: dict[int, dict[int, int]] = {}

    def _sub_scaled(self, v: dict[int, int], row: dict[int, int], c: int) -> None:
        p = self.p
        for k, rv in row.items():
            nv = (v.get(k, 0) - c * rv) % p
            if nv:
                v[k] = nv
            else:
                v.pop(k, None)

    def reduce(self, vec: dict[int, int]) -> dict[int, int]:
        p = self.p
        v = {k: c % p for k, c in vec.items() if c % p}
        out: dict[int, int] = {}
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                out[lead] = v.pop(lead)
            else:
                self._sub_scaled(v, row, v[lead])
        return out

    def add(self, vec: dict[int, int]) -> bool:
        p = self.p
        v = {k: c % p for k, c in vec.items() if c % p}
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                inv = pow(v[lead], p - 2, p)
                self.rows[lead] = {k: (c * inv) % p for k, c in v.items()}
                return True
            self._sub_scaled(v, row, v[lead])
        return False

    def contains(self, vec: dict[int, int]) -> bool:
        return not self.reduce(vec)

    def to_rref(self) -> None:
        """Back-substitute so no row touches another row's lead coordinate."""
        rows = self.rows
        for lead in sorted(rows, reverse=True):
            v = dict(rows[lead])
            for k in sorted(k for k in v if k != lead and k in rows):
                c = v.get(k, 0)
                if c:
                    self._sub_scaled(v, rows[k], c)
            rows[lead] = v

    @property
    def rank(self) -> int:
        return len(self.rows)


class IntLattice:
    """Echelonized integer lattice (Hermite-style, positive leads)."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: dict[int, dict[int, int]] = {}

    @staticmethod
    def _combine(row: dict[int, int], vec: dict[int, int], a: int, b: int) -> dict[int, int]:
        out = {}
        for k in row.keys() | vec.keys():
            c = a * row.get(k, 0) + b * vec.get(k, 0)
            if c:
                out[k] = c
        return out

    def add(self, vec: dict[int, int]) -> bool:
        """Insert vec into the lattice; return True if the lattice grew."""
        v = {k: c for k, c in vec.items() if c}
        grew = False
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                if v[lead] < 0:
                    v = {k: -c for k, c in v.items()}
                self.rows[lead] = v
                return True
            a, b = row[lead], v[lead]
            if b % a == 0:
                v = self._combine(v, row, 1, -(b // a))
                continue
            g, x, y = xgcd(a, b)
            new_row = self._combine(row, v, x, y)
            v = self._combine(v, row, a // g, -(b // g))
            self.rows[lead] = new_row
            grew = True
        return grew

    def reduce(self, vec: dict[int, int]) -> dict[int, int]:
        """Canonical residue: at each lattice lead the residue lies in [0, pivot)."""
        v = {k: c for k, c in vec.items() if c}
        out: dict[int, int] = {}
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                out[lead] = v.pop(lead)
            else:
                q = v[lead] // row[lead]
                if q:
                    v = self._combine(v, row, 1, -q)
                if lead in v:
                    out[lead] = v.pop(lead)
        return out

    def contains(self, vec: dict[int, int]) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> dict[int, int]:
        return {lead: row[lead] for lead, row in self.rows.items()}


def smith_divisors(rows: list[list[int]]) -> list[int]:
    """Elementary divisors (ascending, each dividing the next) of the lattice
    spanned by the given dense rows inside Z^n.  Small-matrix textbook
    algorithm: position a gcd pivot, clear its row and column, recurse."""
    m = [r[:] for r in rows if any(r)]
    divisors: list[int] = []
    while m:
        n = len(m[0])
        # pivot = entry of least absolute value
        pi, pj, best = 0, 0, 0
        for i, row in enumerate(m):
            for j, c in enumerate(row):
                if c and (best == 0 or abs(c) < best):
                    pi, pj, best = i, j, abs(c)
        if best == 0:
            break
        while True:
            m[0], m[pi] = m[pi], m[0]
            for row in m:
                row[0], row[pj] = row[pj], row[0]
            p = m[0][0]
            dirty = False
            for i in range(1, len(m)):
                q = m[i][0] // p
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[0])]
                if m[i][0]:
                    dirty = True
            for j in range(1, n):
                q = m[0][j] // p
                if q:
                    for row in m:
                        row[j] -= q * row[0]
                if m[0][j]:
                    dirty = True
            if not dirty:
                break
            pi, pj, best = 0, 0, 0
            for i, row in enumerate(m):
                for j, c in enumerate(row):
                    if c and (best == 0 or abs(c) < best):
                        pi, pj, best = i, j, abs(c)
        divisors.append(abs(m[0][0]))
        m = [row[1:] for row in m[1:] if any(row[1:])]
    # enforce the divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(len(divisors) - 1):
            a, b = divisors[i], divisors[i + 1]
            if b % a:
                g, _, _ = xgcd(a, b)
                divisors[i], divisors[i + 1] = g, a * b // g
                changed = True
    return divisors
