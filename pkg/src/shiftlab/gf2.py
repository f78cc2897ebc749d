"""GF(2) linear algebra on int bitsets (bit ``i`` is coordinate ``i``)."""

from __future__ import annotations

from typing import Iterable, List


def _low(v: int) -> int:
    return (v & -v).bit_length() - 1


class Basis:
    """Fully reduced echelon basis; each pivot is the lowest set bit of its row.

    Any nonzero vector in the span has as its lowest set bit the smallest
    pivot among the rows it uses, which makes the lexicographically least
    nonzero vector (coordinate 0 most significant) easy to read off.
    """

    def __init__(self, vectors: Iterable[int] = ()):
        self.rows: dict = {}  # pivot -> row
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        # a row touches no pivot bit but its own, so one pass suffices
        for p, row in self.rows.items():
            if (v >> p) & 1:
                v ^= row
        return v

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        p = _low(v)
        for q, row in list(self.rows.items()):
            if (row >> p) & 1:
                self.rows[q] = row ^ v
        self.rows[p] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __len__(self):
        return len(self.rows)

    def vectors(self) -> List[int]:
        return [self.rows[p] for p in sorted(self.rows)]

    def least_nonzero(self) -> int | None:
        if not self.rows:
            return None
        return self.rows[max(self.rows)]


def rank(rows: Iterable[int]) -> int:
    return len(Basis(rows))


def kernel(rows: Iterable[int], n: int) -> List[int]:
    """Basis of ``{x in GF(2)^n : <row, x> = 0 for every row}``."""
    b = Basis(rows)
    pivots = sorted(b.rows)
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = 1 << f
        for p in pivots:
            if (b.rows[p] >> f) & 1:
                v |= 1 << p
        out.append(v)
    return out


def project(vectors: Iterable[int], mask: int) -> Basis:
    return Basis(v & mask for v in vectors)


def vanishing_on(vectors: List[int], mask: int) -> List[int]:
    """Basis of the subspace of ``span(vectors)`` that is zero on ``mask``."""
    work = [(v & mask, v) for v in vectors]
    out = []
    pivots: dict = {}
    for key, full in work:
        while key:
            p = _low(key)
            if p not in pivots:
                break
            pk, pf = pivots[p]
            key ^= pk
            full ^= pf
        if key:
            pivots[_low(key)] = (key, full)
        elif full:
            out.append(full)
    return out


def solvable(rows: Iterable[tuple], n_free: int | None = None) -> bool:
    """Consistency of ``<row, x> = rhs`` for ``(row, rhs)`` pairs."""
    pivots: dict = {}
    for row, rhs in rows:
        while row:
            p = _low(row)
            if p not in pivots:
                break
            prow, prhs = pivots[p]
            row ^= prow
            rhs ^= prhs
        if row:
            pivots[_low(row)] = (row, rhs)
        elif rhs:
            return False
    return True


def bits(v: int, n: int) -> list:
    return [(v >> i) & 1 for i in range(n)]


def from_bits(values: Iterable[int]) -> int:
    out = 0
    for i, x in enumerate(values):
        if x:
            out |= 1 << i
    return out
