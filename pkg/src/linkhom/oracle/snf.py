"""Smith normal form of sparse integer matrices with arbitrary-precision entries.

Unit pivots are eliminated first (Gaussian elimination choosing, within each
column, the unit entry whose row is shortest); whatever survives has no unit
entries and goes through the classical Euclidean reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SnfResult:
    rank: int
    invariant_factors: tuple[int, ...]

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(f for f in self.invariant_factors if f > 1)


class SparseIntMatrix:
    """Row-major dict-of-dicts with a column index, entries are Python ints."""

    def __init__(self, shape: tuple[int, int]):
        self.shape = shape
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}

    @classmethod
    def from_any(cls, m) -> "SparseIntMatrix":
        if isinstance(m, SparseIntMatrix):
            out = cls(m.shape)
            for r, row in m.rows.items():
                for c, v in row.items():
                    out.set(r, c, v)
            return out
        if sp.issparse(m):
            coo = sp.coo_matrix(m)
            out = cls(coo.shape)
            for r, c, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                out.set(r, c, out.get(r, c) + int(v))
            return out
        arr = np.asarray(m, dtype=object)
        if arr.ndim != 2:
            arr = arr.reshape(arr.shape[0] if arr.ndim else 0, -1)
        out = cls(arr.shape)
        for (r, c), v in np.ndenumerate(arr):
            if v:
                out.set(r, c, int(v))
        return out

    @classmethod
    def from_entries(cls, shape: tuple[int, int], entries: Iterable[tuple[int, int, int]]) -> "SparseIntMatrix":
        out = cls(shape)
        for r, c, v in entries:
            out.set(r, c, out.get(r, c) + int(v))
        return out

    def get(self, r: int, c: int) -> int:
        return self.rows.get(r, {}).get(c, 0)

    def set(self, r: int, c: int, v: int) -> None:
        if v:
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, set()).add(r)
        else:
            row = self.rows.get(r)
            if row is not None and c in row:
                del row[c]
                if not row:
                    del self.rows[r]
                self.cols[c].discard(r)
                if not self.cols[c]:
                    del self.cols[c]

    def drop_row(self, r: int) -> None:
        for c in self.rows.pop(r, {}):
            self.cols[c].discard(r)
            if not self.cols[c]:
                del self.cols[c]

    def drop_col(self, c: int) -> None:
        for r in self.cols.pop(c, set()):
            row = self.rows[r]
            del row[c]
            if not row:
                del self.rows[r]

    def add_row_multiple(self, target: int, source: Mapping[int, int], factor: int) -> None:
        """row[target] += factor * source"""
        for c, v in source.items():
            self.set(target, c, self.get(target, c) + factor * v)

    def add_col_multiple(self, target: int, source: int, factor: int) -> None:
        """col[target] += factor * col[source]"""
        for r in list(self.cols.get(source, ())):
            self.set(r, target, self.get(r, target) + factor * self.rows[r][source])

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows.values())


def _eliminate_units(m: SparseIntMatrix) -> int:
    """Remove unit pivots until none is left; returns how many were removed."""
    removed = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(m.cols, key=lambda c: (len(m.cols[c]), c)):
            rows = m.cols.get(c)
            if not rows:
                continue
            units = [r for r in rows if abs(m.rows[r][c]) == 1]
            if not units:
                continue
            r = min(units, key=lambda r: (len(m.rows[r]), r))
            u = m.rows[r][c]
            pivot_row = dict(m.rows[r])
            for r2 in [x for x in rows if x != r]:
                m.add_row_multiple(r2, pivot_row, -m.rows[r2][c] * u)
            # column c now holds only the pivot, so clearing the pivot row by
            # column operations touches nothing else
            m.drop_row(r)
            removed += 1
            progress = True
    return removed


def _euclidean_reduce(m: SparseIntMatrix) -> list[int]:
    diagonal: list[int] = []
    while m.rows:
        r, c = min(
            ((r, c) for r, row in m.rows.items() for c in row),
            key=lambda rc: (abs(m.rows[rc[0]][rc[1]]), rc),
        )
        while True:
            p = m.rows[r][c]
            for r2 in [x for x in m.cols[c] if x != r]:
                q = m.rows[r2][c] // p
                m.add_row_multiple(r2, dict(m.rows[r]), -q)
            for c2 in [x for x in m.rows[r] if x != c]:
                q = m.rows[r][c2] // p
                m.add_col_multiple(c2, c, -q)
            leftovers = [(r2, c) for r2 in m.cols[c] if r2 != r] + [(r, c2) for c2 in m.rows[r] if c2 != c]
            if not leftovers:
                break
            # a remainder smaller than the pivot survived; move the pivot there
            r, c = min(leftovers, key=lambda rc: (abs(m.rows[rc[0]][rc[1]]), rc))
        p = abs(m.rows[r][c])
        m.drop_row(r)
        m.drop_col(c)
        diagonal.append(p)
    return diagonal


def invariant_chain(diagonal: Iterable[int]) -> tuple[int, ...]:
    """Turn arbitrary nonzero diagonal entries into a divisibility chain."""
    ones = 0
    rest = []
    for d in diagonal:
        d = abs(int(d))
        if d == 1:
            ones += 1
        elif d:
            rest.append(d)
    rest.sort()
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            g = math.gcd(rest[i], rest[j])
            rest[i], rest[j] = g, rest[i] // g * rest[j]
    extra_ones = sum(1 for d in rest if d == 1)
    return (1,) * (ones + extra_ones) + tuple(d for d in rest if d != 1)


def smith_normal_form(m) -> SnfResult:
    """Rank and invariant factors of an integer matrix (dense, scipy.sparse, or SparseIntMatrix)."""
    work = SparseIntMatrix.from_any(m)
    units = _eliminate_units(work)
    diagonal = [1] * units + _euclidean_reduce(work)
    factors = invariant_chain(diagonal)
    return SnfResult(len(factors), factors)
