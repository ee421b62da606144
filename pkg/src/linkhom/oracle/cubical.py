"""Cubical complexes on the grid k-torus and their integral homology.

A cell is stored by its half-index coordinates ``c`` in ``(Z / 2n)^k``: an even
``c_i`` pins angle ``i`` to the grid vertex ``pi * c_i / n``, an odd ``c_i``
spans the arc between the neighbouring vertices. So ``base_i = c_i // 2`` and
bit ``i`` of the extent mask is ``c_i % 2``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numba
import numpy as np
import scipy.sparse as sp

from linkhom.arm import Linkage, RationalLike, normalize, parse_rational, spectrum, thickening_delta
from linkhom.errors import InputError, ResourceRefusal
from linkhom.line import BettiVector
from linkhom.oracle.snf import SparseIntMatrix, smith_normal_form

DEFAULT_CELL_BUDGET = 50_000_000
# floating s2 bounds are widened by this much before comparing with the band
RANGE_SLACK = 1e-12


def cell_budget() -> int:
    raw = os.environ.get("LINKHOM_CELL_BUDGET")
    if raw is None:
        return DEFAULT_CELL_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError("invalid-cell-budget", f"LINKHOM_CELL_BUDGET={raw!r} is not an integer") from exc
    if value <= 0:
        raise InputError("invalid-cell-budget", "LINKHOM_CELL_BUDGET must be positive")
    return value


@dataclass(frozen=True)
class GridSpec:
    k: int
    n: int
    h: Fraction
    delta: Fraction

    def __post_init__(self):
        if self.k < 1:
            raise InputError("invalid-grid", "k must be at least 1")
        if self.n < 8:
            raise InputError("invalid-grid", f"grid needs n >= 8 subdivisions per circle, got {self.n}")
        if self.delta <= 0:
            raise InputError("invalid-grid", "delta must be positive")


@dataclass(frozen=True)
class Cube:
    base: tuple[int, ...]
    extent: int

    @property
    def dim(self) -> int:
        return self.extent.bit_count()

    def coords(self) -> tuple[int, ...]:
        return tuple(2 * b + (self.extent >> i & 1) for i, b in enumerate(self.base))

    @classmethod
    def from_coords(cls, coords: Sequence[int]) -> "Cube":
        extent = sum(1 << i for i, c in enumerate(coords) if c % 2)
        return cls(tuple(int(c) // 2 for c in coords), extent)

    def faces(self, n: int) -> list[tuple[int, "Cube"]]:
        """Signed codimension-one faces, wrapping around the torus."""
        out = []
        c = list(self.coords())
        m = 0
        for i in range(len(c)):
            if c[i] % 2 == 0:
                continue
            sign = -1 if m % 2 else 1
            for step, s in ((-1, -sign), (1, sign)):
                face = c.copy()
                face[i] = (c[i] + step) % (2 * n)
                out.append((s, Cube.from_coords(face)))
            m += 1
        return out


def _sort_cells(coords: np.ndarray) -> np.ndarray:
    """Lexicographic by base, then by extent mask."""
    k = coords.shape[1]
    base = coords // 2
    extent = ((coords % 2) << np.arange(k)).sum(axis=1)
    order = np.lexsort([extent] + [base[:, i] for i in reversed(range(k))])
    return coords[order]


class CubicalComplex:
    """Face-closed set of cells on the torus grid with ``n`` subdivisions per circle."""

    def __init__(self, k: int, n: int, coords: np.ndarray):
        self.k = k
        self.n = n
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, k)
        dims = (coords % 2).sum(axis=1)
        self.cells: list[np.ndarray] = [_sort_cells(coords[dims == d]) for d in range(k + 1)]
        self._keys = [self.encode(c) for c in self.cells]
        self._orders: dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        nonempty = [d for d, c in enumerate(self.cells) if len(c)]
        return nonempty[-1] if nonempty else -1

    @property
    def cells_per_dim(self) -> list[int]:
        return [len(c) for c in self.cells]

    def __len__(self) -> int:
        return sum(self.cells_per_dim)

    def is_empty(self) -> bool:
        return len(self) == 0

    def encode(self, coords: np.ndarray) -> np.ndarray:
        return _encode(coords, 2 * self.n)

    def lookup(self, d: int, coords: np.ndarray) -> np.ndarray:
        """Index of each row of ``coords`` among the d-cells, -1 if absent."""
        keys = self.encode(coords)
        table = self._keys[d]
        order = self._orders.get(d)
        if order is None:
            order = self._orders[d] = np.argsort(table, kind="stable")
        pos = np.searchsorted(table, keys, sorter=order)
        pos = np.minimum(pos, max(len(table) - 1, 0))
        if len(table) == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        idx = order[pos]
        return np.where(table[idx] == keys, idx, -1)

    def cubes(self, d: int) -> list[Cube]:
        return [Cube.from_coords(row) for row in self.cells[d].tolist()]

    def faces(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        """``(index, sign)`` arrays of shape (m_d, 2d) for the faces of every d-cell.

        Faces are listed per non-degenerate direction as (lower, upper).
        """
        cells = self.cells[d]
        m = len(cells)
        index = np.empty((m, 2 * d), dtype=np.int64)
        sign = np.empty((m, 2 * d), dtype=np.int64)
        if m == 0 or d == 0:
            return index, sign
        odd = cells % 2 == 1
        # rank of each odd coordinate among the odd coordinates of its cell
        order = np.cumsum(odd, axis=1) - 1
        axis_of = np.argsort(~odd, axis=1, kind="stable")[:, :d]
        rows = np.arange(m)
        for slot in range(d):
            axis = axis_of[:, slot]
            parity = np.where(order[rows, axis] % 2 == 0, 1, -1)
            for side, step in enumerate((-1, 1)):
                face = cells.copy()
                face[rows, axis] = (face[rows, axis] + step) % (2 * self.n)
                index[:, 2 * slot + side] = self.lookup(d - 1, face)
                sign[:, 2 * slot + side] = parity * step
        if np.any(index < 0):
            raise ValueError("complex is not closed under faces")
        return index, sign

    def cofaces(self, d: int) -> np.ndarray:
        """Indices of the (d+1)-cells containing each d-cell, padded with -1."""
        cells = self.cells[d]
        out = np.full((len(cells), 2 * (self.k - d)), -1, dtype=np.int64)
        if d >= self.k or len(cells) == 0:
            return out
        even = cells % 2 == 0
        axis_of = np.argsort(~even, axis=1, kind="stable")[:, : self.k - d]
        rows = np.arange(len(cells))
        for slot in range(self.k - d):
            axis = axis_of[:, slot]
            for side, step in enumerate((-1, 1)):
                co = cells.copy()
                co[rows, axis] = (co[rows, axis] + step) % (2 * self.n)
                out[:, 2 * slot + side] = self.lookup(d + 1, co)
        return out


def boundary_matrix(complex: CubicalComplex, d: int) -> sp.csc_matrix:
    """Integer matrix of the d-th boundary map: rows are (d-1)-cells, columns d-cells."""
    if not 1 <= d <= complex.k:
        raise InputError("invalid-degree", f"boundary degree must lie in 1..{complex.k}")
    index, sign = complex.faces(d)
    m = len(complex.cells[d])
    cols = np.repeat(np.arange(m), 2 * d)
    return sp.csc_matrix(
        (sign.ravel(), (index.ravel(), cols)),
        shape=(len(complex.cells[d - 1]), m),
        dtype=np.int64,
    )


# ---------------------------------------------------------------- complexes


def _encode(coords: np.ndarray, radix: int) -> np.ndarray:
    key = np.zeros(len(coords), dtype=np.int64)
    for i in range(coords.shape[1]):
        key = key * radix + coords[:, i]
    return key


def _decode(keys: np.ndarray, k: int, radix: int) -> np.ndarray:
    coords = np.empty((len(keys), k), dtype=np.int64)
    for i in reversed(range(k)):
        keys, coords[:, i] = np.divmod(keys, radix)
    return coords


def full_torus_complex(k: int, n: int) -> CubicalComplex:
    axes = [np.arange(2 * n)] * k
    coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    return CubicalComplex(k, n, coords)


def _vertex_sines(n: int) -> np.ndarray:
    b = np.arange(n)
    values = np.sin(2 * np.pi * b / n)
    # exact at multiples of pi/2
    quarter = (4 * b) % n == 0
    values[quarter] = np.array([0.0, 1.0, 0.0, -1.0])[(4 * b[quarter]) // n]
    return values


def _sine_bounds(n: int) -> tuple[np.ndarray, np.ndarray]:
    """min and max of sin over each half-index cell of one circle factor."""
    vertex = _vertex_sines(n)
    b = np.arange(n)
    a, e = vertex, np.roll(vertex, -1)
    # pi/2 and 3pi/2 inside the closed arc [b, b + 1] (in units of 2pi/n)
    top = (4 * b <= n) & (n <= 4 * (b + 1))
    bottom = (4 * b <= 3 * n) & (3 * n <= 4 * (b + 1))
    lo = np.empty(2 * n)
    hi = np.empty(2 * n)
    lo[0::2] = hi[0::2] = vertex
    lo[1::2] = np.where(bottom, -1.0, np.minimum(a, e))
    hi[1::2] = np.where(top, 1.0, np.maximum(a, e))
    return lo, hi


def s2_range_on_cube(link: Linkage, cube: Cube, grid: GridSpec) -> tuple[float, float]:
    """Exact (up to rounding of sin) min and max of sum l_i sin(theta_i) over the cube."""
    lo_tab, hi_tab = _sine_bounds(grid.n)
    lengths = [float(x) for x in link.lengths]
    c = cube.coords()
    return (
        sum(x * lo_tab[ci] for x, ci in zip(lengths, c)),
        sum(x * hi_tab[ci] for x, ci in zip(lengths, c)),
    )


def _top_cube_ranges(lengths: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    lo_tab, hi_tab = _sine_bounds(n)
    lo_arc, hi_arc = lo_tab[1::2], hi_tab[1::2]
    lo = np.zeros(())
    hi = np.zeros(())
    for x in lengths:
        lo = np.add.outer(lo, x * lo_arc)
        hi = np.add.outer(hi, x * hi_arc)
    return lo, hi


def build_thickened_complex(
    link: Linkage,
    h: RationalLike,
    n: int,
    delta: RationalLike | None = None,
    budget: int | None = None,
) -> tuple[CubicalComplex, GridSpec]:
    """Cells covering the band ``h - delta <= s2 <= h + delta`` on the grid torus.

    ``link`` and ``h`` are normalized together first. ``delta`` defaults to half
    the gap to the nearest other critical value.
    """
    normalized, alpha = normalize(link)
    h_norm = alpha * parse_rational(h)
    spec = spectrum(normalized)
    if delta is None:
        delta = thickening_delta(spec, h_norm)
    else:
        delta = alpha * parse_rational(delta)
    grid = GridSpec(link.k, n, h_norm, delta)
    budget = cell_budget() if budget is None else budget
    k = link.k
    if n**k > budget:
        raise ResourceRefusal("cell-budget-exceeded", f"{n}^{k} top cubes exceed the cell budget {budget}")
    lo, hi = _top_cube_ranges([float(x) for x in normalized.lengths], n)
    band_lo = float(h_norm - delta) - RANGE_SLACK
    band_hi = float(h_norm + delta) + RANGE_SLACK
    selected = np.argwhere((hi >= band_lo) & (lo <= band_hi))
    if len(selected) * 2**k > budget:
        raise ResourceRefusal(
            "cell-budget-exceeded",
            f"about {len(selected) * 2**k} cells exceed the cell budget {budget}",
        )
    if len(selected) == 0:
        if abs(h_norm) <= 1:
            raise ResourceRefusal("resolution-too-coarse", "resolution too coarse: empty complex for a reachable h")
        return CubicalComplex(k, n, np.zeros((0, k), dtype=np.int64)), grid
    top = 2 * selected + 1
    radix = 2 * n
    keys = np.unique(
        np.concatenate([_encode((top + np.array(offset)) % radix, radix) for offset in itertools.product((-1, 0, 1), repeat=k)])
    )
    return CubicalComplex(k, n, _decode(keys, k, radix)), grid


def top_cube_centers(complex: CubicalComplex) -> np.ndarray:
    """Angles of the centres of the top-dimensional cells, for plotting."""
    return np.pi * complex.cells[complex.k].astype(float) / complex.n


# ---------------------------------------------------------------- homology


@numba.njit(cache=True)
def _pair_reduce(faces, cofaces, start):  # pragma: no cover - compiled
    """Coreductions and elementary collapses over global cell indices.

    ``faces`` / ``cofaces`` are padded (-1) incidence tables. Removes ``start``
    (a vertex) and then any pair (x, y) where y is the only surviving face of x
    or x is the only surviving coface of y. Returns the survival mask.
    """
    total = faces.shape[0]
    alive = np.ones(total, dtype=np.bool_)
    nface = np.zeros(total, dtype=np.int64)
    ncoface = np.zeros(total, dtype=np.int64)
    for x in range(total):
        for f in faces[x]:
            if f >= 0:
                nface[x] += 1
        for g in cofaces[x]:
            if g >= 0:
                ncoface[x] += 1
    queued = np.zeros(total, dtype=np.bool_)
    stack = np.empty(total, dtype=np.int64)
    top = 0

    alive[start] = False
    for g in cofaces[start]:
        if g >= 0:
            nface[g] -= 1
    for x in range(total - 1, -1, -1):
        if alive[x]:
            stack[top] = x
            top += 1
            queued[x] = True

    while top > 0:
        top -= 1
        x = stack[top]
        queued[x] = False
        if not alive[x]:
            continue
        partner = -1
        if nface[x] == 1:
            for f in faces[x]:
                if f >= 0 and alive[f]:
                    partner = f
                    break
        elif ncoface[x] == 1:
            for g in cofaces[x]:
                if g >= 0 and alive[g]:
                    partner = g
                    break
        if partner < 0:
            continue
        for y in (x, partner):
            alive[y] = False
        for y in (x, partner):
            for f in faces[y]:
                if f >= 0:
                    ncoface[f] -= 1
                    if alive[f] and not queued[f]:
                        stack[top] = f
                        top += 1
                        queued[f] = True
            for g in cofaces[y]:
                if g >= 0:
                    nface[g] -= 1
                    if alive[g] and not queued[g]:
                        stack[top] = g
                        top += 1
                        queued[g] = True
    return alive


def _global_incidence(complex: CubicalComplex):
    offsets = np.concatenate([[0], np.cumsum(complex.cells_per_dim)])
    width = 2 * complex.k
    total = int(offsets[-1])
    faces = np.full((total, width), -1, dtype=np.int64)
    signs = np.zeros((total, width), dtype=np.int64)
    cofaces = np.full((total, width), -1, dtype=np.int64)
    for d in range(complex.k + 1):
        lo, hi = offsets[d], offsets[d + 1]
        if hi == lo:
            continue
        if d > 0:
            idx, sgn = complex.faces(d)
            faces[lo:hi, : 2 * d] = idx + offsets[d - 1]
            signs[lo:hi, : 2 * d] = sgn
        if d < complex.k:
            co = complex.cofaces(d)
            cofaces[lo:hi, : co.shape[1]] = np.where(co >= 0, co + offsets[d + 1], -1)
    return offsets, faces, signs, cofaces


def _betti_from_boundaries(counts: Sequence[int], boundaries: dict[int, object]) -> BettiVector:
    k = len(counts) - 1
    snf = {d: smith_normal_form(m) for d, m in boundaries.items()}
    ranks = []
    torsion = []
    for d in range(k + 1):
        rank_d = snf[d].rank if d in snf else 0
        rank_up = snf[d + 1].rank if d + 1 in snf else 0
        ranks.append(counts[d] - rank_d - rank_up)
        if d + 1 in snf and snf[d + 1].torsion:
            torsion.append((d, snf[d + 1].torsion))
    return BettiVector(tuple(ranks), tuple(torsion))


def homology(complex: CubicalComplex, method: str = "reduce") -> BettiVector:
    """Integral homology of the complex, degrees 0..k.

    ``method="reduce"`` first removes coreduction and collapse pairs (both are
    exact over the integers) and runs Smith normal form on what survives;
    ``method="snf"`` runs Smith normal form on the full boundary matrices.
    """
    counts = complex.cells_per_dim
    k = complex.k
    if complex.is_empty():
        return BettiVector((0,) * (k + 1))
    if method == "snf":
        boundaries = {d: boundary_matrix(complex, d) for d in range(1, k + 1) if counts[d] and counts[d - 1]}
        return _betti_from_boundaries(counts, boundaries)
    if method != "reduce":
        raise InputError("invalid-method", f"unknown homology method {method!r}")

    offsets, faces, signs, cofaces = _global_incidence(complex)
    alive = _pair_reduce(faces, cofaces, 0)
    # removing one vertex leaves the homology relative to a point
    survivors = [np.flatnonzero(alive[offsets[d]:offsets[d + 1]]) for d in range(k + 1)]
    residual = [len(s) for s in survivors]
    boundaries = {}
    for d in range(1, k + 1):
        if not residual[d] or not residual[d - 1]:
            continue
        local = {int(g): i for i, g in enumerate(survivors[d - 1])}
        entries = []
        for j, cell in enumerate(survivors[d]):
            gid = offsets[d] + cell
            for f, s in zip(faces[gid], signs[gid]):
                if f >= 0 and alive[f]:
                    entries.append((local[int(f - offsets[d - 1])], j, int(s)))
        boundaries[d] = SparseIntMatrix.from_entries((residual[d - 1], residual[d]), entries)
    relative = _betti_from_boundaries(residual, boundaries)
    ranks = list(relative.ranks)
    ranks[0] += 1
    return BettiVector(tuple(ranks), relative.torsion)
