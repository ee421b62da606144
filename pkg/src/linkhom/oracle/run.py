"""Oracle runs: build, check, compute homology, and test stability under refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from linkhom.arm import Linkage, RationalLike, format_rational, normalize, parse_rational, spectrum, thickening_delta
from linkhom.line import BettiVector
from linkhom.oracle.cubical import CubicalComplex, boundary_matrix, build_thickened_complex, homology

MAX_SUGGESTED_N = 256


def suggest_grid(link: Linkage, h: RationalLike, per_feature: int = 3) -> int:
    """Grid size resolving the smallest feature of the level set.

    Near a critical value at distance ``g`` the level set has angular size
    about ``sqrt(2 g / l_max)``; ask for ``per_feature`` cells across it.
    """
    normalized, alpha = normalize(link)
    h_norm = alpha * parse_rational(h)
    if abs(h_norm) > 1:
        return 8
    gap = 2 * thickening_delta(spectrum(normalized), h_norm)
    scale = math.sqrt(2 * float(gap) / float(normalized.lengths[0]))
    n = 8 * math.ceil(per_feature * 2 * math.pi / scale / 8)
    return min(max(16, n), MAX_SUGGESTED_N)


def boundary_squares_to_zero(complex: CubicalComplex) -> bool:
    for d in range(2, complex.k + 1):
        if complex.cells_per_dim[d] == 0 or complex.cells_per_dim[d - 2] == 0:
            continue
        product = boundary_matrix(complex, d - 1) @ boundary_matrix(complex, d)
        if product.count_nonzero():
            return False
    return True


def euler_consistent(complex: CubicalComplex, betti: BettiVector) -> bool:
    """Alternating cell count equals alternating rank sum (torsion contributes nothing)."""
    cells = sum((-1) ** d * c for d, c in enumerate(complex.cells_per_dim))
    ranks = sum((-1) ** d * r for d, r in enumerate(betti.ranks))
    return cells == ranks


@dataclass(frozen=True)
class OracleRun:
    n: int
    delta: Fraction
    cells_per_dim: tuple[int, ...]
    betti: BettiVector
    boundary_ok: bool
    euler_ok: bool
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)


def run_oracle(
    link: Linkage,
    h: RationalLike,
    n: int,
    delta: RationalLike | None = None,
    keep_samples: bool = False,
) -> OracleRun:
    complex, grid = build_thickened_complex(link, h, n, delta)
    betti = homology(complex)
    samples = None
    if keep_samples:
        samples = np.pi * complex.cells[complex.k].astype(float) / complex.n
    return OracleRun(
        n,
        grid.delta,
        tuple(complex.cells_per_dim),
        betti,
        boundary_squares_to_zero(complex),
        euler_consistent(complex, betti),
        samples,
    )


@dataclass(frozen=True)
class StabilizedOracle:
    coarse: OracleRun
    fine: OracleRun

    @property
    def stable(self) -> bool:
        return self.coarse.betti == self.fine.betti

    @property
    def betti(self) -> BettiVector:
        return self.fine.betti

    @property
    def checks_ok(self) -> bool:
        return all(r.boundary_ok and r.euler_ok for r in (self.coarse, self.fine))

    def to_json(self) -> dict:
        fine = self.fine
        return {
            "n": fine.n,
            "delta": format_rational(fine.delta),
            "cells_per_dim": list(fine.cells_per_dim),
            "betti": list(fine.betti.ranks),
            "torsion": [{"degree": d, "factors": list(f)} for d, f in fine.betti.torsion],
            "stable": self.stable,
            "coarse": {"n": self.coarse.n, "betti": list(self.coarse.betti.ranks)},
            "checks": {"boundary_squared_zero": all(r.boundary_ok for r in (self.coarse, self.fine)),
                       "euler_consistent": all(r.euler_ok for r in (self.coarse, self.fine))},
        }


def stabilized_oracle(
    link: Linkage,
    h: RationalLike,
    n: int | None = None,
    delta: RationalLike | None = None,
    keep_samples: bool = False,
) -> StabilizedOracle:
    """Homology of the thickened level set at ``n`` and ``2n``; ``n`` defaults to :func:`suggest_grid`."""
    if n is None:
        n = suggest_grid(link, h)
    return StabilizedOracle(
        run_oracle(link, h, n, delta),
        run_oracle(link, h, 2 * n, delta, keep_samples),
    )


__all__ = [
    "OracleRun",
    "StabilizedOracle",
    "boundary_squares_to_zero",
    "euler_consistent",
    "run_oracle",
    "stabilized_oracle",
    "suggest_grid",
]
