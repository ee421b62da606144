"""Brute-force cubical homology of thickened level sets on the grid torus."""

from linkhom.oracle.cubical import (
    Cube,
    CubicalComplex,
    GridSpec,
    boundary_matrix,
    build_thickened_complex,
    full_torus_complex,
    homology,
    s2_range_on_cube,
)
from linkhom.oracle.run import (
    OracleRun,
    StabilizedOracle,
    boundary_squares_to_zero,
    euler_consistent,
    run_oracle,
    stabilized_oracle,
    suggest_grid,
)
from linkhom.oracle.snf import SnfResult, smith_normal_form

__all__ = [
    "Cube",
    "CubicalComplex",
    "GridSpec",
    "OracleRun",
    "StabilizedOracle",
    "SnfResult",
    "boundary_matrix",
    "boundary_squares_to_zero",
    "build_thickened_complex",
    "euler_consistent",
    "full_torus_complex",
    "homology",
    "run_oracle",
    "s2_range_on_cube",
    "smith_normal_form",
    "stabilized_oracle",
    "suggest_grid",
]
