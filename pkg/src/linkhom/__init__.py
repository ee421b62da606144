"""Homology of planar robotic arms whose hand is constrained to a line or a curve."""

from linkhom.arm import (
    CollinearConfig,
    CriticalSpectrum,
    Linkage,
    end_position,
    is_regular_height,
    normalize,
    parse_rational,
    spectrum,
)
from linkhom.errors import (
    HypothesisViolation,
    InputError,
    LinkhomError,
    ResourceRefusal,
)
from linkhom.line import AbCounts, BettiVector, UvFamilies, betti_line, count_ab, euler_characteristic, uv_families
from linkhom.curve import (
    Crossing,
    MultiplierTable,
    PlanarCurve,
    Tolerances,
    betti_curve,
    circle_crossings,
    horizontal_chord,
    line_curve_consistency,
    multipliers,
    validate_curve,
)

__version__ = "0.1.0"

__all__ = [
    "AbCounts",
    "BettiVector",
    "CollinearConfig",
    "CriticalSpectrum",
    "Crossing",
    "HypothesisViolation",
    "InputError",
    "Linkage",
    "LinkhomError",
    "MultiplierTable",
    "PlanarCurve",
    "ResourceRefusal",
    "Tolerances",
    "UvFamilies",
    "betti_curve",
    "betti_line",
    "circle_crossings",
    "count_ab",
    "end_position",
    "euler_characteristic",
    "horizontal_chord",
    "is_regular_height",
    "line_curve_consistency",
    "multipliers",
    "normalize",
    "parse_rational",
    "spectrum",
    "uv_families",
    "validate_curve",
]
