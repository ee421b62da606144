"""Exact robotic arms, normalization and the spectrum of vertical collinear configurations.

A subset J of the edges is encoded as a bitmask: bit ``i`` (0-based) set means
edge ``i + 1`` points straight up. The vertical configuration u_J then reaches
height ``r_J = sum(l_i, i in J) - sum(l_i, i not in J)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from linkhom.errors import InputError

DEFAULT_MAX_K = 24

RationalLike = Fraction | int | str


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, a decimal string, or an int into an exact Fraction.

    Floats are refused: ``0.1`` is not one tenth.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError("invalid-rational", f"refusing inexact value {value!r}; pass a string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError("invalid-rational", f"cannot parse {value!r} as a rational") from exc
    raise InputError("invalid-rational", f"unsupported rational literal {value!r}")


def format_rational(q: Fraction) -> str:
    """Canonical ``p/q`` form used in every report (``"3/1"`` for integers too)."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Linkage:
    lengths: tuple[Fraction, ...]

    def __post_init__(self):
        lengths = tuple(parse_rational(x) for x in self.lengths)
        if not lengths:
            raise InputError("invalid-lengths", "a robotic arm needs at least one edge")
        if any(x <= 0 for x in lengths):
            raise InputError("invalid-lengths", "edge lengths must be strictly positive")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def parse(cls, values: Sequence[RationalLike] | str) -> "Linkage":
        """Accept a sequence of literals or a comma separated string like ``"1/3,1/3,1/3"``."""
        if isinstance(values, str):
            values = [v for v in values.split(",") if v.strip()]
        return cls(tuple(parse_rational(v) for v in values))

    @property
    def k(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> Fraction:
        return sum(self.lengths, Fraction(0))

    def scaled(self, alpha: Fraction) -> "Linkage":
        return Linkage(tuple(alpha * x for x in self.lengths))

    def to_json(self) -> list[str]:
        return [format_rational(x) for x in self.lengths]


def normalize(link: Linkage) -> tuple[Linkage, Fraction]:
    """Rescale to total length 1 and sort edges longest first.

    Returns the normalized arm and the factor ``alpha`` with
    ``normalized = sorted(alpha * lengths)``. Heights and curve coordinates
    given in the original units must be multiplied by ``alpha`` as well.
    """
    alpha = 1 / link.total
    lengths = sorted((alpha * x for x in link.lengths), reverse=True)
    return Linkage(tuple(lengths)), alpha


@dataclass(frozen=True)
class CollinearConfig:
    mask: int
    r: Fraction
    index: int


@dataclass(frozen=True, eq=False)
class CriticalSpectrum:
    """All 2^k vertical collinear configurations of an arm.

    ``r_num[mask] / denom`` is the exact height r_J; ``index[mask]`` is |J|.
    Arrays are int64 when the numerators fit, Python-int object arrays otherwise.
    """

    link: Linkage
    r_num: np.ndarray
    denom: int
    index: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.link.k

    def __len__(self) -> int:
        return len(self.r_num)

    def r(self, mask: int) -> Fraction:
        return Fraction(int(self.r_num[mask]), self.denom)

    def config(self, mask: int) -> CollinearConfig:
        return CollinearConfig(mask, self.r(mask), int(self.index[mask]))

    @property
    def configs(self) -> list[CollinearConfig]:
        return [self.config(m) for m in range(len(self))]

    @cached_property
    def radii(self) -> list[tuple[Fraction, list[int]]]:
        """Distinct |r_J| in increasing order, each with the masks attaining it."""
        absolute = np.abs(self.r_num)
        values, inverse = np.unique(absolute, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(values) + 1))
        return [
            (Fraction(int(v), self.denom), [int(m) for m in order[bounds[i]:bounds[i + 1]]])
            for i, v in enumerate(values)
        ]

    @cached_property
    def critical_values(self) -> list[Fraction]:
        """Distinct r_J in increasing order."""
        return [Fraction(int(v), self.denom) for v in np.unique(self.r_num)]

    def radius_of(self, mask: int) -> Fraction:
        return abs(self.r(mask))

    def scaled_threshold(self, h: Fraction) -> Fraction:
        """``h`` expressed in units of ``1/denom``, for integer comparisons against ``r_num``."""
        return h * self.denom

    def iter_masks_by_index(self, j: int) -> Iterator[int]:
        return (int(m) for m in np.flatnonzero(self.index == j))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lengths": self.link.to_json(),
            "configs": [
                {"mask": m, "J": subset_of(m, self.k), "r": format_rational(self.r(m)), "index": int(self.index[m])}
                for m in range(len(self))
            ],
            "radii": [
                {"radius": format_rational(rho), "masks": masks} for rho, masks in self.radii
            ],
        }


def subset_of(mask: int, k: int) -> list[int]:
    """1-based edge indices in J."""
    return [i + 1 for i in range(k) if mask >> i & 1]


def popcounts(k: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        counts = np.concatenate([counts, counts + 1])
    return counts


def spectrum(link: Linkage, max_k: int = DEFAULT_MAX_K) -> CriticalSpectrum:
    """Enumerate r_J for every subset J, exactly, ordered by mask value."""
    if link.k > max_k:
        raise InputError(
            "enumeration-too-large",
            f"subset enumeration too large: k={link.k} exceeds the cap of {max_k}",
        )
    denom = math.lcm(*(x.denominator for x in link.lengths))
    weights = [int(x * denom) for x in link.lengths]
    total = sum(weights)
    # 2 * total bounds every |2 S_J - total|; stay well inside int64
    dtype = np.int64 if 2 * total < 2**62 else object
    sums = np.zeros(1, dtype=dtype)
    for w in weights:
        sums = np.concatenate([sums, sums + w])
    r_num = 2 * sums - total
    return CriticalSpectrum(link, r_num, denom, popcounts(link.k))


def end_position(link: Linkage, angles: Sequence[float]) -> tuple[float, float]:
    """Position of the hand for edge angles measured from the positive x-axis."""
    if len(angles) != link.k:
        raise InputError("length-mismatch", f"expected {link.k} angles, got {len(angles)}")
    lengths = np.array([float(x) for x in link.lengths])
    theta = np.asarray(angles, dtype=float)
    return float(lengths @ np.cos(theta)), float(lengths @ np.sin(theta))


def is_regular_height(spec: CriticalSpectrum, h: RationalLike) -> bool:
    """True when no vertical collinear configuration sits at height ``h``."""
    scaled = spec.scaled_threshold(parse_rational(h))
    if scaled.denominator != 1:
        return True
    return not bool(np.any(spec.r_num == int(scaled)))


def thickening_delta(spec: CriticalSpectrum, h: RationalLike) -> Fraction:
    """Half the distance from ``h`` to the nearest critical value different from ``h``.

    Neither ``[h - delta, h)`` nor ``(h, h + delta]`` contains a critical value.
    """
    h = parse_rational(h)
    gaps = [abs(c - h) for c in spec.critical_values if c != h]
    if not gaps:
        raise InputError("no-critical-gap", "no critical value other than h; cannot choose a thickening")
    return min(gaps) / 2
