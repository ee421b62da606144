"""Betti numbers of the arm constrained to the horizontal line y = h.

Two independent counts are provided: :func:`count_ab` thresholds r_J directly
against ``|h|``, while :func:`uv_families` rebuilds the sub- and supralevel
index sets at ``h + delta`` and ``h - delta`` from the configurations u_J and
v_J and recovers the same counts through intersections and unions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from linkhom.arm import (
    CriticalSpectrum,
    Linkage,
    RationalLike,
    format_rational,
    is_regular_height,
    normalize,
    parse_rational,
    spectrum,
    thickening_delta,
)


@dataclass(frozen=True)
class AbCounts:
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.a) - 1

    def ranks(self) -> tuple[int, ...]:
        """rank H_j = a_j + b_{j+1} for j = 0 .. k-1."""
        return tuple(self.a[j] + self.b[j + 1] for j in range(self.k))


@dataclass(frozen=True)
class BettiVector:
    ranks: tuple[int, ...]
    torsion: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if any(r < 0 for r in self.ranks):
            raise ValueError(f"negative Betti number in {self.ranks}")

    def padded(self, length: int) -> "BettiVector":
        """Zero-extend (or trim trailing zeros) to ``length`` degrees."""
        ranks = list(self.ranks[:length]) + [0] * max(0, length - len(self.ranks))
        if any(self.ranks[length:]):
            raise ValueError(f"cannot trim nonzero ranks {self.ranks} to length {length}")
        return BettiVector(tuple(ranks), self.torsion)

    def to_json(self) -> dict:
        return {
            "betti": list(self.ranks),
            "torsion": [{"degree": d, "factors": list(f)} for d, f in self.torsion],
        }


def euler_characteristic(bv: BettiVector) -> int:
    return sum((-1) ** j * r for j, r in enumerate(bv.ranks))


def count_ab(spec: CriticalSpectrum, h: RationalLike) -> AbCounts:
    """a_j counts |J| = j with r_J <= -|h|; b_j counts |J| = j with r_J > |h|."""
    bound = abs(spec.scaled_threshold(parse_rational(h)))
    # r_num is integral, so both comparisons reduce to integer thresholds
    low = math.floor(-bound)
    high = math.floor(bound)
    short = np.asarray(spec.r_num <= low, dtype=bool)
    long = np.asarray(spec.r_num > high, dtype=bool)
    a = np.bincount(spec.index[short], minlength=spec.k + 1)
    b = np.bincount(spec.index[long], minlength=spec.k + 1)
    return AbCounts(tuple(int(x) for x in a), tuple(int(x) for x in b))


@dataclass(frozen=True)
class UvFamilies:
    """Per-degree index sets of the sublevel set below ``h + delta`` (U, from u_J)
    and the superlevel set above ``h - delta`` (V, from v_J)."""

    U: tuple[frozenset[int], ...]
    V: tuple[frozenset[int], ...]
    delta: Fraction = field(default=Fraction(0))

    def counts(self) -> AbCounts:
        k = len(self.U) - 1
        a = tuple(len(self.U[j] & self.V[j]) for j in range(k + 1))
        b = tuple(math.comb(k, j) - len(self.U[j] | self.V[j]) for j in range(k + 1))
        return AbCounts(a, b)


def _height_u(lengths: tuple[Fraction, ...], mask: int) -> Fraction:
    # theta_i = pi/2 on J, -pi/2 off J
    return sum((x if mask >> i & 1 else -x for i, x in enumerate(lengths)), Fraction(0))


def _height_v(lengths: tuple[Fraction, ...], mask: int) -> Fraction:
    # theta_i = -pi/2 on J, pi/2 off J
    return sum((-x if mask >> i & 1 else x for i, x in enumerate(lengths)), Fraction(0))


def uv_families(spec: CriticalSpectrum, h: RationalLike) -> UvFamilies:
    """U_j = {J : s2(u_J) <= h + delta}, V_j = {J : -s2(v_J) <= -(h - delta)}.

    delta is half the gap to the nearest other critical value, so the sets
    agree with the exact-h families on both sides of a critical ``h``.
    """
    h = parse_rational(h)
    delta = thickening_delta(spec, h)
    lengths = spec.link.lengths
    k = spec.k
    U: list[set[int]] = [set() for _ in range(k + 1)]
    V: list[set[int]] = [set() for _ in range(k + 1)]
    for mask in range(1 << k):
        j = mask.bit_count()
        if _height_u(lengths, mask) <= h + delta:
            U[j].add(mask)
        if -_height_v(lengths, mask) <= -(h - delta):
            V[j].add(mask)
    return UvFamilies(tuple(map(frozenset, U)), tuple(map(frozenset, V)), delta)


def betti_line(link: Linkage, h: RationalLike) -> BettiVector:
    """Ranks of H_0 .. H_{k-1} of the arm with its hand on the line y = h.

    ``h`` is in the same units as the edge lengths; it is rescaled together
    with the arm.
    """
    normalized, alpha = normalize(link)
    counts = count_ab(spectrum(normalized), alpha * parse_rational(h))
    return BettiVector(counts.ranks())


def line_report(link: Linkage, h: RationalLike) -> dict:
    h = parse_rational(h)
    normalized, alpha = normalize(link)
    spec = spectrum(normalized)
    h_norm = alpha * h
    counts = count_ab(spec, h_norm)
    bv = BettiVector(counts.ranks())
    return {
        "k": link.k,
        "h": format_rational(h),
        "normalized_lengths": normalized.to_json(),
        "scale": format_rational(alpha),
        "a": list(counts.a),
        "b": list(counts.b),
        "betti": list(bv.ranks),
        "euler": euler_characteristic(bv),
        "regular": is_regular_height(spec, h_norm),
    }
