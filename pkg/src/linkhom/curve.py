"""Betti numbers of the arm constrained to a planar curve.

The curve is a polyline in the plane. After the arm is normalized to total
length 1, its endpoints must lie on the unit circle and it must cross every
circle of critical radius |r_J| transversally. The multiplier of J is half the
number of times the curve meets the circle of radius |r_J|.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np

from linkhom.arm import (
    CriticalSpectrum,
    Linkage,
    RationalLike,
    format_rational,
    normalize,
    parse_rational,
    spectrum,
)
from linkhom.errors import HypothesisViolation, InputError
from linkhom.line import BettiVector, betti_line, euler_characteristic


@dataclass(frozen=True)
class Tolerances:
    end: float = 1e-6  # endpoint distance from the unit circle
    geo: float = 1e-9  # vertex coincidence and origin clearance
    tan: float = 1e-7  # normalized discriminant below which a crossing is tangential

    def __post_init__(self):
        if min(self.end, self.geo, self.tan) <= 0:
            raise InputError("invalid-tolerance", "tolerances must be positive")


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    points: np.ndarray
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InputError("invalid-curve", "curve points must be (x, y) pairs")
        if len(pts) < 2:
            raise InputError("invalid-curve", "a curve needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise InputError("invalid-curve", "curve coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_json(cls, payload: dict | str | Path) -> "PlanarCurve":
        if isinstance(payload, Path):
            payload = json.loads(payload.read_text(encoding="utf-8"))
        elif isinstance(payload, str):
            payload = json.loads(payload)
        if not isinstance(payload, dict) or "points" not in payload:
            raise InputError("invalid-curve", 'curve file must be a JSON object with a "points" array')
        return cls(payload["points"])

    def to_json(self) -> dict:
        return {"points": [[float(f"{x:.17g}"), float(f"{y:.17g}")] for x, y in self.points]}

    def scaled(self, alpha: float) -> "PlanarCurve":
        return PlanarCurve(self.points * alpha, self.flags)

    def reversed(self) -> "PlanarCurve":
        return PlanarCurve(self.points[::-1], self.flags)

    def refined(self, segment: int, s: float = 0.5) -> "PlanarCurve":
        """Insert the point at parameter ``s`` of ``segment``."""
        p, q = self.points[segment], self.points[segment + 1]
        pts = np.insert(self.points, segment + 1, p + s * (q - p), axis=0)
        return PlanarCurve(pts, self.flags)

    @property
    def segments(self) -> int:
        return len(self.points) - 1


def horizontal_chord(h: float, samples: int = 2) -> PlanarCurve:
    """The line y = h clipped to the unit disk, traversed left to right."""
    if not -1 < h < 1:
        raise InputError("invalid-height", f"chord needs |h| < 1, got {h}")
    x = math.sqrt(1 - h * h)
    xs = np.linspace(-x, x, samples)
    return PlanarCurve(np.column_stack([xs, np.full(samples, h)]))


def _segment_distance_to_origin(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = q - p
    t = np.clip(-np.einsum("ij,ij->i", p, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
    return np.hypot(*(p + t[:, None] * d).T)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _first_self_intersection(points: np.ndarray) -> tuple[int, int] | None:
    p, q = points[:-1], points[1:]
    d = q - p
    m = len(p)
    for i in range(m - 1):
        # adjacent segments share a vertex; they overlap only by folding back
        if abs(_cross(d[i], d[i + 1])) <= 1e-15 * float(d[i] @ d[i]) and d[i] @ d[i + 1] < 0:
            return i, i + 1
        if i + 2 >= m:
            continue
        a, b = p[i], q[i]
        c, e = p[i + 2:], q[i + 2:]
        o1, o2 = _cross(b - a, c - a), _cross(b - a, e - a)
        o3, o4 = _cross(e - c, a - c), _cross(e - c, b - c)
        boxes = (
            (np.minimum(c, e) <= np.maximum(a, b)).all(axis=1)
            & (np.maximum(c, e) >= np.minimum(a, b)).all(axis=1)
        )
        hit = (o1 * o2 <= 0) & (o3 * o4 <= 0) & boxes
        if np.any(hit):
            return i, i + 2 + int(np.flatnonzero(hit)[0])
    return None


def validate_curve(curve: PlanarCurve, spec: CriticalSpectrum, tol: Tolerances = Tolerances()) -> PlanarCurve:
    """Check the curve hypotheses in normalized coordinates.

    Returns a copy whose endpoints are projected exactly onto the unit circle;
    interior vertices within ``tol.end`` of the circle are flagged.
    """
    pts = np.array(curve.points)
    seg = np.diff(pts, axis=0)
    if np.any(np.hypot(*seg.T) <= tol.geo):
        raise InputError("degenerate-segment", "consecutive curve points coincide")
    flags = []
    for which, idx in (("start", 0), ("end", -1)):
        radius = math.hypot(*pts[idx])
        if abs(radius - 1.0) > tol.end:
            raise HypothesisViolation(
                "endpoint-off-circle",
                f"endpoint off unit circle: |gamma({which})| = {radius:.12g} after normalization",
            )
        pts[idx] /= radius
    interior = np.hypot(*pts[1:-1].T) if len(pts) > 2 else np.zeros(0)
    if np.any(interior >= 1.0):
        raise HypothesisViolation("curve-exits-disk", "curve exits reachable disk")
    if np.any(interior >= 1.0 - tol.end):
        flags.append("interior-vertex-near-unit-circle")
    if any(rho == 0 for rho, _ in spec.radii):
        clearance = float(np.min(_segment_distance_to_origin(pts[:-1], pts[1:])))
        if clearance <= tol.geo:
            raise HypothesisViolation(
                "origin-tangency",
                "origin-tangency with r_J = 0: curve passes through origin while r_J = 0 exists",
            )
    clash = _first_self_intersection(pts)
    if clash is not None:
        raise HypothesisViolation("curve-not-simple", f"segments {clash[0]} and {clash[1]} intersect")
    return PlanarCurve(pts, tuple(flags))


@dataclass(frozen=True)
class Crossing:
    segment_index: int
    t: float
    radius: float
    direction: Literal["inward", "outward"]

    def point(self, curve: PlanarCurve) -> np.ndarray:
        p, q = curve.points[self.segment_index], curve.points[self.segment_index + 1]
        return p + self.t * (q - p)


def circle_crossings(curve: PlanarCurve, radius: float, tol: Tolerances = Tolerances()) -> list[Crossing]:
    """All intersections of the polyline with the origin-centred circle of ``radius``.

    Curve endpoints lying on the circle count once each. Raises on tangential
    contact or on a crossing that lands on an interior vertex.
    """
    if not 0 < radius <= 1 + tol.end:
        raise InputError("invalid-radius", f"radius must lie in (0, 1], got {radius}")
    pts = curve.points
    last = len(pts) - 1
    rho2 = radius * radius
    on_circle = np.abs(np.hypot(*pts.T) - radius) <= tol.geo
    if np.any(on_circle[1:-1]):
        i = int(np.flatnonzero(on_circle[1:-1])[0]) + 1
        raise HypothesisViolation(
            "vertex-crossing",
            f"crossing at polyline vertex {i} for radius {radius:.12g}; refine the polyline",
        )

    found: list[Crossing] = []

    def direction(slope: float, where: str) -> Literal["inward", "outward"]:
        if abs(slope) <= tol.tan * radius:
            raise HypothesisViolation("tangential-intersection", f"tangential intersection at {where}")
        return "outward" if slope > 0 else "inward"

    for i in range(last):
        p, q = pts[i], pts[i + 1]
        d = q - p
        a = float(d @ d)
        b = 2.0 * float(p @ d)
        c = float(p @ p) - rho2
        length = math.sqrt(a)
        if i == 0 and on_circle[0]:
            slope = b / length
            found.append(Crossing(0, 0.0, radius, direction(slope, "curve start")))
        disc = b * b - 4 * a * c
        t_star = -b / (2 * a)
        if 0.0 <= t_star <= 1.0 and abs(disc / (4 * a * rho2)) < tol.tan:
            raise HypothesisViolation(
                "tangential-intersection",
                f"tangential intersection with circle of radius {radius:.12g} on segment {i}",
            )
        if disc > 0:
            sq = math.sqrt(disc)
            # numerically stable pair of roots
            qq = -0.5 * (b + math.copysign(sq, b))
            roots = sorted({qq / a, c / qq} if qq != 0 else {t_star})
            for t in roots:
                if not 0.0 < t < 1.0:
                    continue
                near_start, near_end = t * length <= tol.geo, (1 - t) * length <= tol.geo
                if near_start or near_end:
                    vertex = i if near_start else i + 1
                    if on_circle[vertex]:
                        continue  # an endpoint contact, counted separately
                    raise HypothesisViolation(
                        "vertex-crossing",
                        f"crossing at polyline vertex {vertex} for radius {radius:.12g}; refine the polyline",
                    )
                found.append(Crossing(i, t, radius, direction(2 * a * t + b, f"segment {i}")))
        if i == last - 1 and on_circle[last]:
            slope = (2 * a + b) / length
            found.append(Crossing(i, 1.0, radius, direction(slope, "curve end")))
    return found


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    spec: CriticalSpectrum
    mu: dict[Fraction, int]
    crossings: dict[Fraction, int] = field(default_factory=dict)

    def mu_of(self, mask: int) -> int:
        return self.mu[self.spec.radius_of(mask)]

    def per_mask(self) -> np.ndarray:
        radii = np.abs(self.spec.r_num)
        values, inverse = np.unique(radii, return_inverse=True)
        table = np.array([self.mu[Fraction(int(v), self.spec.denom)] for v in values], dtype=np.int64)
        return table[inverse]

    def to_json(self) -> list[dict]:
        return [
            {"radius": format_rational(rho), "crossings": self.crossings.get(rho, 0), "mu": m}
            for rho, m in sorted(self.mu.items())
        ]


def multipliers(curve: PlanarCurve, spec: CriticalSpectrum, tol: Tolerances = Tolerances()) -> MultiplierTable:
    """Half the crossing count for every distinct critical radius (0 for radius 0)."""
    mu: dict[Fraction, int] = {}
    counts: dict[Fraction, int] = {}
    for rho, _ in spec.radii:
        if rho == 0:
            mu[rho] = counts[rho] = 0
            continue
        n = len(circle_crossings(curve, float(rho), tol))
        if n % 2:
            raise HypothesisViolation(
                "odd-crossing-count", f"odd crossing count {n} for radius {format_rational(rho)}"
            )
        counts[rho] = n
        mu[rho] = n // 2
    return MultiplierTable(spec, mu, counts)


def curve_ab(table: MultiplierTable) -> tuple[tuple[int, ...], tuple[int, ...]]:
    spec = table.spec
    mu = table.per_mask()
    a = np.bincount(spec.index, weights=mu * (spec.r_num < 0), minlength=spec.k + 1)
    b = np.bincount(spec.index, weights=mu * (spec.r_num > 0), minlength=spec.k + 1)
    return tuple(int(x) for x in a), tuple(int(x) for x in b)


def _prepare(link: Linkage, curve: PlanarCurve, tol: Tolerances):
    normalized, alpha = normalize(link)
    spec = spectrum(normalized)
    valid = validate_curve(curve.scaled(float(alpha)), spec, tol)
    table = multipliers(valid, spec, tol)
    return normalized, alpha, spec, valid, table


def betti_curve(link: Linkage, curve: PlanarCurve, tol: Tolerances = Tolerances()) -> BettiVector:
    """Ranks of H_0 .. H_{k-1} of the arm with its hand on ``curve``.

    ``curve`` is in the units of the edge lengths.
    """
    *_, table = _prepare(link, curve, tol)
    a, b = curve_ab(table)
    return BettiVector(tuple(a[j] + b[j + 1] for j in range(link.k)))


def curve_report(link: Linkage, curve: PlanarCurve, tol: Tolerances = Tolerances()) -> dict:
    normalized, alpha, _, valid, table = _prepare(link, curve, tol)
    a, b = curve_ab(table)
    bv = BettiVector(tuple(a[j] + b[j + 1] for j in range(link.k)))
    return {
        "k": link.k,
        "normalized_lengths": normalized.to_json(),
        "scale": format_rational(alpha),
        "multipliers": table.to_json(),
        "a": list(a),
        "b": list(b),
        "betti": list(bv.ranks),
        "euler": euler_characteristic(bv),
        "flags": list(valid.flags),
    }


def line_curve_consistency(link: Linkage, h: RationalLike, tol: Tolerances = Tolerances()) -> dict:
    """Compare the line formula with the curve formula on the chord y = h."""
    h = parse_rational(h)
    normalized, alpha = normalize(link)
    spec = spectrum(normalized)
    h_norm = alpha * h
    report = {"h": format_rational(h), "line": list(betti_line(link, h).ranks)}
    if abs(h_norm) >= 1:
        return report | {"status": "skipped", "reason": "chord needs |h| < total length"}
    if any(rho == abs(h_norm) for rho, _ in spec.radii):
        return report | {"status": "skipped", "reason": "tangency: |r_J| = |h|"}
    chord = horizontal_chord(float(h_norm)).scaled(1 / float(alpha))
    curve_ranks = list(betti_curve(link, chord, tol).ranks)
    status = "equal" if curve_ranks == report["line"] else "different"
    return report | {"curve": curve_ranks, "status": status}

