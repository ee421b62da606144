"""Worked examples with known Betti numbers, shared by the verify suite and the tests."""

from __future__ import annotations

import math
from fractions import Fraction

from linkhom.arm import Linkage
from linkhom.curve import PlanarCurve

HALVES = Linkage.parse("1/2,1/2")
THIRDS = Linkage.parse("1/3,1/3,1/3")

# hand on y = 1/2 for two half-length edges: a circle
CHORD_HALF = PlanarCurve([[-math.sqrt(3) / 2, 0.5], [math.sqrt(3) / 2, 0.5]])

# y = 0 through the origin; tangent to the radius-0 "circle" of J = {1}, {2}
THROUGH_ORIGIN = PlanarCurve([[-1.0, 0.0], [1.0, 0.0]])

# endpoints on the unit circle, dips twice inside radius 1/3: four crossings
DOUBLE_DIP = PlanarCurve([[-1.0, 0.0], [-0.2, 0.0], [0.0, 0.6], [0.2, 0.0], [1.0, 0.0]])


def equal_arm(k: int) -> Linkage:
    return Linkage.parse([f"1/{k}"] * k)


def random_lengths(rng, k: int, max_num: int = 9, max_den: int = 4) -> Linkage:
    return Linkage(tuple(Fraction(rng.randint(1, max_num), rng.randint(1, max_den)) for _ in range(k)))


def random_monotone_curve(rng, interior: int = 4, margin: float = 0.05) -> PlanarCurve:
    """An x-monotone polyline from the left half of the unit circle to the right half.

    x-monotone means simple; interior vertices stay inside radius ``1 - margin``
    and the disk is convex, so the whole curve lies in the closed unit disk.
    """
    a = rng.uniform(-1.2, 1.2)
    b = rng.uniform(-1.2, 1.2)
    start = (-math.cos(a), math.sin(a))
    end = (math.cos(b), math.sin(b))
    lo, hi = start[0] + margin, end[0] - margin
    xs = sorted(rng.uniform(lo, hi) for _ in range(interior))
    points = [start]
    for x in xs:
        ymax = math.sqrt(max((1 - margin) ** 2 - x * x, 0.0))
        points.append((x, rng.uniform(-ymax, ymax)))
    points.append(end)
    return PlanarCurve(points)
