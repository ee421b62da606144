import json
import math
import random

import numpy as np
import pytest

from linkhom import corpus
from linkhom.arm import Linkage, normalize, spectrum
from linkhom.curve import (
    PlanarCurve,
    Tolerances,
    betti_curve,
    circle_crossings,
    curve_report,
    horizontal_chord,
    line_curve_consistency,
    multipliers,
    validate_curve,
)
from linkhom.errors import HypothesisViolation, InputError
from linkhom.line import betti_line


def test_chord_for_halves_is_a_circle():
    assert betti_curve(corpus.HALVES, corpus.CHORD_HALF).ranks == (1, 1)


def test_thirds_chord_and_double_dip():
    assert betti_curve(corpus.THIRDS, horizontal_chord(0.0)).ranks == (1, 6, 1)
    report = curve_report(corpus.THIRDS, corpus.DOUBLE_DIP)
    assert report["betti"] == [1, 12, 1]
    by_radius = {m["radius"]: m for m in report["multipliers"]}
    assert by_radius["1/3"]["crossings"] == 4 and by_radius["1/3"]["mu"] == 2
    assert by_radius["1/1"]["crossings"] == 2 and by_radius["1/1"]["mu"] == 1


def test_curve_in_arm_units():
    # total length 3: the unit-circle chord scaled by 3
    assert betti_curve(Linkage.parse("1,1,1"), horizontal_chord(0.0).scaled(3.0)).ranks == (1, 6, 1)


def test_through_origin_rejected_when_r_zero_exists():
    with pytest.raises(HypothesisViolation) as exc:
        betti_curve(corpus.HALVES, corpus.THROUGH_ORIGIN)
    assert exc.value.code == "origin-tangency"
    assert "origin-tangency with r_J = 0" in exc.value.message
    # without a zero radius the same chord is fine
    assert betti_curve(corpus.THIRDS, corpus.THROUGH_ORIGIN).ranks == (1, 6, 1)


def test_crossing_directions():
    crossings = circle_crossings(PlanarCurve([[-1, 0.5], [1, 0.5]]), 0.8)
    assert [c.direction for c in crossings] == ["inward", "outward"]
    pts = [c.point(PlanarCurve([[-1, 0.5], [1, 0.5]])) for c in crossings]
    assert [round(float(p[0]), 12) for p in pts] == [round(-math.sqrt(0.64 - 0.25), 12), round(math.sqrt(0.39), 12)]
    ends = circle_crossings(corpus.CHORD_HALF, 1.0)
    assert [(c.t, c.direction) for c in ends] == [(0.0, "inward"), (1.0, "outward")]


@pytest.mark.parametrize(
    "points, code",
    [
        ([[-0.9, 0.0], [1.0, 0.0]], "endpoint-off-circle"),
        ([[-1.0, 0.0], [0.0, 1.2], [1.0, 0.0]], "curve-exits-disk"),
        ([[-1.0, 0.0], [0.5, 0.5], [0.5, -0.5], [-0.5, 0.5], [0.0, 1.0]], "curve-not-simple"),
    ],
)
def test_validation_errors(points, code):
    with pytest.raises(HypothesisViolation) as exc:
        betti_curve(corpus.THIRDS, PlanarCurve(points))
    assert exc.value.code == code


def test_tangential_contact_rejected():
    # y = 1/3 touches the radius-1/3 circle at (0, 1/3)
    y = 1 / 3
    x = math.sqrt(1 - y * y)
    with pytest.raises(HypothesisViolation) as exc:
        betti_curve(corpus.THIRDS, PlanarCurve([[-x, y], [x, y]]))
    assert exc.value.code == "tangential-intersection"


def test_vertex_on_circle_rejected():
    curve = PlanarCurve([[-1.0, 0.0], [-1 / 3, 0.0], [1.0, 0.0]])
    with pytest.raises(HypothesisViolation) as exc:
        betti_curve(corpus.THIRDS, curve)
    assert exc.value.code == "vertex-crossing"


def test_odd_crossing_count_detected():
    # bypass validation: a segment starting inside the circle
    spec = spectrum(corpus.THIRDS)
    with pytest.raises(HypothesisViolation) as exc:
        multipliers(PlanarCurve([[0.0, 0.0], [0.0, 0.9]]), spec)
    assert exc.value.code == "odd-crossing-count"


@pytest.mark.parametrize(
    "payload",
    [{"points": [[0, 0]]}, {"points": [[0, 0, 0], [1, 1, 1]]}, {"pts": []}, {"points": [[0, float("nan")], [1, 0]]}],
)
def test_malformed_curves(payload):
    with pytest.raises(InputError):
        PlanarCurve.from_json(payload)


def test_degenerate_segment():
    with pytest.raises(InputError) as exc:
        betti_curve(corpus.THIRDS, PlanarCurve([[-1, 0], [-1, 0], [1, 0]]))
    assert exc.value.code == "degenerate-segment"


def test_interior_vertex_near_circle_is_flagged():
    spec = spectrum(corpus.THIRDS)
    eps = 1e-8
    curve = PlanarCurve([[-1, 0], [0, 1 - eps], [1, 0]])
    assert validate_curve(curve, spec).flags == ("interior-vertex-near-unit-circle",)


def test_endpoints_snapped_to_circle():
    spec = spectrum(corpus.THIRDS)
    valid = validate_curve(PlanarCurve([[-1 - 5e-7, 0], [1, 0]]), spec)
    assert np.hypot(*valid.points[0]) == 1.0


def test_json_round_trip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(corpus.DOUBLE_DIP.to_json()), encoding="utf-8")
    again = PlanarCurve.from_json(path)
    assert np.array_equal(again.points, corpus.DOUBLE_DIP.points)
    assert PlanarCurve.from_json(json.dumps(corpus.CHORD_HALF.to_json())).to_json() == corpus.CHORD_HALF.to_json()


def test_tolerances_must_be_positive():
    with pytest.raises(InputError):
        Tolerances(end=0)


def test_line_curve_consistency():
    assert line_curve_consistency(corpus.THIRDS, 0)["status"] == "equal"
    assert line_curve_consistency(corpus.HALVES, 0)["status"] == "skipped"
    assert line_curve_consistency(corpus.HALVES, 1)["status"] == "skipped"
    link = Linkage.parse("5,3,2,1")
    for h in ("1/2", "3/2", "-5/2", "9/2"):
        assert line_curve_consistency(link, h)["status"] == "equal"


def _random_instances(count: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        link = corpus.random_lengths(rng, rng.randint(2, 4))
        curve = corpus.random_monotone_curve(rng, rng.randint(1, 6)).scaled(float(link.total))
        try:
            betti_curve(link, curve)
        except HypothesisViolation:
            continue  # tangency or a vertex on a circle: not a valid instance
        out.append((link, curve))
    return out


RANDOM_CURVES = _random_instances(100, seed=7)


@pytest.mark.parametrize("link, curve", RANDOM_CURVES)
def test_random_curve_invariants(link, curve):
    normalized, alpha = normalize(link)
    spec = spectrum(normalized)
    unit = validate_curve(curve.scaled(float(alpha)), spec)
    table = multipliers(unit, spec)
    full = (1 << link.k) - 1
    for mask in range(full + 1):
        # complement: u_J and u_{J^c} sit on the same circle
        assert table.mu_of(mask) == table.mu_of(full ^ mask)
    for rho, _ in spec.radii:
        if rho == 0:
            continue
        crossings = circle_crossings(unit, float(rho))
        # parity, and the curve alternately enters and leaves the disk of radius rho
        assert len(crossings) % 2 == 0
        assert [c.direction for c in crossings] == ["inward", "outward"] * (len(crossings) // 2)
    bv = betti_curve(link, curve)
    assert bv.ranks == bv.ranks[::-1]
    assert betti_curve(link, curve.reversed()) == bv
    for seg in range(curve.segments):
        assert betti_curve(link, curve.refined(seg, 0.37)) == bv


def test_horizontal_chord_matches_line_on_random_arms():
    rng = random.Random(3)
    for _ in range(50):
        link = corpus.random_lengths(rng, rng.randint(1, 5))
        spec = spectrum(normalize(link)[0])
        values = spec.critical_values
        i = rng.randrange(len(values) - 1)
        h_norm = (values[i] + values[i + 1]) / 2
        if abs(h_norm) >= 1:
            continue
        h = h_norm * link.total
        chord = horizontal_chord(float(h_norm), samples=rng.randint(2, 5)).scaled(float(link.total))
        assert betti_curve(link, chord) == betti_line(link, h)
