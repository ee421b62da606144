"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``. Every tolerance and time budget is pinned
in ``LIMITS`` below.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time
import timeit
from fractions import Fraction

import pytest

from linkhom import corpus
from linkhom.arm import Linkage, is_regular_height, normalize, spectrum
from linkhom.curve import betti_curve, circle_crossings, multipliers, validate_curve
from linkhom.errors import HypothesisViolation
from linkhom.line import betti_line, count_ab, uv_families
from linkhom.oracle.cubical import build_thickened_complex, full_torus_complex, homology
from linkhom.oracle.run import boundary_squares_to_zero, euler_consistent, stabilized_oracle
from linkhom.verify import run_case, sweep_cases

# seconds; all comparisons of Betti numbers are exact
LIMITS = {
    1: 1e-3,  # per betti_line call, best of 5 repeats
    2: 10.0,
    3: 10.0,
    4: 300.0,
    5: 1.0,
    6: 120.0,
    7: 600.0,
    8: 900.0,
}
SWEEP_DENOMINATORS = (1, 2, 3, 4)
SWEEP_MAX_K = 4
RANDOM_INVARIANCE = 200
RANDOM_CURVES = 100
RANDOM_CROSS = 50
SEED = 2024


def _report(capsys, number: int, ok: bool, detail: str, elapsed: float) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail} ({elapsed:.6f} s, limit {LIMITS[number]:g} s)"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _capsys(request):
    return request.getfixturevalue("capsys") if request is not None else None


def criterion_1(capsys=None):
    start = time.perf_counter()
    ok, worst = True, 0.0
    for k in range(2, 7):
        link = corpus.equal_arm(k)
        for h in ("1", "-1"):
            ok &= betti_line(link, h).ranks == (1,) + (0,) * (k - 1)
            per_call = min(timeit.repeat(lambda: betti_line(link, h), number=20, repeat=5)) / 20
            worst = max(worst, per_call)
    ok &= worst < LIMITS[1]
    # the budget applies per call, so report the slowest call
    _report(capsys, 1, ok, f"stretched-out arms k=2..6 are points; suite took {time.perf_counter() - start:.3f} s", worst)
    return ok


def criterion_2(capsys=None):
    start = time.perf_counter()
    line = betti_line(corpus.HALVES, "1/2").ranks
    curve = betti_curve(corpus.HALVES, corpus.CHORD_HALF).ranks
    oracle = stabilized_oracle(corpus.HALVES, "1/2", 32)
    runs = [oracle.coarse, oracle.fine]
    elapsed = time.perf_counter() - start
    ok = (
        line == (1, 1)
        and curve == (1, 1)
        and [r.n for r in runs] == [32, 64]
        and all(r.betti.ranks == (1, 1, 0) and not r.betti.torsion for r in runs)
        and oracle.checks_ok
        and elapsed < LIMITS[2]
    )
    _report(capsys, 2, ok, f"halves h=1/2: line {line}, curve {curve}, oracle n=32,64 {[r.betti.ranks for r in runs]}", elapsed)
    return ok


def criterion_3(capsys=None):
    start = time.perf_counter()
    line = betti_line(corpus.HALVES, "0").ranks
    oracle = stabilized_oracle(corpus.HALVES, "0", 32)
    try:
        betti_curve(corpus.HALVES, corpus.THROUGH_ORIGIN)
        rejected = None
    except HypothesisViolation as exc:
        rejected = exc.code
    elapsed = time.perf_counter() - start
    ok = (
        line == (1, 3)
        and oracle.stable
        and oracle.betti.ranks == (1, 3, 0)
        and not oracle.betti.torsion
        and oracle.checks_ok
        and rejected == "origin-tangency"
        and elapsed < LIMITS[3]
    )
    _report(capsys, 3, ok, f"halves h=0: line {line}, oracle {oracle.betti.ranks}, through-origin chord -> {rejected}", elapsed)
    return ok


def criterion_4(capsys=None):
    start = time.perf_counter()
    line = betti_line(corpus.THIRDS, "0").ranks
    oracle = stabilized_oracle(corpus.THIRDS, "0", 24)
    runs = [oracle.coarse, oracle.fine]
    elapsed = time.perf_counter() - start
    ok = (
        line == (1, 6, 1)
        and [r.n for r in runs] == [24, 48]
        and all(r.betti.ranks == (1, 6, 1, 0) and not r.betti.torsion for r in runs)
        and oracle.checks_ok
        and elapsed < LIMITS[4]
    )
    _report(capsys, 4, ok, f"thirds h=0: line {line}, oracle n=24,48 {[r.betti.ranks for r in runs]}", elapsed)
    return ok


def criterion_5(capsys=None):
    start = time.perf_counter()
    normalized, _ = normalize(corpus.THIRDS)
    unit = validate_curve(corpus.DOUBLE_DIP, spectrum(normalized))
    contacts = len(circle_crossings(unit, 1.0))
    inner = len(circle_crossings(unit, 1 / 3))
    ranks = betti_curve(corpus.THIRDS, corpus.DOUBLE_DIP).ranks
    elapsed = time.perf_counter() - start
    ok = contacts == 2 and inner == 4 and ranks == (1, 12, 1) and elapsed < LIMITS[5]
    _report(capsys, 5, ok, f"double dip: {contacts} unit-circle contacts, {inner} radius-1/3 crossings, betti {ranks}", elapsed)
    return ok


def criterion_6(capsys=None):
    start = time.perf_counter()
    results = {k: homology(full_torus_complex(k, 8)).ranks for k in (2, 3, 4)}
    elapsed = time.perf_counter() - start
    ok = all(results[k] == tuple(math.comb(k, j) for j in range(k + 1)) for k in results) and elapsed < LIMITS[6]
    _report(capsys, 6, ok, f"full torus n=8: {results}", elapsed)
    return ok


def _length_vectors():
    values = sorted({Fraction(p, q) for q in SWEEP_DENOMINATORS for p in range(1, q + 1)})
    for k in range(1, SWEEP_MAX_K + 1):
        yield from itertools.product(values, repeat=k)


def _sweep_heights(values):
    mids = [(x + y) / 2 for x, y in zip(values, values[1:])]
    return values + mids + [values[0] - Fraction(1, 2), values[-1] + Fraction(1, 2)]


def _random_instance(rng):
    link = corpus.random_lengths(rng, rng.randint(1, 6))
    h = Fraction(rng.randint(-120, 120), 100) * link.total
    return link, h


def criterion_7(capsys=None):
    start = time.perf_counter()
    disagreements = duality = checked = regular = 0
    # (a), (b): exhaustive sweep
    for lengths in _length_vectors():
        link = Linkage(lengths)
        normalized, alpha = normalize(link)
        spec = spectrum(normalized)
        for h in _sweep_heights(spec.critical_values):
            checked += 1
            counts = count_ab(spec, h)
            disagreements += counts != uv_families(spec, h).counts()
            if is_regular_height(spec, h):
                regular += 1
                ranks = counts.ranks()
                duality += ranks != ranks[::-1]
    # (c): sign, permutation and scaling invariance
    rng = random.Random(SEED)
    invariance = 0
    for _ in range(RANDOM_INVARIANCE):
        link, h = _random_instance(rng)
        bv = betti_line(link, h)
        shuffled = list(link.lengths)
        rng.shuffle(shuffled)
        scale = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        invariance += bv != betti_line(link, -h)
        invariance += bv != betti_line(Linkage(tuple(shuffled)), h)
        invariance += bv != betti_line(link.scaled(scale), scale * h)
    # (d): curve invariants on random valid polylines
    curve_failures = curves = 0
    while curves < RANDOM_CURVES:
        link = corpus.random_lengths(rng, rng.randint(2, 4))
        curve = corpus.random_monotone_curve(rng, rng.randint(1, 6)).scaled(float(link.total))
        try:
            bv = betti_curve(link, curve)
        except HypothesisViolation:
            continue
        curves += 1
        normalized, alpha = normalize(link)
        spec = spectrum(normalized)
        unit = validate_curve(curve.scaled(float(alpha)), spec)
        table = multipliers(unit, spec)
        full = (1 << link.k) - 1
        ok = all(table.mu_of(m) == table.mu_of(full ^ m) for m in range(full + 1))
        ok &= all(n % 2 == 0 for n in table.crossings.values())
        ok &= betti_curve(link, curve.reversed()) == bv
        ok &= all(betti_curve(link, curve.refined(s, 0.5)) == bv for s in range(curve.segments))
        curve_failures += not ok
    # (e): every oracle complex built here satisfies d o d = 0 and Euler consistency
    complexes = 0
    bad_complexes = 0
    oracle_cases = [(corpus.HALVES, "1/2", 32), (corpus.HALVES, "0", 32), (corpus.THIRDS, "0", 24)]
    rng_e = random.Random(SEED + 1)
    for _ in range(10):
        link = corpus.random_lengths(rng_e, rng_e.randint(1, 3))
        spec = spectrum(normalize(link)[0])
        values = spec.critical_values
        i = rng_e.randrange(len(values) - 1)
        oracle_cases.append((link, (values[i] + values[i + 1]) / 2 * link.total, 16))
    for link, h, n in oracle_cases:
        for size in (n, 2 * n):
            cx, _ = build_thickened_complex(link, h, size)
            complexes += 1
            bad_complexes += not (boundary_squares_to_zero(cx) and euler_consistent(cx, homology(cx)))
    elapsed = time.perf_counter() - start
    ok = not (disagreements or duality or invariance or curve_failures or bad_complexes) and elapsed < LIMITS[7]
    detail = (
        f"(a) {disagreements}/{checked} two-path disagreements, (b) {duality}/{regular} duality failures, "
        f"(c) {invariance} invariance failures on {RANDOM_INVARIANCE}, (d) {curve_failures}/{curves} curve failures, "
        f"(e) {bad_complexes}/{complexes} bad complexes"
    )
    _report(capsys, 7, ok, detail, elapsed)
    return ok


def criterion_8(capsys=None):
    start = time.perf_counter()
    records = [run_case(case) for case in sweep_cases(RANDOM_CROSS, seed=SEED)]
    elapsed = time.perf_counter() - start
    statuses = [r["status"] for r in records]
    ok = "fail" not in statuses and len(records) == RANDOM_CROSS and elapsed < LIMITS[8]
    detail = (
        f"{statuses.count('pass')} agree, {statuses.count('inconclusive')} inconclusive, "
        f"{statuses.count('fail')} disagree out of {len(records)} random k=3 instances"
    )
    _report(capsys, 8, ok, detail, elapsed)
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion, request):
    assert criterion(_capsys(request))


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
