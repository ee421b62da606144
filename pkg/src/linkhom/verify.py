"""Cross-verification suite: worked examples and random sweeps through every path."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from linkhom import corpus
from linkhom.arm import Linkage, format_rational, normalize, spectrum
from linkhom.curve import PlanarCurve, Tolerances, betti_curve, line_curve_consistency
from linkhom.errors import HypothesisViolation, LinkhomError, ResourceRefusal
from linkhom.line import betti_line
from linkhom.oracle.run import stabilized_oracle


@dataclass(frozen=True)
class Case:
    name: str
    kind: str  # "line" | "curve" | "curve-reject"
    lengths: tuple[str, ...]
    h: str | None = None
    curve: tuple[tuple[float, float], ...] | None = None
    expected: tuple[int, ...] | None = None
    grid_n: int | None = None
    oracle: bool = False
    expect_error: str | None = None
    notes: str = ""


@dataclass
class VerifyReport:
    records: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r["status"] == "fail" for r in self.records)

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "inconclusive": 0}
        for r in self.records:
            out[r["status"]] += 1
        return out

    def to_json(self) -> dict:
        return {"command": "verify", "summary": self.summary(), "cases": self.records}


def _points(curve: PlanarCurve) -> tuple[tuple[float, float], ...]:
    return tuple((float(x), float(y)) for x, y in curve.points)


def worked_examples() -> list[Case]:
    cases = []
    for k in range(2, 7):
        lengths = tuple(f"1/{k}" for _ in range(k))
        for h in ("1", "-1"):
            cases.append(
                Case(
                    f"stretched-out k={k} h={h}",
                    "line",
                    lengths,
                    h=h,
                    expected=(1,) + (0,) * (k - 1),
                    oracle=k <= 3,
                    notes="a single configuration",
                )
            )
    cases += [
        Case("halves h=1/2", "line", ("1/2", "1/2"), h="1/2", expected=(1, 1), oracle=True, grid_n=32),
        Case("halves chord y=1/2", "curve", ("1/2", "1/2"), curve=_points(corpus.CHORD_HALF), expected=(1, 1)),
        Case(
            "halves h=0 (critical)",
            "line",
            ("1/2", "1/2"),
            h="0",
            expected=(1, 3),
            oracle=True,
            grid_n=32,
            notes="two circles glued at two points",
        ),
        Case(
            "halves chord y=0 rejected",
            "curve-reject",
            ("1/2", "1/2"),
            curve=_points(corpus.THROUGH_ORIGIN),
            expect_error="origin-tangency",
        ),
        Case("thirds h=0", "line", ("1/3", "1/3", "1/3"), h="0", expected=(1, 6, 1), oracle=True, grid_n=24),
        Case(
            "thirds chord y=0",
            "curve",
            ("1/3", "1/3", "1/3"),
            curve=_points(PlanarCurve([[-1.0, 0.0], [1.0, 0.0]])),
            expected=(1, 6, 1),
        ),
        Case(
            "thirds double dip",
            "curve",
            ("1/3", "1/3", "1/3"),
            curve=_points(corpus.DOUBLE_DIP),
            expected=(1, 12, 1),
        ),
        Case(
            "single edge h=1/2",
            "line",
            ("1",),
            h="1/2",
            expected=(2,),
            oracle=True,
            notes="the fibre is two points; the formula gives a_0 + b_1 = 1 + 1 = 2",
        ),
    ]
    return cases


def random_regular_instance(rng: random.Random, k: int) -> tuple[tuple[str, ...], str]:
    """Random rational lengths and a regular height at the midpoint of a critical gap.

    The gap is picked by a uniform draw in (-1, 1), so wide gaps are favoured.
    """
    link = corpus.random_lengths(rng, k)
    normalized, alpha = normalize(link)
    values = spectrum(normalized).critical_values
    u = Fraction(rng.randint(-999, 999), 1000)
    i = max(j for j in range(len(values) - 1) if values[j] <= u)
    h = (values[i] + values[i + 1]) / 2 / alpha
    return tuple(link.to_json()), format_rational(h)


def sweep_cases(count: int, seed: int, k: int = 3) -> list[Case]:
    rng = random.Random(seed)
    cases = []
    for i in range(count):
        lengths, h = random_regular_instance(rng, k)
        cases.append(Case(f"sweep k={k} #{i}", "line", lengths, h=h, oracle=True))
    return cases


def run_case(case: Case, tol: Tolerances = Tolerances()) -> dict:
    link = Linkage.parse(list(case.lengths))
    record: dict = {"name": case.name, "input": {"lengths": list(case.lengths)}}
    if case.h is not None:
        record["input"]["h"] = case.h
    if case.curve is not None:
        record["input"]["curve"] = [list(p) for p in case.curve]
    notes = [case.notes] if case.notes else []
    status = "pass"
    try:
        if case.kind == "curve-reject":
            try:
                betti_curve(link, PlanarCurve(case.curve), tol)
            except HypothesisViolation as exc:
                record["error"] = exc.code
                ok = exc.code == case.expect_error
            else:
                ok = False
            record["agreement"] = ok
            status = "pass" if ok else "fail"
        else:
            if case.kind == "line":
                formula = betti_line(link, case.h)
            else:
                formula = betti_curve(link, PlanarCurve(case.curve), tol)
            record["betti_formula"] = list(formula.ranks)
            agreement = True
            if case.expected is not None:
                record["betti_expected"] = list(case.expected)
                agreement &= tuple(formula.ranks) == case.expected
            if case.kind == "line":
                consistency = line_curve_consistency(link, case.h, tol)
                record["line_curve"] = consistency["status"]
                agreement &= consistency["status"] != "different"
            if case.oracle:
                try:
                    oracle = stabilized_oracle(link, case.h, case.grid_n)
                except ResourceRefusal as exc:
                    notes.append(f"oracle refused: {exc.code}")
                    status = "inconclusive"
                else:
                    record["oracle"] = oracle.to_json()
                    record["betti_oracle"] = list(oracle.betti.ranks)
                    if not oracle.checks_ok:
                        agreement = False
                        notes.append("boundary or Euler check failed")
                    if not oracle.stable:
                        status = "inconclusive"
                        notes.append("oracle not stable under refinement")
                    else:
                        agreement &= oracle.betti == formula.padded(link.k + 1)
            record["agreement"] = agreement
            if not agreement:
                status = "fail"
    except LinkhomError as exc:
        record["error"] = exc.code
        notes.append(exc.message)
        record["agreement"] = False
        status = "fail"
    record["status"] = status
    record["notes"] = "; ".join(notes)
    return record


def verify_suite(sweep: int = 50, seed: int = 0, jobs: int = 1, tol: Tolerances = Tolerances()) -> VerifyReport:
    cases = worked_examples() + sweep_cases(sweep, seed)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_case, cases, [tol] * len(cases)))
    else:
        records = [run_case(c, tol) for c in cases]
    return VerifyReport(records)
