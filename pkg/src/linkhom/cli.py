"""Command line front end.

    linkhom radii  --lengths 1/3,1/3,1/3
    linkhom line   --lengths 1/3,1/3,1/3 --h 0
    linkhom curve  --lengths 1/2,1/2 --curve chord_half.json
    linkhom oracle --lengths 1/2,1/2 --h 1/2 --grid-n 32
    linkhom verify --sweep 50 --seed 0 --jobs 4
    linkhom revalidate report.json

Reports are JSON on stdout (or ``--out``). Exit codes: 0 ok, 2 bad input,
3 curve hypotheses violated, 4 oracle refused, 5 verification disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from linkhom import __version__
from linkhom.arm import Linkage, format_rational, normalize, parse_rational, spectrum
from linkhom.curve import PlanarCurve, Tolerances, curve_report
from linkhom.errors import InputError, LinkhomError
from linkhom.line import line_report
from linkhom.oracle.run import stabilized_oracle
from linkhom.verify import verify_suite

COMMANDS = ("radii", "line", "curve", "oracle", "verify")
EXIT_DISAGREEMENT = 5


@dataclass
class RunConfig:
    command: str
    lengths: list[str] = field(default_factory=list)
    h: str | None = None
    curve_path: str | None = None
    curve_points: list[list[float]] | None = None
    grid_n: int | None = None
    delta: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: str | None = None
    format: str = "json"
    dump_samples: str | None = None
    sweep: int = 50
    seed: int = 0
    jobs: int = 1

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InputError("unknown-command", f"unknown command {self.command!r}")
        if self.command != "verify" and not self.lengths:
            raise InputError("missing-lengths", f"{self.command} needs --lengths")
        if self.command in ("line", "oracle") and self.h is None:
            raise InputError("missing-h", f"{self.command} needs --h")
        if self.command == "curve" and self.curve_path is None and self.curve_points is None:
            raise InputError("missing-curve", "curve needs --curve")
        if self.grid_n is not None and self.grid_n < 8:
            raise InputError("invalid-grid", "--grid-n must be at least 8")
        if self.format not in ("json", "table"):
            raise InputError("invalid-format", f"unknown format {self.format!r}")
        if self.sweep < 0 or self.jobs < 1:
            raise InputError("invalid-sweep", "--sweep must be >= 0 and --jobs >= 1")


def _input_block(config: RunConfig, curve: PlanarCurve | None = None) -> dict:
    block: dict = {"lengths": Linkage.parse(config.lengths).to_json()}
    if config.h is not None:
        block["h"] = format_rational(parse_rational(config.h))
    if curve is not None:
        block["curve"] = curve.to_json()
        tol = config.tolerances
        block["tolerances"] = {"end": tol.end, "geo": tol.geo, "tan": tol.tan}
    if config.grid_n is not None:
        block["grid_n"] = config.grid_n
    if config.delta is not None:
        block["delta"] = format_rational(parse_rational(config.delta))
    return block


def _load_curve(config: RunConfig) -> PlanarCurve:
    if config.curve_points is not None:
        return PlanarCurve.from_json({"points": config.curve_points})
    try:
        return PlanarCurve.from_json(Path(config.curve_path))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("unreadable-curve", f"cannot read curve file {config.curve_path}: {exc}") from exc


def _run(config: RunConfig) -> tuple[int, dict]:
    config.validate()
    if config.command == "verify":
        report = verify_suite(config.sweep, config.seed, config.jobs, config.tolerances)
        body = report.to_json()
        body["input"] = {"sweep": config.sweep, "seed": config.seed}
        return (EXIT_DISAGREEMENT if report.failures else 0), body

    link = Linkage.parse(config.lengths)
    if config.command == "radii":
        normalized, alpha = normalize(link)
        body = {"input": _input_block(config), "scale": format_rational(alpha)}
        body |= spectrum(normalized).to_json()
        return 0, body
    if config.command == "line":
        return 0, {"input": _input_block(config)} | line_report(link, config.h)
    if config.command == "curve":
        curve = _load_curve(config)
        return 0, {"input": _input_block(config, curve)} | curve_report(link, curve, config.tolerances)

    oracle = stabilized_oracle(link, config.h, config.grid_n, config.delta, keep_samples=bool(config.dump_samples))
    body = {"input": _input_block(config)} | oracle.to_json()
    if config.dump_samples:
        samples = oracle.fine.samples
        payload = {"n": oracle.fine.n, "angles": np.round(samples, 12).tolist()}
        Path(config.dump_samples).write_text(json.dumps(payload) + "\n", encoding="utf-8")
        body["samples_path"] = config.dump_samples
    return 0, body


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one command; never raises for tool errors, returns ``(exit_code, report)``."""
    try:
        code, body = _run(config)
    except LinkhomError as exc:
        return exc.exit_code, {"command": config.command} | exc.to_json()
    return code, {"command": config.command, "version": __version__} | body


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def config_from_report(report: dict) -> RunConfig:
    """Rebuild the configuration that produced ``report``."""
    inp = report.get("input", {})
    command = report.get("command", "")
    if command == "verify":
        return RunConfig("verify", sweep=inp["sweep"], seed=inp["seed"])
    tol = Tolerances(**inp.get("tolerances", {}))
    curve = inp.get("curve")
    return RunConfig(
        command,
        lengths=list(inp.get("lengths", [])),
        h=inp.get("h"),
        curve_points=curve["points"] if curve else None,
        grid_n=inp.get("grid_n"),
        delta=inp.get("delta"),
        tolerances=tol,
    )


def revalidate(report: dict) -> bool:
    """Re-run the command recorded in ``report`` and check the result is identical."""
    if "error" in report:
        return False
    _, again = run(config_from_report(report))
    return dumps(again) == dumps(report)


def render_table(report: dict) -> str:
    if "error" in report:
        return f"error {report['error']}: {report['message']}\n"
    command = report["command"]
    lines = [f"{command}: lengths {','.join(report['input'].get('lengths', []))}"]
    if command == "radii":
        lines.append(f"{'mask':>6} {'J':<16} {'r_J':>10} index")
        for c in report["configs"]:
            lines.append(f"{c['mask']:>6} {str(c['J']):<16} {c['r']:>10} {c['index']}")
    elif command == "verify":
        for r in report["cases"]:
            lines.append(f"{r['status']:<13} {r['name']:<32} formula={r.get('betti_formula')} oracle={r.get('betti_oracle')}")
        lines.append("summary " + " ".join(f"{k}={v}" for k, v in report["summary"].items()))
    else:
        for key in ("h", "a", "b", "betti", "euler", "n", "stable", "torsion"):
            if key in report:
                lines.append(f"  {key:<8} {report[key]}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkhom", description="Homology of constrained planar robotic arms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, lengths_required: bool = True) -> None:
        if lengths_required:
            p.add_argument("--lengths", required=True, help="comma separated rationals, e.g. 1/3,1/3,1/3")
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--out", help="write the report here instead of stdout")

    def tolerances(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol-end", type=float, default=Tolerances.end)
        p.add_argument("--tol-geo", type=float, default=Tolerances.geo)
        p.add_argument("--tol-tan", type=float, default=Tolerances.tan)

    p = sub.add_parser("radii", help="vertical collinear configurations and critical radii")
    common(p)
    p = sub.add_parser("line", help="Betti numbers with the hand on y = h")
    common(p)
    p.add_argument("--h", required=True)
    p = sub.add_parser("curve", help="Betti numbers with the hand on a polyline")
    common(p)
    p.add_argument("--curve", required=True, help='JSON file {"points": [[x, y], ...]}')
    tolerances(p)
    p = sub.add_parser("oracle", help="brute-force cubical homology of the thickened level set")
    common(p)
    p.add_argument("--h", required=True)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--delta", help="half-width of the thickening (default: half the gap to the next critical value)")
    p.add_argument("--dump-samples", help="write the angles of the top cubes to this JSON file")
    p = sub.add_parser("verify", help="run the worked examples and a random sweep through every path")
    common(p, lengths_required=False)
    p.add_argument("--sweep", type=int, default=50, help="number of random k=3 instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    tolerances(p)
    p = sub.add_parser("revalidate", help="re-run a saved report and check it reproduces")
    p.add_argument("report")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "revalidate":
        try:
            report = json.loads(Path(args.report).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            err = InputError("unreadable-report", str(exc))
            sys.stdout.write(dumps(err.to_json()))
            return err.exit_code
        ok = revalidate(report)
        sys.stdout.write(dumps({"command": "revalidate", "reproduced": ok}))
        return 0 if ok else EXIT_DISAGREEMENT

    try:
        tol = Tolerances(
            getattr(args, "tol_end", Tolerances.end),
            getattr(args, "tol_geo", Tolerances.geo),
            getattr(args, "tol_tan", Tolerances.tan),
        )
    except LinkhomError as exc:
        sys.stdout.write(dumps({"command": args.command} | exc.to_json()))
        return exc.exit_code
    config = RunConfig(
        args.command,
        lengths=[v for v in getattr(args, "lengths", "").split(",") if v.strip()] if getattr(args, "lengths", None) else [],
        h=getattr(args, "h", None),
        curve_path=getattr(args, "curve", None),
        grid_n=getattr(args, "grid_n", None),
        delta=getattr(args, "delta", None),
        tolerances=tol,
        output=args.out,
        format=args.format,
        dump_samples=getattr(args, "dump_samples", None),
        sweep=getattr(args, "sweep", 50),
        seed=getattr(args, "seed", 0),
        jobs=getattr(args, "jobs", 1),
    )
    code, report = run(config)
    text = render_table(report) if config.format == "table" else dumps(report)
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
