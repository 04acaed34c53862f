"""Command line entry point: ``matterwave run|demo|check|sweep``."""
from __future__ import annotations

import argparse
import sys

from . import phase, scenario
from .scenario import ScenarioError, ScenarioRunError

ROUTES = ("proper_time_sliding", "golden_rule", "energy_bookkeeping")


def _add_output_options(parser):
    parser.add_argument("--format", choices=("json", "csv", "table"), default="json",
                        help="report format (default: json)")
    parser.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    parser.add_argument("--jobs", "-j", type=int, default=1, help="configurations run in parallel (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matterwave",
        description="Proper time, detected phase and lattice checks for atom and neutron interferometers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file ('-' reads stdin)")
    p_run.add_argument("file")
    _add_output_options(p_run)

    p_demo = sub.add_parser("demo", help="run a built-in scenario")
    p_demo.add_argument("name", choices=sorted(scenario.BUILTINS))
    _add_output_options(p_demo)

    p_check = sub.add_parser("check", help="run the invariant suite")
    p_check.add_argument("--inject-sign-error", choices=ROUTES, default=None, metavar="ROUTE",
                         help=f"negate one phase route ({', '.join(ROUTES)}); the suite must then fail")
    p_check.add_argument("--format", choices=("json", "table"), default="table")
    p_check.add_argument("--output", "-o", default=None)

    p_sweep = sub.add_parser("sweep", help="run a scenario with inline overrides")
    p_sweep.add_argument("file", nargs="?", default=None,
                         help="base scenario (default: the four-situations demo)")
    p_sweep.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                         help="override or add a scenario key, e.g. --set sweep.g=4.9,9.8")
    _add_output_options(p_sweep)
    return parser


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ScenarioError(f"cannot write {path}: {exc.strerror}") from None


def _report(s, args):
    if args.jobs < 1:
        raise ScenarioError("--jobs must be at least 1")
    report = scenario.run(s, jobs=args.jobs)
    color = args.output is None and scenario.use_color()
    _write(scenario.emit(report, args.format, color), args.output)
    return 0 if report.passed else 1


def _check(args):
    results = scenario.run_checks(inject_sign_error=args.inject_sign_error)
    passed = all(r["passed"] for r in results)
    if args.format == "json":
        text = scenario.canonical_json({"schema_version": scenario.SCHEMA_VERSION, "checks": results,
                                        "passed": passed}) + "\n"
    else:
        color = args.output is None and scenario.use_color()
        lines = [f"{scenario._status(r['passed'], color)}  {r['name']}  "
                 f"(value {r['value']:.3e}, tolerance {r['tolerance']:.3e})" for r in results]
        lines.append(f"overall: {scenario._status(passed, color)}")
        text = "\n".join(lines) + "\n"
    _write(text, args.output)
    return 0 if passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _report(scenario.parse_scenario(_read(args.file)), args)
        if args.command == "demo":
            return _report(scenario.parse_scenario(scenario.BUILTINS[args.name]), args)
        if args.command == "sweep":
            text = _read(args.file) if args.file else scenario.FOUR_SITUATIONS
            return _report(scenario.parse_scenario(text, overrides=args.set), args)
        return _check(args)
    except (ScenarioError, phase.ChirpError, ScenarioRunError, OSError) as exc:
        print(f"matterwave: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
