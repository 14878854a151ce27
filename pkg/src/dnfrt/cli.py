"""Command-line entry point: ``dnfrt test | verify | bench``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .errors import DnfrtError
from .params import DESK, THEORY, parse_rational


def _overrides(items: list[str] | None) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"override {item!r} is not key=value")
        out[key.strip()] = val.strip()
    return out


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dnfrt", description="Relative-error tester for s-term DNFs")
    sub = p.add_subparsers(dest="cmd", required=True)

    t = sub.add_parser("test", help="run seeded Test-DNF trials on an instance")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--s", type=int, required=True)
    t.add_argument("--eps", type=_rational, required=True, help="distance, e.g. 1/4")
    t.add_argument("--mode", choices=(DESK, THEORY), default=DESK)
    t.add_argument("--trials", type=int, default=10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--instance", required=True, help="kind:key=val,... or a DNF / truth-table file")
    t.add_argument("--out", default=None, help="report path (.json) or directory")
    t.add_argument("--override", action="append", metavar="KEY=VALUE", help="parameter override (repeatable)")

    v = sub.add_parser("verify", help="run the lemma-property suite")
    v.add_argument("--quick", action="store_true", help="smaller sweeps")

    b = sub.add_parser("bench", help="query-complexity table over s")
    b.add_argument("--s", type=int, nargs="+", default=[1, 2, 3])
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--n", type=int, default=12)
    b.add_argument("--eps", type=_rational, default=parse_rational("1/4"))
    b.add_argument("--json", action="store_true", help="emit rows as JSON")
    b.add_argument("--override", action="append", metavar="KEY=VALUE")
    return p


def cmd_test(args) -> int:
    from .harness.experiment import ExperimentConfig, run_experiment
    from .harness.instances import parse_instance_spec

    spec = parse_instance_spec(args.instance)
    if spec.kind != "file" and spec.n != args.n:
        raise DnfrtError(f"--n {args.n} disagrees with the instance's n={spec.n}")
    cfg = ExperimentConfig(spec, args.s, args.eps, args.mode, _overrides(args.override), args.trials, args.seed, args.out)
    res = run_experiment(cfg)
    summ = res.report["summary"]
    print(
        f"trials={summ['trials']} accept_rate={summ['accept_rate']:.3f} "
        f"mean_queries={summ['queries']['total']['mean']:.1f} budget_violations={summ['budget_violations']}"
    )
    if args.out:
        from .harness.experiment import report_paths

        j, c = report_paths(args.out)
        print(f"wrote {j} and {c}")
    return 0


def cmd_verify(args) -> int:
    from .harness.verify import run_all

    ok = True
    for r in run_all(quick=args.quick):
        print(r.line(), flush=True)
        ok &= r.passed
    return 0 if ok else 1


def cmd_bench(args) -> int:
    from .harness.bench import format_rows, is_monotone, run_bench

    rows = run_bench(tuple(args.s), args.trials, args.seed, args.n, args.eps, overrides=_overrides(args.override))
    if args.json:
        print(json.dumps({"rows": [asdict(r) for r in rows], "monotone": is_monotone(rows)}, indent=2))
    else:
        print(format_rows(rows))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {"test": cmd_test, "verify": cmd_verify, "bench": cmd_bench}[args.cmd](args)
    except (DnfrtError, KeyError, ValueError) as exc:
        print(f"dnfrt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
