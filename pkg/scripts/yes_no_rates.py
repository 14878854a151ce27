"""Accept/reject rates of Test-DNF across instance families.

Example:
    python3 scripts/yes_no_rates.py --trials 40 --out runs/rates.json
"""

from __future__ import annotations

import argparse
import json
from fractions import Fraction

from dnfrt.harness.experiment import ExperimentConfig, run_experiment
from dnfrt.harness.instances import InstanceSpec

FAMILIES = {
    "yes_active6": lambda s: InstanceSpec("random_dnf", 16, s=s, wmin=1, wmax=4, active=6),
    "yes_unrestricted": lambda s: InstanceSpec("random_dnf", 16, s=s, wmin=1, wmax=4),
    "yes_wide": lambda s: InstanceSpec("random_dnf", 16, s=s, wmin=2, wmax=6),
    "no_xor": lambda s: InstanceSpec("far_xor", 8, head_width=2, xor_width=3),
    "no_density": lambda s: InstanceSpec("far_random_density", 8, density=0.3),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", nargs="+", default=list(FAMILIES))
    ap.add_argument("--s", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", default="1/4")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--out", default=None, help="write all summaries to this JSON file")
    args = ap.parse_args()

    overrides = dict(item.split("=", 1) for item in args.override)
    rows = []
    for fam in args.families:
        for s in args.s:
            cfg = ExperimentConfig(FAMILIES[fam](s), s, Fraction(args.eps), "desk", overrides, args.trials, args.seed)
            summ = run_experiment(cfg).report["summary"]
            row = {"family": fam, "s": s, "accept_rate": summ["accept_rate"], "reasons": summ["reasons"],
                   "mean_queries": summ["queries"]["total"]["mean"]}
            rows.append(row)
            print(f"{fam:18s} s={s} accept={summ['accept_rate']:.3f} reasons={summ['reasons']}", flush=True)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
