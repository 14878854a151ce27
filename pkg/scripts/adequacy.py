"""Paired adequacy gap: Test-Factored-DNF under pool simulators vs perfect oracles.

Example:
    python3 scripts/adequacy.py --s 2 --instances 20 --trials 20
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from dnfrt.harness.instances import InstanceSpec
from dnfrt.harness.structural import adequacy_gap, combine_gaps
from dnfrt.oracles import derive_seed
from dnfrt.params import parameter_schedule


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--eps", default="1/4")
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--trials", type=int, default=20, help="paired trials per instance")
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    eps = Fraction(args.eps)
    spec = InstanceSpec("random_dnf", args.n, s=args.s, wmin=1, wmax=4, active=min(6, args.n))
    params = parameter_schedule(args.s, eps)
    gaps = []
    for i in range(args.instances):
        inst = spec.build(derive_seed(args.seed, "adequacy", i))
        g = adequacy_gap(inst.table, args.n, args.s, eps, params, args.trials, args.seed * 100 + i, inst.dnf)
        gaps.append(g)
        print(f"instance {i:3d}: used={g.used} star={g.accept_star} perfect={g.accept_perfect}", flush=True)
    g = combine_gaps(gaps)
    print(f"pooled: {g.used} trials, gap={g.gap:+.4f}, 95% CI [{g.ci_low:+.4f}, {g.ci_high:+.4f}], within 0.15: {g.within(0.15)}")


if __name__ == "__main__":
    main()
