"""Query-complexity tables: measured base-oracle calls against the analytic budget."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..params import DESK
from .experiment import ExperimentConfig, run_experiment
from .instances import InstanceSpec


@dataclass(frozen=True)
class BenchRow:
    s: int
    trials: int
    budget: int
    tfd_bound: int
    mean: float
    max: int
    accept_rate: float
    violations: int


def run_bench(
    s_values=(1, 2, 3),
    trials: int = 20,
    seed: int = 0,
    n: int = 12,
    eps=Fraction(1, 4),
    mode: str = DESK,
    overrides: dict | None = None,
) -> list[BenchRow]:
    """Yes-instances with s terms over 6 active variables, one row per s."""
    rows = []
    for s in s_values:
        spec = InstanceSpec("random_dnf", n, s=s, wmin=1, wmax=4, active=min(6, n))
        cfg = ExperimentConfig(spec, s, Fraction(eps), mode, dict(overrides or {}), trials, seed)
        summ = run_experiment(cfg).report["summary"]
        q = summ["queries"]["total"]
        rows.append(
            BenchRow(s, trials, summ["budget"], summ["tfd_bound"], q["mean"], q["max"], summ["accept_rate"], summ["budget_violations"])
        )
    return rows


def is_monotone(rows: list[BenchRow]) -> bool:
    """Budget and mean query count both non-decreasing in s."""
    return all(a.budget <= b.budget and a.mean <= b.mean for a, b in zip(rows, rows[1:]))


def format_rows(rows: list[BenchRow]) -> str:
    head = f"{'s':>2} {'trials':>6} {'budget':>16} {'tfd_bound':>10} {'mean':>12} {'max':>10} {'accept':>7} {'viol':>4}"
    lines = [head]
    for r in rows:
        lines.append(
            f"{r.s:>2} {r.trials:>6} {r.budget:>16} {r.tfd_bound:>10} {r.mean:>12.1f} {r.max:>10} {r.accept_rate:>7.3f} {r.violations:>4}"
        )
    lines.append(f"monotone: {'yes' if is_monotone(rows) else 'no'}")
    return "\n".join(lines)
