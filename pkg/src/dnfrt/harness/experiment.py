"""Seeded experiment runner: trials in parallel, JSON + CSV reports."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..budget import test_dnf_budget
from ..errors import DnfrtError
from ..oracles import derive_seed, make_mq, make_samp
from ..params import DESK, ParameterSet, parameter_schedule, runnable
from ..tester import test_dnf
from .instances import InstanceSpec

CSV_COLUMNS = ("trial", "seed", "verdict", "reason", "r_vector", "mq_calls", "samp_calls", "wall_ms")


@dataclass
class ExperimentConfig:
    instance: InstanceSpec
    s: int
    eps: Fraction
    mode: str = DESK
    overrides: dict = field(default_factory=dict)
    trials: int = 10
    seed: int = 0
    out: str | None = None

    def to_dict(self) -> dict:
        """Everything that determines the results (the output path does not)."""
        return {
            "instance": self.instance.to_dict(),
            "s": self.s,
            "eps": f"{Fraction(self.eps).numerator}/{Fraction(self.eps).denominator}",
            "mode": self.mode,
            "overrides": {k: str(v) for k, v in sorted(self.overrides.items())},
            "trials": self.trials,
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def params(self) -> ParameterSet:
        return parameter_schedule(self.s, self.eps, self.mode, self.overrides)


def run_trial(cfg: ExperimentConfig, params: ParameterSet, t: int) -> dict:
    seed = derive_seed(cfg.seed, "trial", t)
    inst = cfg.instance.build(derive_seed(cfg.seed, "instance", t))
    n = inst.n
    mq = make_mq(inst.table, n)
    samp = make_samp(inst.table, n, derive_seed(seed, "samp"))
    trace: dict = {}
    start = time.perf_counter()
    v = test_dnf(mq, samp, cfg.s, cfg.eps, params, np.random.default_rng(seed), n, trace)
    wall_ms = (time.perf_counter() - start) * 1000.0
    pools = trace["ffd"].pools
    return {
        "trial": t,
        "seed": seed,
        "instance": inst.digest(),
        "expected": cfg.instance.expect_yes,
        "verdict": "accept" if v.accept else "reject",
        "reason": v.reason,
        "r_vector": v.r_vector,
        "mq_calls": mq.calls,
        "samp_calls": samp.calls,
        "queries": mq.calls + samp.calls,
        "pools": len(pools),
        "max_tfd_queries": trace["max_tfd_queries"],
        "wall_ms": wall_ms,
    }


def _job(args) -> dict:
    cfg, params, t = args
    return run_trial(cfg, params, t)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DNFRT_THREADS", "1")))
    except ValueError:
        return 1


def _stats(values: list[int]) -> dict:
    if not values:
        return {"mean": 0.0, "max": 0, "p50": 0.0, "p90": 0.0, "p99": 0.0}
    a = np.asarray(values, dtype=float)
    return {
        "mean": round(float(a.mean()), 6),
        "max": int(a.max()),
        "p50": round(float(np.percentile(a, 50)), 6),
        "p90": round(float(np.percentile(a, 90)), 6),
        "p99": round(float(np.percentile(a, 99)), 6),
    }


def summarize(records: list[dict], budget: int, Q: int) -> dict:
    acc = sum(r["verdict"] == "accept" for r in records)
    known = [r for r in records if r["expected"] is not None]
    correct = sum((r["verdict"] == "accept") == r["expected"] for r in known)
    reasons: dict[str, int] = {}
    for r in records:
        reasons[r["reason"]] = reasons.get(r["reason"], 0) + 1
    return {
        "trials": len(records),
        "accepts": acc,
        "accept_rate": round(acc / len(records), 6) if records else 0.0,
        "correct": correct,
        "correct_rate": round(correct / len(known), 6) if known else None,
        "reasons": dict(sorted(reasons.items())),
        "queries": {
            "mq": _stats([r["mq_calls"] for r in records]),
            "samp": _stats([r["samp_calls"] for r in records]),
            "total": _stats([r["queries"] for r in records]),
        },
        "total_queries": sum(r["queries"] for r in records),
        "budget": budget,
        "budget_violations": sum(r["queries"] > budget for r in records),
        "tfd_bound": Q,
        "tfd_bound_violations": sum(r["max_tfd_queries"] > Q for r in records),
    }


@dataclass
class ExperimentResult:
    report: dict
    records: list[dict]

    def json_text(self) -> str:
        return json.dumps(self.report, sort_keys=True, indent=2) + "\n"


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run all trials and (if ``cfg.out`` is set) write ``<out>.json`` and ``<out>.csv``."""
    params = cfg.params()
    if not runnable(params):
        raise DnfrtError("these parameters are not runnable (theory-mode sample counts); use desk mode")
    budget = test_dnf_budget(params)
    jobs = [(cfg, params, t) for t in range(cfg.trials)]
    workers = min(_threads(), max(1, cfg.trials))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_job, jobs))
    else:
        records = [_job(j) for j in jobs]
    records.sort(key=lambda r: r["trial"])
    # wall-clock times vary between runs, so they only go to the CSV
    clean = [{k: v for k, v in r.items() if k != "wall_ms"} for r in records]
    report = {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "params": params.provenance(),
        "trials": clean,
        "summary": summarize(records, budget, params.Q),
    }
    res = ExperimentResult(report, records)
    if cfg.out:
        write_reports(res, cfg.out)
    return res


def report_paths(out: str | Path) -> tuple[Path, Path]:
    out = Path(out)
    if out.suffix == ".json":
        return out, out.with_suffix(".csv")
    return out / "report.json", out / "trials.csv"


def write_reports(res: ExperimentResult, out: str | Path) -> tuple[Path, Path]:
    jpath, cpath = report_paths(out)
    try:
        jpath.parent.mkdir(parents=True, exist_ok=True)
        jpath.write_text(res.json_text())
        with open(cpath, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in res.records:
                rv = " ".join("-" if x is None else str(x) for x in r["r_vector"])
                w.writerow([r["trial"], r["seed"], r["verdict"], r["reason"], rv, r["mq_calls"], r["samp_calls"], f"{r['wall_ms']:.1f}"])
    except OSError as exc:
        raise DnfrtError(f"cannot write report to {jpath} / {cpath}: {exc}") from exc
    return jpath, cpath


def config_from_dict(d: dict) -> ExperimentConfig:
    inst = InstanceSpec(**d["instance"])
    return ExperimentConfig(
        inst, int(d["s"]), Fraction(d["eps"]), d.get("mode", DESK), dict(d.get("overrides", {})),
        int(d.get("trials", 10)), int(d.get("seed", 0)), d.get("out"),
    )


__all__ = ["ExperimentConfig", "ExperimentResult", "run_experiment", "run_trial", "write_reports"]
