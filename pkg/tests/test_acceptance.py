"""Acceptance criteria 1-10, each printing one PASS/FAIL line.

Run alone with ``pytest -m acceptance -s tests/test_acceptance.py`` or as a
script with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction

import pytest
from scipy.stats import binom

from dnfrt.harness.bench import format_rows, is_monotone, run_bench
from dnfrt.harness.certify import certify_far
from dnfrt.harness.experiment import ExperimentConfig, run_experiment
from dnfrt.harness.instances import InstanceSpec
from dnfrt.harness.structural import adequacy_gap, combine_gaps
from dnfrt.harness.verify import (
    check_candidate_soundness,
    check_clustering,
    check_cube_bound,
    check_learner_exactness,
    check_one_sided,
)
from dnfrt.oracles import derive_seed
from dnfrt.params import parameter_schedule

pytestmark = pytest.mark.acceptance

EPS = Fraction(1, 4)
TARGET = Fraction(2, 3)
ALPHA = 0.05

_cache: dict = {}


def report(k: int, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail}"
    # visible even when pytest captures output
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


def timed(fn, **kw):
    start = time.perf_counter()
    r = fn(**kw)
    return r, time.perf_counter() - start


def fmt_detail(r) -> str:
    return " ".join(f"{k}={v}" for k, v in r.detail.items())


def binomial_ok(successes: int, trials: int) -> tuple[bool, float]:
    """One-sided test of H0: p >= 2/3; pass unless the count is significantly low."""
    p = float(binom.cdf(successes, trials, float(TARGET)))
    return p > ALPHA, p


def yes_runs():
    """Criterion 6 experiments: 100 trials for each s in {1, 2, 3}."""
    if "yes" not in _cache:
        out = {}
        for s in (1, 2, 3):
            spec = InstanceSpec("random_dnf", 16, s=s, wmin=1, wmax=4, active=6)
            out[s] = run_experiment(ExperimentConfig(spec, s, EPS, "desk", {}, 100, 6000 + s))
        _cache["yes"] = out
    return _cache["yes"]


NO_SPECS = (
    (InstanceSpec("far_xor", 8, head_width=2, xor_width=3), 1),
    (InstanceSpec("far_xor", 8, head_width=2, xor_width=3), 2),
    (InstanceSpec("far_random_density", 8, density=0.3), 1),
    (InstanceSpec("far_random_density", 8, density=0.3), 2),
)


def no_runs():
    """Criterion 7 experiments: 4 x 75 trials, each instance certified far."""
    if "no" not in _cache:
        out = []
        for i, (spec, s) in enumerate(NO_SPECS):
            cfg = ExperimentConfig(spec, s, EPS, "desk", {}, 75, 7000 + i)
            res = run_experiment(cfg)
            dists = []
            for rec in res.report["trials"]:
                inst = spec.build(derive_seed(cfg.seed, "instance", rec["trial"]))
                assert inst.digest() == rec["instance"]
                dists.append(certify_far(inst.table, inst.n, s).reldist)
            out.append((spec, s, res, dists))
        _cache["no"] = out
    return _cache["no"]


def test_criterion_1_cube_bound():
    r, sec = timed(check_cube_bound, max_hamming=16, max_k=12)
    report(1, r.passed and sec < 60, f"{r.cases} cube cases, {r.failures} failures, {sec:.1f}s")
    assert r.passed and sec < 60


def test_criterion_2_clustering():
    r, sec = timed(check_clustering, n_dnfs=10_000, K_max=4, table_n_max=14)
    report(2, r.passed and sec < 300, f"{r.cases} DNFs, {r.failures} failures, {sec:.1f}s")
    assert r.passed and sec < 300


def test_criterion_3_one_sided():
    r = check_one_sided(cases=1000)
    report(3, r.passed, f"{r.cases} cases, {r.failures} failures ({fmt_detail(r)})")
    assert r.passed


def test_criterion_4_learner_exactness():
    r = check_learner_exactness(cases=1000)
    report(4, r.passed, f"{r.cases} cases, {r.failures} failures ({fmt_detail(r)})")
    assert r.passed


def test_criterion_5_candidate_soundness():
    r = check_candidate_soundness(mu_max=4, r_max=2)
    report(5, r.passed, f"{r.cases} remapped candidates, {r.failures} failures ({fmt_detail(r)})")
    assert r.passed


def test_criterion_6_yes_case():
    start = time.perf_counter()
    runs = yes_runs()
    parts = []
    ok = True
    total = acc = 0
    for s, res in runs.items():
        summ = res.report["summary"]
        good, p = binomial_ok(summ["accepts"], summ["trials"])
        ok &= good
        total += summ["trials"]
        acc += summ["accepts"]
        parts.append(f"s={s}: {summ['accepts']}/{summ['trials']} (p={p:.3g})")
    good, p = binomial_ok(acc, total)
    ok &= good
    elapsed = time.perf_counter() - start
    report(6, ok, f"accepted {acc}/{total} (p={p:.3g}); " + ", ".join(parts) + f"; {elapsed:.0f}s")
    assert ok


def test_criterion_7_no_case():
    runs = no_runs()
    total = rej = 0
    ok = True
    parts = []
    for spec, s, res, dists in runs:
        far = all(d >= EPS for d in dists)
        ok &= far
        summ = res.report["summary"]
        rejects = summ["trials"] - summ["accepts"]
        total += summ["trials"]
        rej += rejects
        parts.append(f"{spec.kind} s={s}: {rejects}/{summ['trials']} rejected, min reldist {min(dists)}")
    good, p = binomial_ok(rej, total)
    ok &= good
    report(7, ok, f"rejected {rej}/{total} (p={p:.3g}); " + "; ".join(parts))
    assert ok


def test_criterion_8_adequacy_gap():
    spec = InstanceSpec("random_dnf", 12, s=2, wmin=1, wmax=4, active=6)
    params = parameter_schedule(2, EPS)
    gaps = []
    for i in range(20):
        inst = spec.build(derive_seed(8, "adequacy", i))
        gaps.append(adequacy_gap(inst.table, 12, 2, EPS, params, 20, 800 + i, inst.dnf))
    g = combine_gaps(gaps)
    ok = g.used >= 380 and g.within(0.15)
    report(
        8, ok,
        f"{g.used} paired trials, accept {g.accept_star} (MQ*/SAMP*) vs {g.accept_perfect} (perfect), "
        f"gap {g.gap:+.4f}, 95% CI [{g.ci_low:+.4f}, {g.ci_high:+.4f}]",
    )
    assert ok


def test_criterion_9_query_accounting():
    viol = tfd_viol = trials = 0
    for res in list(yes_runs().values()) + [r for _, _, r, _ in no_runs()]:
        summ = res.report["summary"]
        viol += summ["budget_violations"]
        tfd_viol += summ["tfd_bound_violations"]
        trials += summ["trials"]
    rows = run_bench((1, 2, 3), trials=10, seed=9)
    bench_viol = sum(r.violations for r in rows)
    ok = viol == 0 and tfd_viol == 0 and bench_viol == 0 and is_monotone(rows)
    detail = f"{trials} trials, {viol} budget / {tfd_viol} tfd-bound violations; bench monotone={is_monotone(rows)}"
    report(9, ok, detail)
    sys.__stdout__.write(format_rows(rows) + "\n")
    assert ok


def test_criterion_10_reproducibility(tmp_path, monkeypatch):
    spec = InstanceSpec("random_dnf", 12, s=2, wmin=1, wmax=4, active=6)
    texts = []
    for run, threads in enumerate(("1", "1", "2")):
        monkeypatch.setenv("DNFRT_THREADS", threads)
        path = tmp_path / f"run{run}.json"
        run_experiment(ExperimentConfig(spec, 2, EPS, "desk", {}, 6, 10, str(path)))
        texts.append(path.read_bytes())
    ok = texts[0] == texts[1] == texts[2]
    report(10, ok, f"3 runs ({len(texts[0])} bytes each), identical={ok}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", *sys.argv[1:]]))
