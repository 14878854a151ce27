"""Test-Factored-DNF and the top-level Test-DNF driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conscheck import cons_check
from .learner import LearnerResult, compute_R, dnf_learner
from .oracles import Oracle, draw_many, spawn_seed
from .params import ParameterSet
from .pooling import FfdTrace, PoolPair, find_factored_dnfs
from .verdict import Reject, Verdict


def _totals(*handles: Oracle) -> int:
    return sum(h.calls for h in handles)


def test_factored_dnf(
    mq: Oracle,
    samp: Oracle,
    r: int,
    eps,
    params: ParameterSet,
    rng: np.random.Generator,
    n: int,
) -> Verdict:
    """Is h (given by mq/samp) close to an (r, mu)-factored DNF?"""
    eps = Fraction(eps)
    sched = params.schedule(eps, r)
    before = _totals(mq, samp)
    mq0, samp0 = mq.calls, samp.calls

    def done(accept: bool, reason: str) -> Verdict:
        report = {
            "mq_calls": mq.calls - mq0,
            "samp_calls": samp.calls - samp0,
            "queries": _totals(mq, samp) - before,
        }
        return Verdict(accept, reason, [r], report)

    samples = draw_many(samp, sched.samples)
    R = compute_R(samples.tolist())
    if R == 0:
        return done(True, "tfd_R_empty")
    learned = dnf_learner(R, mq, samp, r, params, sched, rng)
    if isinstance(learned, Reject):
        return done(False, learned.reason)
    bad = cons_check(R, n, eps, mq, samp, learned.pair.mq, learned.pair.samp, params, rng)
    if bad is not None:
        return done(False, bad.reason)
    return done(True, "tfd_accept")


test_factored_dnf.__test__ = False


@dataclass
class SweepRecord:
    pool_id: int
    r: int
    accepts: int
    rejects: int
    reasons: list[str] = field(default_factory=list)


def majority_vote(run, reps: int) -> tuple[bool, int, int, list[str]]:
    """Run up to ``reps`` trials, stopping once the majority is decided; ties reject."""
    acc = rej = 0
    reasons = []
    for _ in range(reps):
        v = run()
        reasons.append(v.reason)
        if v.accept:
            acc += 1
        else:
            rej += 1
        if 2 * acc > reps or 2 * rej >= reps:
            break
    return 2 * acc > reps, acc, rej, reasons


def test_dnf(
    mq: Oracle,
    samp: Oracle,
    s: int,
    eps,
    params: ParameterSet,
    rng: np.random.Generator,
    n: int,
    trace: dict | None = None,
) -> Verdict:
    """Relative-error test for being an s-term DNF."""
    eps = Fraction(eps)
    if s < 1 or not (0 < eps <= Fraction(1, 2)):
        raise ValueError("need s >= 1 and 0 < eps <= 1/2")
    if trace is None:
        trace = {}
    mq0, samp0 = mq.calls, samp.calls

    def finish(v: Verdict) -> Verdict:
        v.query_report = {"mq_calls": mq.calls - mq0, "samp_calls": samp.calls - samp0}
        v.query_report["queries"] = v.query_report["mq_calls"] + v.query_report["samp_calls"]
        v.params_provenance = {"mode": params.mode, "s": s, "eps": f"{eps.numerator}/{eps.denominator}"}
        return v

    ffd_trace = FfdTrace()
    trace["ffd"] = ffd_trace
    trace["sweeps"] = []
    trace["max_tfd_queries"] = 0
    pairs = find_factored_dnfs(mq, samp, s, eps, params, rng, ffd_trace)
    if isinstance(pairs, Reject):
        return finish(Verdict(False, pairs.reason, []))
    trace["pairs"] = pairs
    eps_t = eps / (2 * s)
    r_vector: list[int] = []
    for pair in pairs:
        r_i = None
        for r in range(1, s + 1):

            def run():
                v = test_factored_dnf(pair.mq, pair.samp, r, eps_t, params, np.random.default_rng(spawn_seed(rng)), n)
                trace["max_tfd_queries"] = max(trace["max_tfd_queries"], v.query_report["queries"])
                return v

            ok, acc, rej, reasons = majority_vote(run, params.reps)
            trace["sweeps"].append(SweepRecord(pair.pool.id if pair.pool else -1, r, acc, rej, reasons))
            if ok:
                r_i = r
                break
        if r_i is None:
            return finish(Verdict(False, "no_accepting_r", r_vector + [None]))
        r_vector.append(r_i)
        if sum(r_vector) > s:
            return finish(Verdict(False, "sum_r_exceeds_s", r_vector))
    return finish(Verdict(True, "accept", r_vector))


test_dnf.__test__ = False
