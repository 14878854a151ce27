"""Consistency check of h against (conjunction on R-bar) AND (learned J on R)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .boolfn import random_bits
from .oracles import MQ, SAMP, FnMQ, FnSAMP, Oracle, Simulator, draw_many, query_many
from .params import ParameterSet
from .verdict import GlobalReject, Reject

REJECT = "reject"


class SimMqGamma(Simulator):
    """MQ for Gamma(alpha): 1 if h(alpha, w) holds for every drawn w ~ SAMP*, else halt."""

    def __init__(self, mq_h: Oracle, samp_j: Oracle, eps, params: ParameterSet):
        super().__init__("mq_gamma", [mq_h, samp_j], MQ)
        self.mq_h = mq_h
        self.samp_j = samp_j
        self.k = params.gamma_samples(Fraction(eps))

    def _one(self, alpha):
        ws = draw_many(self.samp_j, self.k)
        if query_many(self.mq_h, int(alpha) | ws).all():
            return 1
        raise GlobalReject("conscheck_gamma")


def sim_mq_gamma(alpha: int, mq_h: Oracle, samp_j: Oracle, eps, params: ParameterSet):
    """1 or the distinguished REJECT value; never 0."""
    try:
        return SimMqGamma(mq_h, samp_j, eps, params)._one(alpha)
    except GlobalReject:
        return REJECT


def sim_samp_proj(samp: Oracle, Y: int) -> FnSAMP:
    """SAMP over the coordinates Y: one base draw, projected."""
    if Y == 0:
        raise ValueError("projection needs a nonempty coordinate set")
    return FnSAMP("samp_proj", [samp], lambda: samp() & Y, lambda m: draw_many(samp, m) & Y)


def anti_monotone_conj_test(mq: Oracle, samp: Oracle, eps, params: ParameterSet, rng: np.random.Generator) -> bool:
    """Accepts iff every membership probe returns 1."""
    for _ in range(params.conj_rounds(Fraction(eps))):
        x = samp()
        y = samp()
        if not mq(x ^ y):
            return False
    for _ in range(params.conj_phase2):
        x = samp()
        y = x & random_bits(rng, x)  # keep each 1 of x with probability 1/2
        u = samp()
        if not mq(y ^ u):
            return False
    return True


def conj_test(mq: Oracle, samp: Oracle, eps, params: ParameterSet, rng: np.random.Generator) -> bool:
    """Shift by one satisfying sample, then test for an anti-monotone conjunction."""
    y0 = samp()
    mq_y = FnMQ("mq_shift", [mq], lambda x: mq(x ^ y0))
    samp_y = FnSAMP("samp_shift", [samp], lambda: samp() ^ y0)
    return anti_monotone_conj_test(mq_y, samp_y, eps, params, rng)


def cons_check(
    R: int,
    n: int,
    eps,
    mq_h: Oracle,
    samp_h: Oracle,
    mq_j: Oracle,
    samp_j: Oracle,
    params: ParameterSet,
    rng: np.random.Generator,
) -> Reject | None:
    """None means Accept."""
    eps = Fraction(eps)
    rounds = params.conscheck_rounds(eps)
    Rbar = ((1 << n) - 1) & ~R
    cp = params.cross_points
    for _ in range(rounds):
        z = samp_h()
        if not mq_j(z & R):
            return Reject("conscheck_mqstar")
        vs = draw_many(samp_j, cp)
        if not query_many(mq_h, (z & Rbar) | vs).all():
            return Reject("conscheck_cross")
    for _ in range(rounds):
        z = samp_h()
        v = samp_j()
        if not mq_h((z & Rbar) | v):
            return Reject("conscheck_recombine")
    mq_gamma = SimMqGamma(mq_h, samp_j, eps, params)
    # R-bar may be empty (Gamma of arity 0); the projection is then the empty point
    samp_proj = FnSAMP("samp_proj", [samp_h], lambda: samp_h() & Rbar, lambda m: draw_many(samp_h, m) & Rbar)
    try:
        ok = conj_test(mq_gamma, samp_proj, eps / 10, params, rng)
    except GlobalReject as exc:
        return Reject(exc.reason)
    return None if ok else Reject("conscheck_conjtest")
