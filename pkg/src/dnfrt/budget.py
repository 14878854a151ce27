"""Worst-case query bounds that mirror the loop structure of the implementation.

``tfd_query_bound`` counts MQ(h) + SAMP(h) calls of one Test-Factored-DNF
run; ``test_dnf_budget`` counts base MQ(f) + SAMP(f) calls of a whole
Test-DNF run assuming no memoization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class TfdCost:
    mq: int
    samp: int

    @property
    def total(self) -> int:
        return self.mq + self.samp


def _log2c(x: int) -> int:
    return max(0, math.ceil(math.log2(max(1, x))))


def tfd_cost(params, r: int, eps=None) -> TfdCost:
    eps = Fraction(params.tfd_eps if eps is None else eps)
    sch = params.schedule(eps, r)
    mu = params.mu
    ell = mu
    samp = sch.samples
    mq = 0
    # approximate: at most mu+2 phases of t* iterations, mu+1 searches
    samp += (mu + 2) * sch.t_star
    mq += (mu + 2) * sch.t_star + (mu + 1) * _log2c(params.tau)
    # find candidate
    samp += sch.eta
    mq += sch.eta * ell * 2 * params.extract_rounds(Fraction(1, 2))
    # check lit: junta phases, each a full sweep (chunked) plus a search, and the probes
    rounds = params.junta_rounds(1)
    chunked = 32 * math.ceil(rounds / 32)
    per_entry = 3 * (2 * chunked + _log2c(params.junta_blocks(1))) + 2 * params.checklit_probes
    mq += ell * per_entry
    # simulator costs in MQ(h) calls
    sim = ell * 2 * params.extract_rounds(sch.kappa)
    rounds1 = params.conscheck_rounds(eps)
    cp = params.cross_points
    samp += rounds1 * 2
    mq += rounds1 * (sim + cp * sim + cp) + rounds1 * (sim + 1)
    # conjunction test on (Sim-MQ-Gamma, projected SAMP(h))
    eps_c = eps / 10
    p1 = params.conj_rounds(eps_c)
    p2 = params.conj_phase2
    g = params.gamma_samples(eps)
    samp += 1 + 2 * (p1 + p2)
    mq += (p1 + p2) * g * (sim + 1)
    return TfdCost(mq, samp)


def tfd_query_bound(params, r: int, eps=None) -> int:
    return tfd_cost(params, r, eps).total


def ffd_budget(params) -> int:
    s = params.s
    P = params.pool_samples
    eq = params.eq_samples
    samp = P + s * params.merge_samples + params.omega
    mq = (P * (P - 1) // 2) * eq
    mq += s * params.merge_samples * P * eq
    mq += params.omega * P * params.in_pool_reps
    return samp + mq


def test_dnf_budget(params) -> int:
    """Upper bound on base MQ(f) + SAMP(f) calls of one Test-DNF run."""
    s = params.s
    P = params.pool_samples
    mq_star = 1 + P * params.in_pool_reps
    samp_star = params.samp_star_reps * (1 + mq_star)
    total = ffd_budget(params)
    for r in range(1, s + 1):
        c = tfd_cost(params, r)
        total += s * params.reps * (c.mq * mq_star + c.samp * samp_star)
    return total


test_dnf_budget.__test__ = False
