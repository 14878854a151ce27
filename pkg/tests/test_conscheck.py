from fractions import Fraction

import numpy as np
from scipy.stats import chisquare

from dnfrt.boolfn import Dnf, Term, all_points
from dnfrt.conscheck import REJECT, SimMqGamma, conj_test, cons_check, sim_mq_gamma, sim_samp_proj
from dnfrt.harness.certify import certify_far
from dnfrt.oracles import FnMQ, FnSAMP, make_mq, make_samp
from dnfrt.params import parameter_schedule

P = parameter_schedule(1, "1/4")
N8 = 8
R8 = 0b1111_0000
XS = all_points(N8)
J_TAB = Dnf.from_lists([[5, 6], [-7]], N8).table()  # the tail, over R


def run_cons_check(head_tab, trials):
    h = head_tab & J_TAB
    j_support = J_TAB & ((XS & ~R8) == 0)
    acc = 0
    for t in range(trials):
        rng = np.random.default_rng(t)
        out = cons_check(
            R8, N8, Fraction(1, 8), make_mq(h, N8), make_samp(h, N8, rng), make_mq(J_TAB, N8), make_samp(j_support, N8, rng), P, rng
        )
        acc += out is None
    return acc / trials


def test_cons_check_yes_case():
    assert run_cons_check(Term.of(1, -3).table(N8), 200) >= 0.9


def test_cons_check_rejects_xor_gamma():
    xor = (((XS >> 0) & 1) ^ ((XS >> 1) & 1)).astype(bool)
    assert certify_far(xor & J_TAB, N8, 1, Fraction(1, 80)).far  # far from every conjunction-shaped head
    assert run_cons_check(xor, 200) <= 0.1


def test_cons_check_zero_mq_star_rejects():
    h = Term.of(1).table(4)
    rng = np.random.default_rng(0)
    zero = FnMQ("zero", [], lambda x: 0)
    out = cons_check(0b1100, 4, Fraction(1, 4), make_mq(h, 4), make_samp(h, 4, rng), zero, make_samp(h, 4, rng), P, rng)
    assert out.reason == "conscheck_mqstar"
    assert zero.calls == 1


def test_sim_mq_gamma_outputs():
    n = 4
    h = Term.of(1, 3).table(n)
    samp_j = make_samp(Term.of(3).table(n) & (all_points(n) & 0b0011 == 0), n, 0)
    assert all(sim_mq_gamma(0b0001, make_mq(h, n), samp_j, Fraction(1, 4), P) == 1 for _ in range(50))
    assert sim_mq_gamma(0b0000, make_mq(h, n), samp_j, Fraction(1, 4), P) == REJECT


def test_sim_mq_gamma_false_positive_rate():
    # h(alpha, w) holds for exactly 3 of the 4 tail points: conditional rate 3/4 < 0.9
    n = 3
    tail = np.zeros(8, dtype=bool)
    tail[[0b000, 0b010, 0b100]] = True  # x1 = 0 and not (x2 and x3)
    h = tail.copy()
    j_support = np.zeros(8, dtype=bool)
    j_support[[0b000, 0b010, 0b100, 0b110]] = True
    eps = Fraction(1, 4)
    k = P.gamma_samples(eps)
    ones = 0
    trials = 2000
    for t in range(trials):
        mq_h = make_mq(h, n)
        g = SimMqGamma(mq_h, make_samp(j_support, n, t), eps, P)
        try:
            ones += g(0) == 1
        except Exception as exc:  # the global reject
            assert getattr(exc, "reason", "") == "conscheck_gamma"
    exact = 0.75**k
    sd = np.sqrt(exact * (1 - exact) / trials)
    assert abs(ones / trials - exact) <= 4 * sd + 1e-9
    assert exact <= 0.9**k


def test_sim_samp_proj_examples():
    n = 2
    x1x2 = Term.of(1, 2).table(n)
    proj = sim_samp_proj(make_samp(x1x2, n, 0), 0b01)
    assert all(proj() == 1 for _ in range(20))
    full = sim_samp_proj(make_samp(x1x2, n, 0), 0b11)
    assert full() == 0b11


def test_sim_samp_proj_marginal():
    n = 6
    f = Dnf.from_lists([[1, 2], [-3, 4], [5]], n).table()
    Y = 0b000111
    sup = np.flatnonzero(f)
    vals, exact = np.unique(sup & Y, return_counts=True)
    proj = sim_samp_proj(make_samp(f, n, 1), Y)
    draws = proj.many(20000)
    obs = np.array([(draws == v).sum() for v in vals])
    assert obs.sum() == 20000
    assert chisquare(obs, exact / exact.sum() * 20000).pvalue > 1e-3


def test_conj_test_accepts_conjunctions_with_any_satisfying_sampler():
    rng = np.random.default_rng(0)
    n = 8
    for t in range(300):
        lits = [int(v) if rng.integers(2) else -int(v) for v in rng.choice(np.arange(1, n + 1), size=int(rng.integers(0, n + 1)), replace=False)]
        C = Term(tuple(lits)).table(n)
        sup = np.flatnonzero(C)
        biased = sup[: max(1, len(sup) // 3)]  # a lopsided satisfying-only sampler
        samp = FnSAMP("bias", [], lambda b=biased: int(b[rng.integers(len(b))]))
        probes = []
        mq = FnMQ("c", [], lambda x, C=C: probes.append(x) or int(C[x]))
        assert conj_test(mq, samp, Fraction(1, 4), P, rng)
        assert all(C[x] for x in probes)


def test_conj_test_singleton_support():
    f = np.zeros(16, dtype=bool)
    f[0b1010] = True
    rng = np.random.default_rng(0)
    assert conj_test(make_mq(f, 4), make_samp(f, 4, 0), Fraction(1, 4), P, rng)


def test_conj_test_rejects_xor():
    xor = np.array([0, 1, 1, 0], dtype=bool)
    cert = certify_far(xor, 2, 1)
    assert cert.reldist == Fraction(1, 2)
    rej = sum(
        not conj_test(make_mq(xor, 2), make_samp(xor, 2, t), Fraction(1, 4), P, np.random.default_rng(t)) for t in range(500)
    )
    assert rej / 500 >= 0.95
