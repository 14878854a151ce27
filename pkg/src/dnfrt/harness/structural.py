"""Exact evaluation of the analysis predicates (dense cubes, stability, attraction)
and a sampled estimate of the adequacy gap of the pool simulators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..boolfn import Dnf, FactoredDnf, Term, as_table, check_dim, coords_of
from ..errors import CapExceeded, EmptySupport
from ..oracles import make_mq, make_samp, spawn_seed
from ..params import ParameterSet
from ..pooling import FfdTrace, find_factored_dnfs, pool_terms
from ..tester import test_factored_dnf

STRUCT_N_CAP = 16


def _cap(n: int) -> None:
    if n > STRUCT_N_CAP:
        raise CapExceeded(f"structural oracles need n <= {STRUCT_N_CAP}")
    check_dim(n)


def cube_density(f, a: int, b: int, n: int) -> Fraction:
    """Exact fraction of Cube(a, b) inside f^-1(1)."""
    _cap(n)
    sup = np.flatnonzero(as_table(f, n))
    diff = a ^ b
    inside = int(np.count_nonzero(((sup ^ a) & ~diff) == 0))
    return Fraction(inside, 1 << diff.bit_count())


def is_dense(f, a: int, b: int, n: int, threshold) -> bool:
    return cube_density(f, a, b, n) >= Fraction(threshold)


def cube_sat_fraction(T: Term, a: int, b: int) -> Fraction:
    """Exact fraction of Cube(a, b) satisfying the term T (no enumeration needed)."""
    diff = a ^ b
    if ((a ^ T.val) & T.mask & ~diff) != 0:
        return Fraction(0)
    return Fraction(1, 1 << (T.mask & diff).bit_count())


def is_attracted(f, T: Term, pool_members, n: int, threshold) -> bool:
    """Does a threshold-fraction of T's points form a dense cube with some pool member?"""
    _cap(n)
    tab = as_table(f, n)
    sup = np.flatnonzero(tab)
    pts = np.flatnonzero(T.table(n))
    thr = Fraction(threshold)
    good = 0
    for bpt in pts.tolist():
        for apt in pool_members:
            diff = apt ^ bpt
            inside = int(np.count_nonzero(((sup ^ apt) & ~diff) == 0))
            if Fraction(inside, 1 << diff.bit_count()) >= thr:
                good += 1
                break
    return Fraction(good, len(pts)) >= thr


@dataclass(frozen=True)
class Stability:
    stable: bool
    V: int  # coordinates outside R that matter
    u: int  # most common assignment to V among satisfying points
    mass_off: Fraction  # Pr_{z ~ h^-1(1)}[z_V != u]


def stability(h: FactoredDnf, R: int, n: int) -> Stability:
    """Exact Pr[z_V != u] for the best u; stable means head vars avoid R and that mass <= xi."""
    _cap(n)
    S = 0
    for t in h.tail:
        S |= t.mask
    full = (1 << n) - 1
    V = full & ~R & (S | h.head.mask)
    sup = np.flatnonzero(h.table(n))
    if len(sup) == 0:
        raise EmptySupport("stability of the zero function")
    proj = sup & V
    vals, counts = np.unique(proj, return_counts=True)
    k = int(np.argmax(counts))
    u = int(vals[k])
    off = Fraction(len(sup) - int(counts[k]), len(sup))
    head_ok = (h.head.mask & R) == 0
    return Stability(head_ok, V, u, off)


def is_stable(h: FactoredDnf, R: int, xi, n: int) -> bool:
    st = stability(h, R, n)
    return st.stable and st.mass_off <= Fraction(xi)


def dominating_function(h: FactoredDnf, R: int, n: int) -> np.ndarray:
    """h with V pinned to u and the rest of R-bar at 0, as a table over R.

    Entry y of the result is indexed by the compressed coordinates of R in
    increasing order (bit j is the j-th coordinate of R).
    """
    st = stability(h, R, n)
    coords = coords_of(R)
    y = np.arange(1 << len(coords), dtype=np.int64)
    x = np.full(len(y), st.u, dtype=np.int64)
    for j, c in enumerate(coords):
        x |= ((y >> j) & 1) << (c - 1)
    return h.to_dnf().eval_many(x)


@dataclass(frozen=True)
class AdequacyGap:
    trials: int
    used: int  # trials where a heavy pool existed
    accept_star: int
    accept_perfect: int
    gap: float
    ci_low: float
    ci_high: float
    diffs: tuple[int, ...] = field(default=(), repr=False)

    def within(self, bound: float = 0.15) -> bool:
        return -bound <= self.ci_low and self.ci_high <= bound


def adequacy_gap(
    table: np.ndarray, n: int, s: int, eps, params: ParameterSet, trials: int, seed: int, f=None
) -> AdequacyGap:
    """Paired accept rates of Test-Factored-DNF under (MQ*, SAMP*) and under perfect oracles of h_P.

    Each trial runs pool construction, takes the first heavy pool P with
    r = |terms(P)|, and runs both versions with the same seed.  The CI is the
    normal interval for the mean paired difference.
    """
    _cap(n)
    if f is None or not isinstance(f, Dnf):
        raise ValueError("adequacy gap needs the DNF representation to form h_P")
    eps = Fraction(eps)
    eps_t = eps / (2 * s)
    diffs = []
    acc_s = acc_p = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        mq = make_mq(table, n)
        samp = make_samp(table, n, spawn_seed(rng))
        pairs = find_factored_dnfs(mq, samp, s, eps, params, rng, FfdTrace())
        if not isinstance(pairs, list) or not pairs:
            continue
        pair = pairs[0]
        idx = pool_terms(f, pair.pool)
        if not idx:
            continue
        hP = Dnf(tuple(f.terms[i] for i in idx), n)
        r = min(len(idx), params.enum_r_cap)
        run_seed = spawn_seed(rng)
        v1 = test_factored_dnf(pair.mq, pair.samp, r, eps_t, params, np.random.default_rng(run_seed), n)
        htab = hP.table()
        v2 = test_factored_dnf(
            make_mq(htab, n, "h"), make_samp(htab, n, run_seed, "h"), r, eps_t, params, np.random.default_rng(run_seed), n
        )
        acc_s += v1.accept
        acc_p += v2.accept
        diffs.append(int(v1.accept) - int(v2.accept))
    return _gap(trials, acc_s, acc_p, diffs)


def _gap(trials: int, acc_s: int, acc_p: int, diffs) -> AdequacyGap:
    m = len(diffs)
    if m == 0:
        return AdequacyGap(trials, 0, 0, 0, 0.0, -1.0, 1.0)
    d = np.asarray(diffs, dtype=float)
    mean = float(d.mean())
    sd = float(d.std(ddof=1)) if m > 1 else 0.0
    half = 1.959963984540054 * sd / math.sqrt(m)
    return AdequacyGap(trials, m, acc_s, acc_p, mean, mean - half, mean + half, tuple(diffs))


def combine_gaps(gaps: list[AdequacyGap]) -> AdequacyGap:
    """Pool the paired trials of several runs into one interval."""
    diffs = [d for g in gaps for d in g.diffs]
    return _gap(sum(g.trials for g in gaps), sum(g.accept_star for g in gaps), sum(g.accept_perfect for g in gaps), diffs)
