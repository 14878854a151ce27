"""The lemma-property suite: exact checks with brute-force ground truth.

Each check returns a CheckResult; ``run_all`` drives them for ``dnfrt verify``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from ..boolfn import Dnf, Subcube, Term, all_points, dist_point_term
from ..clustering import cluster_to_factored, k_clustering, sub_dnf
from ..dnf_approx import enumerate_dnf_approx
from ..learner import SimMqJ, SimSampJ, VarEntry, VariableOracleList, extract_many
from ..conscheck import conj_test
from ..oracles import FnMQ, FnSAMP, RandomTape, make_mq, spawn_seed
from ..params import parameter_schedule
from ..pooling import Pool, in_pool, test_equivalence
from .certify import certify_far
from .instances import WidthDist, gen_random_dnf


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: int = 0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = " ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{tag} {self.name}: cases={self.cases} failures={self.failures} {extra}".rstrip()


# --- cube bound ---------------------------------------------------------------


def _cube_fraction_brute(a: int, b: int, T: Term) -> Fraction:
    pts = Subcube(a, b).members()
    return Fraction(int(np.count_nonzero(T.eval_many(pts))), len(pts))


def check_cube_bound(max_hamming: int = 16, max_k: int = 12, small_n: int = 4) -> CheckResult:
    """Fraction of Cube(a, b) satisfying T is at most 2^-k when a or b is k-far from T.

    Two sweeps: every (a, b, T) at n = small_n, and one representative per
    symmetry class with Hamming distance up to ``max_hamming``.  Representatives
    use a = 0, b = 1^d, p / q literals of T agreeing with b / a inside the
    differing block and u / v literals agreeing / disagreeing with a outside.
    Cube fractions are counted by enumerating the cube.
    """
    cases = fails = 0
    pts = all_points(small_n)
    for t in itertools.product((0, 1, 2), repeat=small_n):
        T = Term(tuple((i + 1) if d == 1 else -(i + 1) for i, d in enumerate(t) if d))
        sat = T.eval_many(pts)
        for a in range(1 << small_n):
            da = dist_point_term(a, T)
            diff = a ^ pts
            for b in range(1 << small_n):
                k = max(da, dist_point_term(b, T))
                if k > max_k:
                    continue
                inside = ((pts ^ a) & ~diff[b]) == 0
                frac = Fraction(int(np.count_nonzero(sat & inside)), int(np.count_nonzero(inside)))
                cases += 1
                fails += frac > Fraction(1, 1 << k)
    classes = 0
    for d in range(max_hamming + 1):
        b = (1 << d) - 1
        for p in range(d + 1):
            for q in range(d - p + 1):
                for u in range(3):
                    for v in range(3):
                        lits = list(range(1, p + 1)) + [-(p + j + 1) for j in range(q)]
                        lits += [-(d + j + 1) for j in range(u)] + [d + u + j + 1 for j in range(v)]
                        T = Term(tuple(lits))
                        k = max(dist_point_term(0, T), dist_point_term(b, T))
                        if k > max_k:
                            continue
                        frac = _cube_fraction_brute(0, b, T)
                        classes += 1
                        fails += frac > Fraction(1, 1 << k)
    return CheckResult("cube_bound", fails == 0, cases + classes, fails, {"exhaustive": cases, "classes": classes})


# --- clustering ---------------------------------------------------------------


def random_clustering_dnf(rng: np.random.Generator, s_max: int = 8, n_max: int = 14) -> Dnf:
    """Varied shapes: small active sets make overlapping terms, wide ranges make mixed widths."""
    n = int(rng.integers(3, n_max + 1))
    s = int(rng.integers(1, s_max + 1))
    active = int(rng.integers(2, n + 1))
    lo = int(rng.integers(1, active + 1))
    hi = int(rng.integers(lo, active + 1))
    return gen_random_dnf(n, s, WidthDist.uniform(lo, hi), rng, active)


def check_clustering(n_dnfs: int = 10_000, seed: int = 0, K_max: int = 4, table_n_max: int = 14) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails = {"label_size": 0, "sstar_size": 0, "same_cluster": 0, "far_apart": 0, "factored": 0, "label_form": 0}
    pairs = 0
    for _ in range(n_dnfs):
        f = random_clustering_dnf(rng, n_max=table_n_max)
        K = int(rng.integers(1, K_max + 1))
        s = f.size
        cl = k_clustering(f, K)
        where = {}
        for c, cluster in enumerate(cl.clusters):
            for i in cluster.indices:
                where[i] = c
        w_min = min(t.width for t in f.terms)
        for cluster in cl.clusters:
            lab = cluster.label
            first = f.terms[cluster.indices[0]]
            if len(lab.literals) > first.width + 4 * s * K:
                fails["label_size"] += 1
            if len(lab.sstar) > 16 * s * s * K:
                fails["sstar_size"] += 1
            if any(-l not in lab.sstar for l in lab.sstar) or set(lab.tstar.lits) & lab.sstar:
                fails["label_form"] += 1
            fd = cluster_to_factored(f, cluster, 16 * s * s * K)
            if not np.array_equal(fd.table(), sub_dnf(f, cluster.indices).table()):
                fails["factored"] += 1
        for i, j in itertools.permutations(range(s), 2):
            A, B = f.terms[i], f.terms[j]
            pairs += 1
            if A.width <= B.width + K and len(set(B.lits) - set(A.lits)) <= K and where[i] != where[j]:
                fails["same_cluster"] += 1
            if A.width <= w_min + K and where[i] != where[j] and len(set(B.lits) - set(A.lits)) <= K:
                fails["far_apart"] += 1
    total = sum(fails.values())
    return CheckResult("clustering", total == 0, n_dnfs, total, {**fails, "pairs": pairs})


# --- one-sidedness --------------------------------------------------------------


def _point_in_term(T: Term, n: int, rng: np.random.Generator) -> int:
    free = ((1 << n) - 1) & ~T.mask
    return T.val | (int(rng.integers(1 << n)) & free)


def check_one_sided(cases: int = 1000, seed: int = 1) -> CheckResult:
    """TE and In-Pool on common-term pairs, and ConjTest on conjunctions, never reject."""
    rng = np.random.default_rng(seed)
    params = parameter_schedule(1, Fraction(1, 4), overrides={"eq_samples": 4, "in_pool_reps": 20})
    fails = {"te": 0, "in_pool": 0, "conj": 0}
    for c in range(cases):
        n = int(rng.integers(2, 15))
        f = gen_random_dnf(n, int(rng.integers(1, 5)), WidthDist.uniform(1, n), rng)
        mq = make_mq(f, n)
        T = f.terms[int(rng.integers(f.size))]
        a, b = _point_in_term(T, n, rng), _point_in_term(T, n, rng)
        if not test_equivalence(a, b, mq, params, rng):
            fails["te"] += 1
        others = [_point_in_term(f.terms[int(rng.integers(f.size))], n, rng) for _ in range(int(rng.integers(0, 4)))]
        members = others + [b]
        rng.shuffle(members)
        pool = Pool(0, members, RandomTape.from_seed(spawn_seed(rng), "pool0"))
        if not in_pool(a, pool, mq, params):
            fails["in_pool"] += 1
        # conjunction with an arbitrary satisfying-only sampler
        C = f.terms[0]
        mqC = make_mq(C, n)
        fixed = [_point_in_term(C, n, rng) for _ in range(int(rng.integers(1, 4)))]
        weights = rng.random(len(fixed))
        weights /= weights.sum()
        srng = np.random.default_rng(spawn_seed(rng))
        samp = FnSAMP("biased", [], lambda: fixed[int(srng.choice(len(fixed), p=weights))])
        probe = FnMQ("probe", [mqC], lambda x: mqC(x))
        if not conj_test(probe, samp, Fraction(1, 4), params, rng):
            fails["conj"] += 1
    total = sum(fails.values())
    return CheckResult("one_sided", total == 0, cases, total, fails)


# --- learner exactness -----------------------------------------------------------


def perfect_list(R: int, ell: int, rng: np.random.Generator, n: int) -> tuple[VariableOracleList, list[int], list[bool]]:
    """Disjoint blocks of R, each carrying a literal on one hidden coordinate."""
    coords = [c for c in range(1, n + 1) if (R >> (c - 1)) & 1]
    perm = list(rng.permutation(coords))
    cuts = sorted(rng.choice(np.arange(1, len(perm)), size=ell - 1, replace=False).tolist()) if ell > 1 else []
    groups = [perm[i:j] for i, j in zip([0] + cuts, cuts + [len(perm)])]
    L = VariableOracleList(R)
    sigma, neg = [], []
    for g in groups[:ell]:
        X = 0
        for c in g:
            X |= 1 << (c - 1)
        c = int(rng.choice(g))
        ng = bool(rng.integers(2))
        bit = c - 1

        def one(y, bit=bit, ng=ng):
            return ((int(y) >> bit) & 1) ^ int(ng)

        def many(ys, bit=bit, ng=ng):
            return ((np.asarray(ys, dtype=np.int64) >> bit) & 1).astype(bool) ^ ng

        L.entries.append(VarEntry(X, 0, FnMQ(f"lit{c}", [], one, many)))
        sigma.append(c)
        neg.append(ng)
    return L, sigma, neg


def _random_table(rng: np.random.Generator, ell: int) -> int:
    """A uniformly random nonzero truth table over ell <= 6 variables."""
    mask = (1 << (1 << ell)) - 1
    while True:
        J = int(rng.bit_generator.random_raw()) & mask
        if J:
            return J


def sigma_inverse(w: np.ndarray, sigma: list[int]) -> np.ndarray:
    out = np.zeros(len(w), dtype=np.int64)
    for i, c in enumerate(sigma):
        out |= ((w >> (c - 1)) & 1) << i
    return out


def check_learner_exactness(cases: int = 1000, seed: int = 2, chi_cases: int = 12) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails = {"extract": 0, "sim_mq": 0, "sim_samp": 0}
    for _ in range(cases):
        n = int(rng.integers(2, 13))
        R = int(rng.integers(1, 1 << n)) | 1
        width = bin(R).count("1")
        ell = int(rng.integers(1, min(width, 6) + 1))
        L, sigma, _ = perfect_list(R, ell, rng, n)
        ws = rng.integers(0, 1 << n, size=16) & R
        rounds = int(rng.integers(1, 6))
        if not np.array_equal(extract_many(L, ws, rounds, rng), sigma_inverse(ws, sigma)):
            fails["extract"] += 1
        J = _random_table(rng, ell)
        xs = np.arange(1 << n, dtype=np.int64) & R
        got = SimMqJ(L, J, rounds, rng).many(xs)
        want = ((np.uint64(J) >> sigma_inverse(xs, sigma).astype(np.uint64)) & np.uint64(1)).astype(bool)
        if not np.array_equal(got, want):
            fails["sim_mq"] += 1
    pvals = []
    for _ in range(chi_cases):
        n = int(rng.integers(4, 11))
        R = (1 << n) - 1
        ell = int(rng.integers(1, 4))
        L, sigma, _ = perfect_list(R, ell, rng, n)
        J = _random_table(rng, ell)
        sup = [x for x in range(1 << n) if (J >> int(sigma_inverse(np.array([x]), sigma)[0])) & 1]
        m = 20 * len(sup)
        draws = SimSampJ(L, J, 1, rng).many(m)
        idx = {x: i for i, x in enumerate(sup)}
        if any(int(d) not in idx for d in draws):
            fails["sim_samp"] += 1
            continue
        counts = np.bincount([idx[int(d)] for d in draws], minlength=len(sup))
        p = 1.0 if len(sup) == 1 else float(stats.chisquare(counts).pvalue)
        pvals.append(p)
        if p <= 1e-3:
            fails["sim_samp"] += 1
    total = sum(fails.values())
    return CheckResult("learner_exactness", total == 0, cases, total, {**fails, "min_chi2_p": round(min(pvals), 4)})


# --- candidate soundness -------------------------------------------------------


def _embed(J: int, ell: int, mu: int, sigma: tuple[int, ...]) -> np.ndarray:
    """Table over mu variables of z -> J(z_sigma(1), ..., z_sigma(ell))."""
    xs = np.arange(1 << mu, dtype=np.int64)
    idx = np.zeros(len(xs), dtype=np.int64)
    for i, c in enumerate(sigma):
        idx |= ((xs >> c) & 1) << i
    return ((J >> idx) & 1).astype(bool)


def check_candidate_soundness(mu_max: int = 4, r_max: int = 2, kappas=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))) -> CheckResult:
    """Every member, under every injective sigma, is within kappa of an r-term mu-junta DNF."""
    cases = fails = 0
    seen: dict[bytes, Fraction] = {}
    for mu in range(1, mu_max + 1):
        for r in range(1, r_max + 1):
            for ell in range(0, mu + 1):
                for kappa in kappas:
                    cs = enumerate_dnf_approx(ell, r, mu, kappa, force_general=True)
                    for J in cs.members.tolist():
                        for sigma in itertools.permutations(range(mu), ell):
                            tab = _embed(int(J), ell, mu, sigma)
                            key = tab.tobytes() + bytes([r])
                            d = seen.get(key)
                            if d is None:
                                d = certify_far(tab, mu, r).reldist
                                seen[key] = d
                            cases += 1
                            fails += d > kappa
    return CheckResult("candidate_soundness", fails == 0, cases, fails, {"distinct_tables": len(seen)})


def run_all(quick: bool = False) -> list[CheckResult]:
    scale = 10 if quick else 1
    return [
        check_cube_bound(max_hamming=10 if quick else 16),
        check_clustering(10_000 // scale),
        check_one_sided(1000 // scale),
        check_learner_exactness(1000 // scale),
        check_candidate_soundness(3 if quick else 4),
    ]


__all__ = [
    "CheckResult",
    "check_candidate_soundness",
    "check_clustering",
    "check_cube_bound",
    "check_learner_exactness",
    "check_one_sided",
    "run_all",
]
