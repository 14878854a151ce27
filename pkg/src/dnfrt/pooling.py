"""Pool construction (Find-Factored-DNFs) and the pool-based MQ*/SAMP* simulators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .boolfn import random_bits_many
from .oracles import (
    MQ,
    SAMP,
    Oracle,
    RandomTape,
    Simulator,
    SimulatorPair,
    draw_many,
    query_many,
    spawn_seed,
)
from .params import ParameterSet
from .verdict import Reject


@dataclass
class Pool:
    id: int
    members: list[int]
    tape: RandomTape | None = None
    counter: int = 0
    heavy: bool = False
    memo: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a pool must be nonempty")
        seen: set[int] = set()
        uniq = []
        for m in self.members:
            if m not in seen:
                seen.add(m)
                uniq.append(int(m))
        self.members = uniq

    def add(self, x: int, check=None) -> None:
        if check is not None and not check(x):
            raise ValueError(f"pool member {x:#x} does not satisfy f")
        if x not in self.members:
            self.members.append(int(x))

    def dump(self, n: int) -> dict:
        width = max(1, (n + 3) // 4)
        return {
            "id": self.id,
            "member_points": [f"{m:0{width}x}" for m in self.members],
            "counter": self.counter,
            "heavy": self.heavy,
        }


def dump_pools(pools: list[Pool], n: int) -> str:
    return json.dumps([p.dump(n) for p in pools], sort_keys=True)


def test_equivalence(a: int, b: int, mq: Oracle, params: ParameterSet, rng: np.random.Generator) -> bool:
    """True iff one of ``eq_samples`` uniform points of Cube(a, b) satisfies f."""
    diff = a ^ b
    zs = (a & ~diff) | random_bits_many(rng, diff, params.eq_samples)
    return bool(query_many(mq, zs).any())


# pytest would otherwise try to collect the name above
test_equivalence.__test__ = False


def in_pool(a: int, pool: Pool, mq: Oracle, params: ParameterSet) -> bool:
    """Deterministic given (a, pool, tape): does some member share a dense cube with a?"""
    if pool.tape is None:
        raise ValueError("In-Pool needs the pool's random tape")
    reps = params.in_pool_reps
    for b in pool.members:
        diff = a ^ b
        words = pool.tape.words((a, b), reps)
        zs = (a & ~diff) | (words & np.uint64(diff)).astype(np.int64)
        if query_many(mq, zs).all():
            return True
    return False


class MqStar(Simulator):
    """MQ* for a pool: 0 off f, otherwise In-Pool with tape randomness.

    The map is a deterministic function of x (given pool and tape), so answers
    may be memoized; memo hits cost no base queries.
    """

    def __init__(self, pool: Pool, mq_f: Oracle, params: ParameterSet, oracle_id: str | None = None):
        super().__init__(oracle_id or f"mq*{pool.id}", [mq_f], MQ)
        self.pool = pool
        self.mq_f = mq_f
        self.params = params
        self.use_memo = params.memoize

    def evaluate(self, x: int) -> int:
        x = int(x)
        if self.use_memo:
            hit = self.pool.memo.get(x)
            if hit is not None:
                return hit
        if not self.mq_f(x):
            out = 0
        else:
            out = int(in_pool(x, self.pool, self.mq_f, self.params))
        if self.use_memo:
            self.pool.memo[x] = out
        return out

    def _one(self, x):
        return self.evaluate(x)

    def _many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        if not self.use_memo:
            return np.fromiter((self.evaluate(x) for x in xs.tolist()), dtype=bool, count=len(xs))
        memo = self.pool.memo
        uniq = np.unique(xs)
        todo = [x for x in uniq.tolist() if x not in memo]
        if todo:
            fv = query_many(self.mq_f, np.asarray(todo, dtype=np.int64))
            for x, v in zip(todo, fv.tolist()):
                memo[x] = int(in_pool(x, self.pool, self.mq_f, self.params)) if v else 0
        lut = np.fromiter((memo[x] for x in uniq.tolist()), dtype=bool, count=len(uniq))
        return lut[np.searchsorted(uniq, xs)]


class SampStar(Simulator):
    """SAMP* for a pool: first SAMP(f) draw accepted by MQ*, else the default 0^n."""

    def __init__(self, mq_star: MqStar, samp_f: Oracle, params: ParameterSet, oracle_id: str | None = None):
        super().__init__(oracle_id or f"samp*{mq_star.pool.id}", [mq_star.mq_f, samp_f], SAMP)
        self.mq_star = mq_star
        self.samp_f = samp_f
        self.reps = params.samp_star_reps
        self.default_events = 0

    def draw(self) -> tuple[int, bool]:
        """One SAMP* draw and whether it fell back to the default string."""
        before = self._root_total()
        self.calls += 1
        z, dflt = self._draw()
        self.forwarded_calls += self._root_total() - before
        return z, dflt

    def _draw(self) -> tuple[int, bool]:
        for _ in range(self.reps):
            z = self.samp_f()
            if self.mq_star.evaluate(z):
                return z, False
        self.default_events += 1
        return 0, True

    def _one(self):
        return self._draw()[0]


def mq_star(x: int, pool: Pool, mq: Oracle, params: ParameterSet) -> int:
    return MqStar(pool, mq, params).evaluate(x)


def samp_star(pool: Pool, mq: Oracle, samp: Oracle, params: ParameterSet) -> int:
    return SampStar(MqStar(pool, mq, params), samp, params)._one()


@dataclass
class PoolPair(SimulatorPair):
    pool: Pool | None = None


@dataclass
class FfdTrace:
    """Diagnostics from one Find-Factored-DNFs run."""

    samples: list[int] = field(default_factory=list)
    phase1_pools: int = 0
    merges: int = 0
    pools: list[Pool] = field(default_factory=list)
    unmatched: int | None = None


def _components(m: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    if edges:
        i, j = zip(*edges)
        g = coo_matrix((np.ones(len(edges)), (i, j)), shape=(m, m))
    else:
        g = coo_matrix((m, m))
    _, labels = connected_components(g, directed=False)
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(idx)
    # order pools by their first sample
    return sorted(groups.values(), key=lambda g: g[0])


def find_factored_dnfs(
    mq: Oracle,
    samp: Oracle,
    s: int,
    eps: Fraction,
    params: ParameterSet,
    rng: np.random.Generator,
    trace: FfdTrace | None = None,
) -> Reject | list[PoolPair]:
    """Build pools of f-samples and return one (MQ*, SAMP*) pair per heavy pool."""
    eps = Fraction(eps)
    if trace is None:
        trace = FfdTrace()

    # phase 1: equivalence graph over the samples
    S = draw_many(samp, params.pool_samples).tolist()
    trace.samples = S
    edges = []
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            if test_equivalence(S[i], S[j], mq, params, rng):
                edges.append((i, j))
    pools = [Pool(k, [S[i] for i in comp]) for k, comp in enumerate(_components(len(S), edges))]
    trace.phase1_pools = len(pools)
    trace.pools = pools

    # phase 2
    if len(pools) > s:
        return Reject("ffd_too_many_pools", {"pools": len(pools)})

    # phase 3: merge pools that share a common neighbour; restart after each merge
    while len(pools) > 1:
        Z = draw_many(samp, params.merge_samples).tolist()
        pair = None
        for z in Z:
            hit = []
            for P in pools:
                if any(test_equivalence(a, z, mq, params, rng) for a in P.members):
                    hit.append(P)
                    if len(hit) == 2:
                        break
            if len(hit) == 2:
                pair = hit
                break
        if pair is None:
            break
        P, P2 = pair
        merged = Pool(P.id, P.members + P2.members)
        pools = sorted([q for q in pools if q is not P and q is not P2] + [merged], key=lambda q: q.id)
        trace.merges += 1
        trace.pools = pools

    # phase 4: heaviness counters
    for P in pools:
        P.tape = RandomTape.from_seed(spawn_seed(rng), namespace=f"pool{P.id}")
        P.counter = 0
    Z = draw_many(samp, params.omega).tolist()
    for z in Z:
        matched = False
        for P in pools:
            ok = in_pool(z, P, mq, params)
            if params.memoize:
                P.memo[z] = int(ok)  # z came from SAMP(f), so this is exactly MQ*(z)
            if ok:
                P.counter += 1
                matched = True
        if not matched:
            trace.unmatched = z
            return Reject("ffd_unmatched_sample", {"z": z})
    out = []
    for P in pools:
        P.heavy = P.counter * 20 * s >= eps * params.omega
        if P.heavy:
            mqs = MqStar(P, mq, params)
            out.append(PoolPair(mqs, SampStar(mqs, samp, params), 0.0, f"pool{P.id}", P))
    return out


def pool_terms(f, pool: Pool) -> list[int]:
    """Indices of the DNF's terms satisfied by some pool member."""
    covered = set()
    for x in pool.members:
        covered.update(f.terms_of(x))
    return sorted(covered)
