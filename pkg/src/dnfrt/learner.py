"""Implicit learning of a factored DNF's tail over the coordinate set R.

Points are full-length ints; a "point over R" has zeros outside R.  Extracted
strings z in {0,1}^l are ints with bit i holding z_{i+1}, which is also the
index into a candidate truth table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boolfn import coords_of, random_bits, random_bits_many
from .dnf_approx import enumerate_dnf_approx
from .errors import EmptySupport
from .oracles import MQ, SAMP, FnMQ, Oracle, Simulator, SimulatorPair, draw_many, query_many
from .params import ParameterSet, TfdSchedule
from .verdict import Reject


def compute_R(samples) -> int:
    """Coordinates on which the samples disagree, as a mask."""
    samples = [int(x) for x in samples]
    if not samples:
        raise ValueError("compute_R needs at least one sample")
    base = samples[0]
    out = 0
    for x in samples[1:]:
        out |= x ^ base
    return out


@dataclass
class VarEntry:
    block: int  # X_i as a coordinate mask
    witness: int  # v: g(y) = h(v outside X_i, y on X_i)
    g: Oracle


@dataclass
class VariableOracleList:
    R: int
    entries: list[VarEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def blocks(self) -> list[int]:
        return [e.block for e in self.entries]


def restricted_oracle(h: Oracle, block: int, witness: int, label: str) -> FnMQ:
    keep = witness & ~block

    def one(y):
        return h(keep | (int(y) & block))

    def many(ys):
        return query_many(h, keep | (np.asarray(ys, dtype=np.int64) & block))

    return FnMQ(label, [h], one, many)


def random_partition(R: int, tau: int, rng: np.random.Generator) -> list[int]:
    """Nonempty blocks of a uniform tau-way partition of R, by block index."""
    coords = coords_of(R)
    labels = rng.integers(tau, size=len(coords))
    blocks: dict[int, int] = {}
    for c, lab in zip(coords, labels.tolist()):
        blocks[lab] = blocks.get(lab, 0) | (1 << (c - 1))
    return [blocks[k] for k in sorted(blocks)]


def block_binary_search(mq: Oracle, blocks: list[int], a: int, b: int, ha: int = 1) -> tuple[int, int, int]:
    """Halve over ``blocks`` (on which a and b differ) to isolate one that flips h.

    Returns (index into ``blocks``, witness v, number of queries).  On exit
    h(v) = ha and overwriting block ``idx`` of v by b's values changes h.
    """
    U = list(range(len(blocks)))
    q = 0
    while len(U) > 1:
        half = U[: len(U) // 2]
        hm = 0
        for i in half:
            hm |= blocks[i]
        c = (a & ~hm) | (b & hm)
        q += 1
        if mq(c) != ha:
            U = half
            b = c
        else:
            U = U[len(half) :]
            a = c
    if not U:
        raise ValueError("binary search needs at least one block")
    return U[0], a, q


def approximate(
    mq: Oracle,
    samp: Oracle,
    R: int,
    params: ParameterSet,
    sched: TfdSchedule,
    rng: np.random.Generator,
) -> Reject | VariableOracleList:
    """Find relevant blocks of a random partition of R and their variable oracles."""
    blocks = random_partition(R, params.tau, rng)
    found: set[int] = set()
    X = 0
    L = VariableOracleList(R)
    t = 0
    while t < sched.t_star:
        t += 1
        z = samp()
        free = R & ~X
        x = (z & ~free) | random_bits(rng, free)
        if mq(x):
            continue
        unfound = [i for i in range(len(blocks)) if i not in found]
        if not unfound:
            continue  # only possible when SAMP returned a non-satisfying default
        sub = [blocks[i] for i in unfound]
        j, v, _ = block_binary_search(mq, sub, z, x)
        bi = unfound[j]
        found.add(bi)
        X |= blocks[bi]
        L.entries.append(VarEntry(blocks[bi], v, restricted_oracle(mq, blocks[bi], v, f"g{len(L.entries) + 1}")))
        if len(L) > params.mu:
            return Reject("approximate_too_many_blocks", {"blocks": len(L)})
        t = 0
    return L


def extract_many(L: VariableOracleList, ws: np.ndarray, rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised Extract: for each w, bit i says which half of X_i holds the relevant variable."""
    ws = np.asarray(ws, dtype=np.int64)
    k = len(ws)
    out = np.zeros(k, dtype=np.int64)
    for i, e in enumerate(L.entries):
        X = e.block
        y0 = X & ~ws  # Y_0: block coordinates where w is 0
        a = random_bits_many(rng, X, k * rounds).reshape(k, rounds)
        flipped = a ^ y0[:, None]
        vals = query_many(e.g, np.concatenate([a.ravel(), flipped.ravel()]))
        diff = vals[: k * rounds] != vals[k * rounds :]
        g0 = diff.reshape(k, rounds).sum(axis=1)
        g1 = rounds - g0
        out |= np.where(g0 > g1, 0, 1).astype(np.int64) << i
    return out


def extract(L: VariableOracleList, w: int, delta, params: ParameterSet, rng: np.random.Generator) -> int:
    return int(extract_many(L, np.array([w], dtype=np.int64), params.extract_rounds(delta), rng)[0])


def find_candidate(
    samp: Oracle,
    L: VariableOracleList,
    R: int,
    r: int,
    params: ParameterSet,
    sched: TfdSchedule,
    rng: np.random.Generator,
) -> Reject | int:
    """Prune DNF-Approx(|L|) by extracted samples; return the smallest survivor."""
    cands = enumerate_dnf_approx(
        len(L), r, params.mu, sched.kappa, mu_cap=params.enum_mu_cap, r_cap=params.enum_r_cap
    ).members
    ws = draw_many(samp, sched.eta)
    zs = extract_many(L, ws & R, params.extract_rounds(0.5), rng)
    zmask = 0
    for z in set(zs.tolist()):
        zmask |= 1 << z
    zm = np.uint64(zmask)
    surv = cands[(cands & zm) == zm]
    if len(surv) == 0:
        return Reject("findcandidate_empty")
    sup = np.bitwise_count(surv)
    best = surv[sup == sup.min()]
    return int(best.min())  # members are sorted, ties go to the smallest table


def uniform_junta_test(
    g: Oracle,
    domain: int,
    k: int,
    eps,
    delta,
    params: ParameterSet,
    rng: np.random.Generator,
    chunk: int = 32,
) -> bool:
    """One-sided k-junta test over the coordinates in ``domain``.

    Coordinates are split into c_j k^2 random blocks.  Each round compares g(x)
    with g on x's found blocks and fresh bits elsewhere; a mismatch is traced
    to a new relevant block by binary search.  More than k relevant blocks
    means some k+1 coordinates are relevant, so juntas always pass.
    """
    blocks = random_partition(domain, params.c_j * k * k, rng)
    rounds = int(np.ceil(np.log((k + 1) / float(delta)) / float(eps)))
    found: set[int] = set()
    J = 0
    done = 0
    while done < rounds:
        m = min(chunk, rounds - done)
        xs = random_bits_many(rng, domain, m)
        ys = random_bits_many(rng, domain, m)
        hyb = (xs & J) | (ys & ~J & domain)
        vals = query_many(g, np.concatenate([xs, hyb]))
        mism = np.flatnonzero(vals[:m] != vals[m:])
        if len(mism) == 0:
            done += m
            continue
        i = int(mism[0])
        unfound = [b for b in range(len(blocks)) if b not in found]
        sub = [blocks[b] for b in unfound]
        j, _, _ = block_binary_search(g, sub, int(xs[i]), int(hyb[i]), ha=int(vals[i]))
        found.add(unfound[j])
        J |= blocks[unfound[j]]
        if len(found) > k:
            return False
        done = 0
    return True


def check_lit(L: VariableOracleList, params: ParameterSet, rng: np.random.Generator) -> Reject | None:
    """Each g^i must look like a literal: a 1-junta that flips under complement."""
    for i, e in enumerate(L.entries):
        if not uniform_junta_test(e.g, e.block, 1, params.junta_eps, params.junta_delta, params, rng):
            return Reject("checklit_junta", {"entry": i})
        m = params.checklit_probes
        a = random_bits_many(rng, e.block, m)
        vals = query_many(e.g, np.concatenate([a, a ^ e.block]))
        if np.any(vals[:m] == vals[m:]):
            return Reject("checklit_antipodal", {"entry": i})
    return None


class SimMqJ(Simulator):
    """MQ for J composed with the list's variable map: J(Extract(L, x))."""

    def __init__(self, L: VariableOracleList, J: int, rounds: int, rng: np.random.Generator):
        super().__init__("mq_J", [e.g for e in L.entries], MQ)
        self.L = L
        self.J = np.uint64(J)
        self.rounds = rounds
        self.rng = rng

    def _many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        if not self.L.entries:
            return np.ones(len(xs), dtype=bool)
        zs = extract_many(self.L, xs, self.rounds, self.rng)
        return ((self.J >> zs.astype(np.uint64)) & np.uint64(1)).astype(bool)

    def _one(self, x):
        return int(self._many(np.array([x], dtype=np.int64))[0])


class SimSampJ(Simulator):
    """SAMP for J under the list's map: uniform y on R, then flip blocks to hit z ~ J."""

    def __init__(self, L: VariableOracleList, J: int, rounds: int, rng: np.random.Generator):
        super().__init__("samp_J", [e.g for e in L.entries], SAMP)
        self.L = L
        ell = len(L)
        self.J_support = np.array([z for z in range(1 << ell) if (J >> z) & 1], dtype=np.int64)
        if len(self.J_support) == 0:
            raise EmptySupport("SAMP for an identically-zero candidate")
        self.rounds = rounds
        self.rng = rng

    def _many(self, m):
        m = int(m)
        ys = random_bits_many(self.rng, self.L.R, m)
        if not self.L.entries:
            return ys
        zs = self.J_support[self.rng.integers(len(self.J_support), size=m)]
        xs = extract_many(self.L, ys, self.rounds, self.rng)
        for i, e in enumerate(self.L.entries):
            flip = ((xs >> i) & 1) != ((zs >> i) & 1)
            ys = np.where(flip, ys ^ e.block, ys)
        return ys

    def _one(self):
        return int(self._many(1)[0])


def sim_mq_j(x: int, L: VariableOracleList, J: int, params: ParameterSet, kappa, rng) -> int:
    return SimMqJ(L, J, params.extract_rounds(kappa), rng)._one(x)


def sim_samp_j(L: VariableOracleList, J: int, params: ParameterSet, kappa, rng) -> int:
    return SimSampJ(L, J, params.extract_rounds(kappa), rng)._one()


@dataclass
class LearnerResult:
    pair: SimulatorPair
    L: VariableOracleList
    J: int
    ell: int


def dnf_learner(
    R: int,
    mq: Oracle,
    samp: Oracle,
    r: int,
    params: ParameterSet,
    sched: TfdSchedule,
    rng: np.random.Generator,
) -> Reject | LearnerResult:
    L = approximate(mq, samp, R, params, sched, rng)
    if isinstance(L, Reject):
        return L
    rounds = params.extract_rounds(sched.kappa)
    if len(L) == 0:
        pair = SimulatorPair(SimMqJ(L, 1, rounds, rng), SimSampJ(L, 1, rounds, rng), 0.0, "all-ones")
        return LearnerResult(pair, L, 1, 0)
    J = find_candidate(samp, L, R, r, params, sched, rng)
    if isinstance(J, Reject):
        return J
    bad = check_lit(L, params, rng)
    if bad is not None:
        return bad
    pair = SimulatorPair(SimMqJ(L, J, rounds, rng), SimSampJ(L, J, rounds, rng), 0.0, "J")
    return LearnerResult(pair, L, J, len(L))
