"""Candidate sets DNF-Approx(l): marginal-majority approximators of small DNFs.

Truth tables over m <= 6 variables are packed into uint64 words (bit p is
the value at point p, whose low bits hold the first variables).
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import CapExceeded

WORD_BITS = 6  # tables over at most 6 variables fit one uint64


@functools.lru_cache(maxsize=None)
def term_tables(m: int) -> np.ndarray:
    """Tables of all 3^m terms over m variables (empty term included)."""
    if m > WORD_BITS:
        raise CapExceeded(f"term tables need m <= {WORD_BITS}, got {m}")
    tabs = np.array([1], dtype=np.uint64)  # m = 0: the constant 1 on one point
    for j in range(m):
        shift = np.uint64(1 << j)
        absent = tabs | (tabs << shift)
        pos = tabs << shift
        neg = tabs
        tabs = np.concatenate([absent, pos, neg])
    tabs.flags.writeable = False
    return tabs


@functools.lru_cache(maxsize=None)
def dnf_tables(m: int, r: int) -> np.ndarray:
    """Sorted distinct tables of all DNFs with at most r terms over m variables."""
    T = np.unique(term_tables(m))
    F = np.array([0], dtype=np.uint64)
    for _ in range(r):
        parts = [F]
        step = max(1, (1 << 22) // max(1, len(T)))
        for i in range(0, len(F), step):
            parts.append(np.unique((F[i : i + step, None] | T[None, :]).ravel()))
        F = np.unique(np.concatenate(parts))
    F.flags.writeable = False
    return F


def _suffix_comb(ell: int, mu: int) -> int:
    """Mask with a 1 at p + 2^ell * w for every suffix w, p = 0."""
    out = 0
    for w in range(1 << (mu - ell)):
        out |= 1 << (w << ell)
    return out


def majority_marginal(D: np.ndarray, ell: int, mu: int) -> np.ndarray:
    """D'(p, w) = majority over suffixes of D(p, .), ties to 1."""
    comb = np.uint64(_suffix_comb(ell, mu))
    half = 1 << (mu - ell)
    out = np.zeros_like(D)
    for p in range(1 << ell):
        cnt = np.bitwise_count(D & (comb << np.uint64(p)))
        maj = (2 * cnt.astype(np.int64)) >= half
        out |= np.where(maj, comb << np.uint64(p), np.uint64(0))
    return out


@dataclass(frozen=True)
class CandidateSet:
    ell: int
    r: int
    mu: int
    kappa: Fraction
    members: np.ndarray  # sorted uint64 tables over ell variables

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, table: int) -> bool:
        i = np.searchsorted(self.members, np.uint64(table))
        return bool(i < len(self.members) and self.members[i] == np.uint64(table))


def _approx_general(ell: int, r: int, mu: int, kappa: Fraction) -> np.ndarray:
    D = dnf_tables(mu, r)
    D = D[D != 0]  # reldist(0, .) is undefined
    Dp = majority_marginal(D, ell, mu)
    sym = np.bitwise_count(D ^ Dp).astype(np.int64)
    sup = np.bitwise_count(D).astype(np.int64)
    # sym / sup <= kappa / 2, in exact integer arithmetic
    keep = 2 * sym * kappa.denominator <= kappa.numerator * sup
    low = np.uint64((1 << (1 << ell)) - 1) if ell < WORD_BITS else np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.unique(Dp[keep] & low)


def _approx_fast(ell: int, r: int) -> np.ndarray:
    F = dnf_tables(ell, r)
    return F[F != 0]


_CACHE: dict[tuple, CandidateSet] = {}


def enumerate_dnf_approx(
    ell: int, r: int, mu: int, kappa, mu_cap: int = 6, r_cap: int = 3, force_general: bool = False
) -> CandidateSet:
    """All tables J_D with D an r-term DNF over mu variables and reldist(D, D') <= kappa/2."""
    kappa = Fraction(kappa)
    if mu > min(mu_cap, WORD_BITS) or r > r_cap or not (0 <= ell <= mu) or r < 1:
        raise CapExceeded(f"DNF-Approx(ell={ell}, r={r}, mu={mu}) exceeds caps mu<={mu_cap}, r<={r_cap}")
    key = (ell, r, mu, kappa, force_general)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    cache_dir = os.environ.get("DNFRT_CACHE_DIR")
    path = Path(cache_dir) / f"approx_l{ell}_r{r}_m{mu}_k{kappa.numerator}-{kappa.denominator}.txt" if cache_dir else None
    if path is not None and path.exists() and not force_general:
        cs = load_candidates(path)
    else:
        # With kappa * 2^(mu-1) < 1 the inclusion test forces D = D', i.e. D does not
        # depend on the extra variables, so the set is every r-term DNF over ell variables.
        if kappa * (1 << (mu - 1)) < 1 and not force_general:
            members = _approx_fast(ell, r)
        else:
            members = _approx_general(ell, r, mu, kappa)
        members.flags.writeable = False
        cs = CandidateSet(ell, r, mu, kappa, members)
        if path is not None and not force_general:
            save_candidates(path, cs)
    _CACHE[key] = cs
    return cs


def _fmt_frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def save_candidates(path: Path | str, cs: CandidateSet) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    width = max(1, (1 << cs.ell) // 4)
    with open(path, "w") as fh:
        fh.write(f"ell={cs.ell} r={cs.r} mu={cs.mu} kappa={_fmt_frac(cs.kappa)}\n")
        for t in cs.members.tolist():
            fh.write(f"{t:0{width}x}\n")


def load_candidates(path: Path | str) -> CandidateSet:
    with open(path) as fh:
        header = fh.readline().split()
        meta = dict(tok.split("=", 1) for tok in header)
        members = np.array([int(line, 16) for line in fh if line.strip()], dtype=np.uint64)
    return CandidateSet(int(meta["ell"]), int(meta["r"]), int(meta["mu"]), Fraction(meta["kappa"]), members)
