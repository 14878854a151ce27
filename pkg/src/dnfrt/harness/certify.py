"""Exact distance from a function to the class of small DNFs, by exhaustive search."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..boolfn import BooleanFn, Dnf, Term, as_table
from ..errors import CapExceeded, EmptySupport

CERTIFY_N_CAP = 10
CERTIFY_S_CAP = 2
CERTIFY_N_CAP_SINGLE = 12  # one-term search only needs the 3^n term counts


@functools.lru_cache(maxsize=16)
def _digits(n: int) -> np.ndarray:
    """Row t gives, per axis k (variable n-k), 0 = absent, 1 = positive, 2 = negative."""
    idx = np.arange(3**n, dtype=np.int64)
    out = np.empty((3**n, n), dtype=np.int8)
    for k in range(n - 1, -1, -1):
        out[:, k] = idx % 3
        idx //= 3
    out.flags.writeable = False
    return out


def term_counts(tab: np.ndarray, n: int) -> np.ndarray:
    """Number of points of ``tab`` satisfying each of the 3^n terms (ternary zeta transform)."""
    A = tab.astype(np.int64).reshape((2,) * n) if n else tab.astype(np.int64).reshape(())
    for axis in range(n):
        zero = np.take(A, 0, axis=axis)
        one = np.take(A, 1, axis=axis)
        A = np.stack([zero + one, one, zero], axis=axis)
    return A.reshape(-1)


def term_of_index(i: int, n: int) -> Term:
    d = _digits(n)[i]
    lits = []
    for k, v in enumerate(d.tolist()):
        var = n - k
        if v == 1:
            lits.append(var)
        elif v == 2:
            lits.append(-var)
    return Term(tuple(lits))


def _conj_index(d1: np.ndarray, D2: np.ndarray, n: int) -> np.ndarray:
    """Index of t1 AND t2 for each row of D2, or -1 on a contradiction."""
    comb = np.where(d1 == 0, D2, d1)
    bad = ((D2 != 0) & (d1 != 0) & (D2 != d1)).any(axis=1)
    pw = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = comb.astype(np.int64) @ pw
    return np.where(bad, -1, idx)


@dataclass(frozen=True)
class Certificate:
    reldist: Fraction
    nearest: Dnf
    s: int
    eps: Fraction | None = None

    @property
    def far(self) -> bool:
        if self.eps is None:
            raise ValueError("no eps given")
        return self.reldist >= self.eps


def certify_far(f: BooleanFn, n: int, s: int, eps=None) -> Certificate:
    """Minimum reldist(f, g) over DNFs g with at most s terms, with a witness g."""
    n_cap = CERTIFY_N_CAP_SINGLE if s <= 1 else CERTIFY_N_CAP
    if n > n_cap or s > CERTIFY_S_CAP or s < 0:
        raise CapExceeded(
            f"certify_far supports n <= {CERTIFY_N_CAP} (n <= {CERTIFY_N_CAP_SINGLE} for s <= 1), s <= {CERTIFY_S_CAP}"
        )
    tab = as_table(f, n)
    F = int(tab.sum())
    if F == 0:
        raise EmptySupport("reldist from the zero function is undefined")
    a = term_counts(tab, n)
    width = (_digits(n) != 0).sum(axis=1)
    b = (1 << (n - width)).astype(np.int64) - a  # points of the term outside f

    best = F  # the empty DNF
    pick: tuple[int, ...] = ()
    if s >= 1:
        single = F - a + b
        i = int(np.argmin(single))
        if single[i] < best:
            best, pick = int(single[i]), (i,)
    if s >= 2 and best > 0:
        D = _digits(n)
        cand = np.flatnonzero(b < best)
        cand = cand[np.argsort(-(a[cand] - b[cand]), kind="stable")]
        ca, cb = a[cand], b[cand]
        for p in range(len(cand)):
            i = cand[p]
            rest = cand[p + 1 :]
            # cost >= F - a1 - a2 + max(b1, b2)
            ok = F - a[i] - ca[p + 1 :] + np.maximum(b[i], cb[p + 1 :]) < best
            if not ok.any():
                continue
            js = rest[ok]
            k = _conj_index(D[i], D[js], n)
            a12 = np.where(k >= 0, a[np.maximum(k, 0)], 0)
            b12 = np.where(k >= 0, b[np.maximum(k, 0)], 0)
            cost = F - (a[i] + a[js] - a12) + (b[i] + b[js] - b12)
            m = int(np.argmin(cost))
            if cost[m] < best:
                best, pick = int(cost[m]), (int(i), int(js[m]))
                if best == 0:
                    break
    terms = tuple(term_of_index(i, n) for i in pick)
    return Certificate(Fraction(best, F), Dnf(terms, n), s, None if eps is None else Fraction(eps))
