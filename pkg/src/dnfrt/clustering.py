"""Deterministic K-clustering of a DNF's terms and conversion to factored form.

This is a reference component: the tester never calls it, but the harness
uses it to build and certify instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .boolfn import Dnf, FactoredDnf, LiteralSet, Term
from .errors import LabelTooWide


@dataclass(frozen=True)
class ClusterLabel:
    tstar: Term
    sstar: LiteralSet = field(default_factory=LiteralSet)

    def __post_init__(self):
        object.__setattr__(self, "sstar", LiteralSet(self.sstar))

    @property
    def literals(self) -> LiteralSet:
        return LiteralSet(self.tstar.lits) | self.sstar


@dataclass(frozen=True)
class Cluster:
    indices: tuple[int, ...]  # in order of addition; indices[0] is the first term
    label: ClusterLabel


@dataclass(frozen=True)
class Clustering:
    clusters: tuple[Cluster, ...]
    K: int

    def cluster_of(self, i: int) -> int:
        for c, cl in enumerate(self.clusters):
            if i in cl.indices:
                return c
        raise KeyError(i)

    def to_json(self) -> str:
        rows = [
            {
                "term_indices": sorted(cl.indices),
                "tstar": list(cl.label.tstar.lits),
                "sstar": sorted(cl.label.sstar, key=lambda l: (abs(l), l > 0)),
            }
            for cl in self.clusters
        ]
        return json.dumps(rows, sort_keys=True)


def _outside(t: Term, covered: LiteralSet) -> int:
    return sum(1 for l in t.lits if l not in covered)


def k_clustering(f: Dnf, K: int) -> Clustering:
    """Greedy clustering: seed with the first narrowest term, absorb nearby terms."""
    if K < 1:
        raise ValueError("K must be positive")
    # canonical order, duplicates kept apart by index
    remaining = sorted(range(len(f.terms)), key=lambda i: (f.terms[i].sort_key(), i))
    clusters = []
    while remaining:
        first = remaining.pop(0)
        tstar = f.terms[first]
        sstar: set[int] = set()
        members = [first]
        while True:
            covered = LiteralSet(tstar.lits) | sstar
            pick = next((j for j, i in enumerate(remaining) if _outside(f.terms[i], covered) <= 2 * K), None)
            if pick is None:
                break
            i = remaining.pop(pick)
            t2 = f.terms[i]
            diff = tstar.symmetric_difference(t2)  # against the old T*
            sstar |= diff | {-l for l in diff}
            tstar = tstar & t2
            members.append(i)
        clusters.append(Cluster(tuple(members), ClusterLabel(tstar, LiteralSet(sstar))))
    return Clustering(tuple(clusters), K)


def cluster_to_factored(f: Dnf, cluster: Cluster, mu: int) -> FactoredDnf:
    """Head T*, tail = each member term with T* removed."""
    label = cluster.label
    if len(label.sstar) > mu:
        raise LabelTooWide(f"|S*| = {len(label.sstar)} exceeds mu = {mu}")
    head = label.tstar
    tail = tuple(f.terms[i] - head for i in cluster.indices)
    return FactoredDnf(head, tail, len(tail), mu, f.n)


def sub_dnf(f: Dnf, indices) -> Dnf:
    return Dnf(tuple(f.terms[i] for i in indices), f.n)


NARROW, MEDIUM, WIDE, OTHER = "narrow", "medium", "wide", "other"


def classify_widths(f: Dnf, alpha: int, K: int) -> list[frozenset[str]]:
    """Tags per term; a term can be narrow and medium at once."""
    if not f.terms:
        return []
    w_min = min(t.width for t in f.terms)
    out = []
    for t in f.terms:
        tags = set()
        if t.width <= w_min + alpha:
            tags.add(NARROW)
        if t.width <= w_min + 2 * alpha:
            tags.add(MEDIUM)
        if t.width >= w_min + K:
            tags.add(WIDE)
        out.append(frozenset(tags or {OTHER}))
    return out
