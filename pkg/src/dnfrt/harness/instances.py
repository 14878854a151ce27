"""Seeded instance generators for yes and no cases."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..boolfn import Dnf, FactoredDnf, Term, all_points, check_dim, parse_dnf, parse_table
from ..errors import DegenerateSpec

KINDS = ("random_dnf", "planted_factored", "far_xor", "far_random_density", "adversarial_pools")
YES_KINDS = ("random_dnf", "planted_factored")


@dataclass(frozen=True)
class WidthDist:
    """Term widths drawn uniformly from ``widths`` (with optional weights)."""

    widths: tuple[int, ...]
    weights: tuple[float, ...] | None = None

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "WidthDist":
        return cls(tuple(range(lo, hi + 1)))

    @classmethod
    def fixed(cls, w: int) -> "WidthDist":
        return cls((w,))

    def probs(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.widths), 1 / len(self.widths))
        p = np.asarray(self.weights, dtype=float)
        return p / p.sum()

    def draw(self, rng: np.random.Generator) -> int:
        return int(self.widths[rng.choice(len(self.widths), p=self.probs())])

    def min_cdf(self, w: int, s: int) -> float:
        """Pr[min of s independent widths <= w]."""
        p = self.probs()
        tail = float(p[np.asarray(self.widths) > w].sum())
        return 1.0 - tail**s


def _random_term(vars_: np.ndarray, w: int, rng: np.random.Generator) -> Term:
    chosen = rng.choice(vars_, size=w, replace=False)
    signs = rng.integers(2, size=w)
    return Term(tuple(int(v) if b else -int(v) for v, b in zip(chosen.tolist(), signs.tolist())))


def gen_random_dnf(
    n: int,
    s: int,
    width_dist: WidthDist,
    rng: np.random.Generator,
    active: int | None = None,
    max_redraws: int = 100,
) -> Dnf:
    """s random contradiction-free terms; literals come from ``active`` random variables (all by default)."""
    check_dim(n)
    if s < 1:
        raise DegenerateSpec("need at least one term")
    pool_size = n if active is None else active
    if not (1 <= pool_size <= n):
        raise DegenerateSpec(f"active={active} must lie in [1, {n}]")
    if max(width_dist.widths) > pool_size or min(width_dist.widths) < 0:
        raise DegenerateSpec(f"widths {width_dist.widths} do not fit {pool_size} variables")
    for _ in range(max_redraws):
        vars_ = np.sort(rng.choice(np.arange(1, n + 1), size=pool_size, replace=False))
        f = Dnf(tuple(_random_term(vars_, width_dist.draw(rng), rng) for _ in range(s)), n)
        if f.table().any():
            return f
    raise DegenerateSpec("could not draw a satisfiable DNF")


def planted_factored(
    n: int, r: int, mu: int, head_width: int, tail_widths: WidthDist, rng: np.random.Generator
) -> FactoredDnf:
    """Head on its own variables, r tail terms over mu further variables."""
    check_dim(n)
    if head_width + mu > n:
        raise DegenerateSpec(f"head_width + mu = {head_width + mu} > n = {n}")
    perm = rng.permutation(np.arange(1, n + 1))
    head = _random_term(perm[:head_width], head_width, rng) if head_width else Term()
    tail_vars = perm[head_width : head_width + mu]
    tail = tuple(_random_term(tail_vars, min(tail_widths.draw(rng), mu), rng) for _ in range(r))
    return FactoredDnf(head, tail, r, mu, n)


def far_xor(n: int, head_width: int, xor_width: int, rng: np.random.Generator) -> np.ndarray:
    """Head AND parity over xor_width other variables; far from small DNFs for xor_width >= 3."""
    check_dim(n)
    if head_width + xor_width > n or xor_width < 1:
        raise DegenerateSpec("head and parity do not fit")
    perm = rng.permutation(np.arange(1, n + 1))
    head = _random_term(perm[:head_width], head_width, rng) if head_width else Term()
    xs = all_points(n)
    par = np.zeros(len(xs), dtype=np.int64)
    for v in perm[head_width : head_width + xor_width].tolist():
        par ^= (xs >> (v - 1)) & 1
    bit = int(rng.integers(2))
    return head.eval_many(xs) & (par == bit)


def far_random_density(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random support of size round(density * 2^n) (at least one point)."""
    check_dim(n)
    size = 1 << n
    k = max(1, min(size, int(round(density * size))))
    tab = np.zeros(size, dtype=bool)
    tab[rng.choice(size, size=k, replace=False)] = True
    return tab


def adversarial_pools(n: int, s: int, width: int, rng: np.random.Generator) -> Dnf:
    """s+1 terms on a shared set of variables whose sign patterns are pairwise far apart.

    For s = 1 the two patterns are complementary; otherwise the most spread
    of 200 random codebooks is kept.
    """
    check_dim(n)
    if width > n or width < 1:
        raise DegenerateSpec("width must lie in [1, n]")
    vars_ = np.sort(rng.choice(np.arange(1, n + 1), size=width, replace=False))
    if s == 1:
        c = rng.integers(2, size=width)
        words = [c, 1 - c]
    else:
        best, words = -1, []
        for _ in range(200):
            cand = rng.integers(2, size=(s + 1, width))
            d = min(int(np.sum(cand[i] != cand[j])) for i in range(s + 1) for j in range(i))
            if d > best:
                best, words = d, list(cand)
    terms = tuple(Term(tuple(int(v) if b else -int(v) for v, b in zip(vars_.tolist(), w.tolist()))) for w in words)
    return Dnf(terms, n)


@dataclass(frozen=True)
class InstanceSpec:
    """A reproducible instance description; ``seed=None`` means a fresh instance per trial."""

    kind: str
    n: int
    s: int = 1
    wmin: int = 1
    wmax: int = 3
    active: int | None = None
    head_width: int = 0
    mu: int = 6
    xor_width: int = 3
    density: float = 0.25
    width: int = 0
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS and self.kind != "file":
            raise ValueError(f"unknown instance kind {self.kind!r}")

    @property
    def expect_yes(self) -> bool | None:
        if self.kind == "file":
            return None
        return self.kind in YES_KINDS

    def to_dict(self) -> dict:
        return asdict(self)

    def build(self, seed: int | None = None) -> "Instance":
        seed = self.seed if self.seed is not None else seed
        rng = np.random.default_rng(seed)
        if self.kind == "file":
            return load_instance(self.params["path"], self.n)
        if self.kind == "random_dnf":
            f = gen_random_dnf(self.n, self.s, WidthDist.uniform(self.wmin, self.wmax), rng, self.active)
            return Instance(f.table(), self.n, f)
        if self.kind == "planted_factored":
            g = planted_factored(self.n, self.s, self.mu, self.head_width, WidthDist.uniform(self.wmin, self.wmax), rng)
            f = g.to_dnf()
            return Instance(f.table(), self.n, f)
        if self.kind == "far_xor":
            return Instance(far_xor(self.n, self.head_width, self.xor_width, rng), self.n)
        if self.kind == "far_random_density":
            return Instance(far_random_density(self.n, self.density, rng), self.n)
        f = adversarial_pools(self.n, self.s, self.width or self.n, rng)
        return Instance(f.table(), self.n, f)


@dataclass
class Instance:
    table: np.ndarray
    n: int
    dnf: Dnf | None = None

    def digest(self) -> str:
        return hashlib.sha256(np.packbits(self.table).tobytes()).hexdigest()[:16]


def parse_instance_spec(text: str) -> InstanceSpec:
    """``kind:key=val,...`` or a path to a DNF / truth-table file."""
    if ":" not in text and Path(text).exists():
        return InstanceSpec("file", 0, params={"path": text})
    kind, _, rest = text.partition(":")
    kw: dict[str, Any] = {}
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        k, _, v = tok.partition("=")
        if k == "density":
            kw[k] = float(v)
        elif v.lower() == "none":
            kw[k] = None
        else:
            kw[k] = int(v)
    if "n" not in kw:
        raise ValueError(f"instance spec {text!r} needs n=")
    return InstanceSpec(kind.strip(), **kw)


def load_instance(path: str, n: int = 0) -> Instance:
    """A DNF file (one term per line) or a single ``n=.. tt=..`` table line."""
    text = Path(path).read_text()
    body = [ln for ln in text.splitlines() if ln.split("#", 1)[0].strip()]
    if body and body[0].lstrip().startswith("n="):
        tab = parse_table(body[0])
        return Instance(tab, len(tab).bit_length() - 1)
    f = parse_dnf(text, n or None)
    return Instance(f.table(), f.n, f)


def spec_json(spec: InstanceSpec) -> str:
    return json.dumps(spec.to_dict(), sort_keys=True)
