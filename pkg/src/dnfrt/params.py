"""Every scalar knob of the tester, in theory or desk mode.

Theory mode evaluates the asymptotic formulas (the numbers are astronomically
large and only useful for inspection).  Desk mode uses small documented
defaults; any field can be overridden by name.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Mapping

THEORY = "theory"
DESK = "desk"

# fields that are derived from others unless explicitly overridden
_DERIVED = ("N", "tau", "in_pool_reps", "omega", "samp_star_reps", "reps", "cross_points")


def parse_rational(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**9)
    return Fraction(str(v).strip())


def ceil_frac(x) -> int:
    return math.ceil(x)


@dataclass(frozen=True)
class TfdSchedule:
    """Loop counts for one Test-Factored-DNF call at distance ``eps`` and size ``r``."""

    eps: Fraction
    r: int
    mu: int
    kappa: Fraction
    xi: Fraction
    samples: int
    t_star: int
    eta: int


@dataclass(frozen=True)
class ParameterSet:
    mode: str
    s: int
    eps: Fraction
    K: int
    mu: int
    alpha: int
    N: int
    c_tau: int
    tau: int
    # pooling
    eq_samples: int
    density: Fraction
    in_pool_reps: int
    pool_samples: int
    merge_samples: int
    c_omega: int
    omega: int
    samp_star_reps: int
    # top level
    c_amp: int
    reps: int
    # learner; None means "use the theory formula"
    xi: Fraction | None
    eta: int | None
    t_star: int | None
    tfd_samples: int | None
    c_R: Fraction
    c_ext: Fraction
    junta_eps: Fraction
    junta_delta: Fraction
    c_j: int
    checklit_probes: int
    # consistency check
    c1: int
    cross_points: int
    conj_c: int
    conj_phase2: int
    c_gamma: int
    gamma_threshold: Fraction
    # implementation
    memoize: bool
    enum_mu_cap: int
    enum_r_cap: int
    Q: int = 0
    sources: Mapping[str, str] = field(default_factory=dict, compare=False)

    # --- schedules -------------------------------------------------------

    @property
    def tfd_eps(self) -> Fraction:
        return self.eps / (2 * self.s)

    def kappa(self, eps: Fraction) -> Fraction:
        return Fraction(eps) ** 2

    def schedule(self, eps: Fraction, r: int) -> TfdSchedule:
        eps = Fraction(eps)
        kappa = self.kappa(eps)
        if self.xi is not None:
            xi = Fraction(self.xi)
        else:
            # natural log; the union bound is over the candidate set
            xi = kappa / (4000 * Fraction(math.log(100) + 2 * self.mu * r * math.log(2)))
        xi_f = float(xi)
        t_star = self.t_star if self.t_star is not None else math.ceil(5 * math.log(200 * self.mu) / xi_f)
        eta = self.eta if self.eta is not None else math.ceil(1 / (200 * xi_f))
        samples = (
            self.tfd_samples
            if self.tfd_samples is not None
            else math.ceil(float(self.c_R) * self.mu * math.log(self.mu + 1) / xi_f)
        )
        return TfdSchedule(eps, r, self.mu, kappa, xi, samples, t_star, eta)

    def extract_rounds(self, delta: Fraction | float) -> int:
        return max(1, math.ceil(float(self.c_ext) * math.log(self.mu / float(delta))))

    def junta_rounds(self, k: int = 1) -> int:
        return math.ceil(math.log((k + 1) / float(self.junta_delta)) / float(self.junta_eps))

    def junta_blocks(self, k: int = 1) -> int:
        return self.c_j * k * k

    def conscheck_rounds(self, eps: Fraction) -> int:
        return math.ceil(self.c1 / Fraction(eps))

    def conj_rounds(self, eps: Fraction) -> int:
        return math.ceil(self.conj_c / Fraction(eps))

    def gamma_samples(self, eps: Fraction) -> int:
        return max(1, math.ceil(self.c_gamma * math.log(1 / float(eps))))

    def replace(self, **kw) -> "ParameterSet":
        return dataclasses.replace(self, **kw)

    # --- reporting -------------------------------------------------------

    def provenance(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "sources":
                continue
            v = getattr(self, f.name)
            out[f.name] = {"value": _fmt(v), "source": self.sources.get(f.name, "default")}
        sch = self.schedule(self.tfd_eps, self.s)
        for k in ("kappa", "xi", "samples", "t_star", "eta"):
            out[f"tfd.{k}"] = {"value": _fmt(getattr(sch, k)), "source": "derived"}
        return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if v is None:
        return "formula"
    return str(v)


_FIELD_TYPES = {f.name: f.type for f in fields(ParameterSet)}


def _coerce(name: str, v: Any):
    t = _FIELD_TYPES.get(name)
    if t is None or name in ("mode", "s", "eps", "sources"):
        raise KeyError(f"unknown or fixed parameter {name!r}")
    if isinstance(v, str) and v.lower() in ("none", "formula"):
        return None
    if "bool" in str(t):
        if isinstance(v, str):
            return v.lower() in ("1", "true", "yes", "on")
        return bool(v)
    if "Fraction" in str(t):
        return parse_rational(v)
    return int(parse_rational(v))


DESK_DEFAULTS: dict[str, Any] = {
    "K": 3,
    "mu": 6,
    "alpha": 8,
    "c_tau": 4,
    "eq_samples": 512,
    "density": Fraction(1, 64),
    "pool_samples": 24,
    "merge_samples": 8,
    "c_omega": 64,
    "c_amp": 5,
    "xi": Fraction(1, 16),
    "eta": 256,
    "t_star": None,
    "tfd_samples": None,
    "c_R": Fraction(1),
    "c_ext": Fraction(1),
    "junta_eps": Fraction(1, 30),
    "junta_delta": Fraction(1, 100),
    "c_j": 32,
    "checklit_probes": 10,
    "c1": 8,
    "conj_c": 1,
    "conj_phase2": 16,
    "c_gamma": 5,
    "gamma_threshold": Fraction(9, 10),
    "memoize": True,
    "enum_mu_cap": 6,
    "enum_r_cap": 3,
}


def _derive(mode: str, s: int, eps: Fraction, base: dict) -> dict:
    d = {}
    alpha = base["alpha"]
    d["N"] = 2**alpha if mode == DESK else base["N"]
    d["tau"] = base["c_tau"] * base["mu"] ** 2
    d["in_pool_reps"] = 10 * alpha
    ratio = s / eps
    d["omega"] = math.ceil(base["c_omega"] * float(ratio) * math.log(float(ratio) + 2))
    d["samp_star_reps"] = math.ceil(100 * ratio * alpha)
    d["reps"] = math.ceil(base["c_amp"] * math.log2(s + 2))
    d["cross_points"] = base["c1"] if mode == DESK else 100
    return d


def parameter_schedule(
    s: int, eps, mode: str = DESK, overrides: Mapping[str, Any] | None = None
) -> ParameterSet:
    """Build a ParameterSet for size ``s`` and distance ``eps``."""
    eps = parse_rational(eps)
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    if mode not in (DESK, THEORY):
        raise ValueError(f"unknown mode {mode!r}")
    overrides = {k: _coerce(k, v) for k, v in (overrides or {}).items()}
    sources: dict[str, str] = {}
    base = dict(DESK_DEFAULTS)
    if mode == THEORY:
        base.update(_theory_base(s, eps))
        for k in _theory_base(s, eps):
            sources[k] = "formula"
    for k, v in overrides.items():
        if k not in _DERIVED:
            base[k] = v
            sources[k] = "override"
    if mode == THEORY and "N" not in base:
        base["N"] = 0
    derived = _derive(mode, s, eps, base)
    for k, v in derived.items():
        if k in overrides:
            derived[k] = overrides[k]
            sources[k] = "override"
        else:
            sources.setdefault(k, "derived")
    vals = {**base, **derived}
    ps = ParameterSet(mode=mode, s=s, eps=eps, sources=sources, **vals)
    if mode == THEORY:
        ps = _finish_theory(ps, overrides, sources)
    from .budget import tfd_query_bound  # local import: budget depends on this module

    q = max(tfd_query_bound(ps, r) for r in range(1, s + 1))
    return ps.replace(Q=q)


def _theory_base(s: int, eps: Fraction) -> dict:
    K = math.ceil(math.log2(s / eps) ** 2 - 1e-9)
    mu = 16 * s * s * K
    return {
        "K": K,
        "mu": mu,
        "xi": None,
        "eta": None,
        "t_star": None,
        "tfd_samples": None,
        "c_ext": Fraction(4),
        "conj_c": 8,
        "enum_mu_cap": mu,
        "enum_r_cap": s,
    }


def _finish_theory(ps: ParameterSet, overrides: dict, sources: dict) -> ParameterSet:
    """N >= max(Q, s/eps)^10 and the sample counts that depend on N."""
    from .budget import tfd_query_bound

    q = max(tfd_query_bound(ps, r) for r in range(1, ps.s + 1))
    N = max(q, math.ceil(ps.s / ps.eps)) ** 10
    alpha = math.ceil(math.log2(N))
    upd = {
        "N": N,
        "alpha": alpha,
        "in_pool_reps": 10 * alpha,
        "eq_samples": N**3,
        "density": Fraction(1, N * N),
        "pool_samples": N**3,
        "merge_samples": N**5,
        "samp_star_reps": math.ceil(100 * ps.s / ps.eps * alpha),
    }
    for k in upd:
        if k in overrides:
            upd[k] = overrides[k]
        else:
            sources[k] = "formula"
    return ps.replace(**upd, sources=sources)


def runnable(ps: ParameterSet, limit: int = 10**7) -> bool:
    """Whether the sample counts are small enough to actually execute."""
    return max(ps.eq_samples, ps.pool_samples, ps.merge_samples) <= limit
