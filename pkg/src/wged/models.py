"""Competitor lifetime models and a shared maximum-likelihood harness.

Densities (``G = 1 - e^{-lam x}``):

* ED    ``lam e^{-lam x}``
* GED   ``alpha lam e^{-lam x} G^{alpha-1}``                      cdf ``G^alpha``
* BED   ``lam / B(a,b) e^{-b lam x} G^{a-1}``                     cdf ``I_G(a, b)``
* BGED  ``alpha lam / B(a,b) e^{-lam x} G^{a alpha-1} (1-G^alpha)^{b-1}``
  with cdf ``I_{G^alpha}(a, b)``

Every fit except the closed-form ED one runs multi-start Nelder-Mead on the
log parameters, with rates measured in units of ``1 / mean(x)`` and each
coordinate boxed to ``|theta| <= FitConfig.log_bound`` because BED and BGED
likelihoods can keep increasing towards a boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import backend, core, estimation, numerics
from .errors import DomainError
from .estimation import FitConfig, Sample

__all__ = [
    "MODEL_KINDS",
    "PARAM_NAMES",
    "ModelSpec",
    "GenericFit",
    "BoundaryWarning",
    "ed_logpdf", "ed_cdf", "ed_fit",
    "ged_logpdf", "ged_cdf", "ged_fit",
    "bed_logpdf", "bed_cdf", "bed_fit",
    "bged_logpdf", "bged_cdf", "bged_fit",
    "wged_fit",
    "logpdf", "pdf", "cdf", "survival", "quantile", "loglik", "sample", "fit",
]

PARAM_NAMES = {
    "ED": ("lambda",),
    "GED": ("alpha", "lambda"),
    "BED": ("a", "b", "lambda"),
    "BGED": ("a", "b", "alpha", "lambda"),
    "WGED": ("a", "b", "lambda"),
}
MODEL_KINDS = tuple(PARAM_NAMES)


class BoundaryWarning(UserWarning):
    """A fit ended on the parameter box: the likelihood is flat or still rising there."""


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: tuple

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in PARAM_NAMES:
            raise DomainError(f"unknown model {self.kind!r}; expected one of {MODEL_KINDS}")
        params = tuple(float(v) for v in self.params)
        if len(params) != len(PARAM_NAMES[kind]):
            raise DomainError(f"{kind} takes {len(PARAM_NAMES[kind])} parameters, got {len(params)}")
        if not all(math.isfinite(v) and v > 0 for v in params):
            raise DomainError(f"{kind} parameters must be finite and positive, got {params}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    @property
    def param_count(self) -> int:
        return len(self.params)

    @property
    def names(self):
        return PARAM_NAMES[self.kind]

    def as_dict(self):
        return dict(zip(self.names, self.params))


@dataclass(frozen=True)
class GenericFit:
    spec: ModelSpec
    loglik: float
    converged: bool
    at_bound: bool = False
    n_starts: int = 0
    n_converged: int = 0
    detail: object = None  # estimation.FitResult for WGED


def _arr(x, strict=True):
    a = np.asarray(x, dtype=float)
    bad = ~(a > 0) if strict else ~(a >= 0)
    if np.any(bad):
        raise DomainError("x must be positive" if strict else "x must be non-negative")
    return a


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _log_g(lam, x):
    # ln(1 - e^{-lam x})
    u = lam * x
    with np.errstate(divide="ignore"):
        return np.where(u > 0.693, np.log1p(-np.exp(-u)), np.log(-np.expm1(-u)))


def _check_pos(*vals):
    if not all(math.isfinite(v) and v > 0 for v in vals):
        raise DomainError(f"parameters must be finite and positive, got {vals}")


def _ibeta_vec(p, q, z):
    return np.array([numerics.regularized_incomplete_beta(p, q, float(v))
                     for v in np.ravel(z)]).reshape(np.shape(z))


# --- ED -------------------------------------------------------------------

def ed_logpdf(lam, x):
    _check_pos(lam)
    x = _arr(x)
    return _out(math.log(lam) - lam * x)


def ed_cdf(lam, x):
    _check_pos(lam)
    x = _arr(x, strict=False)
    return _out(-np.expm1(-lam * x))


def ed_fit(s) -> GenericFit:
    """Closed form ``lam = n / sum x``."""
    s = estimation._as_sample(s)
    total = float(np.sum(s.values))
    if not total > 0:
        raise DomainError("degenerate sample: sum of observations is zero")
    lam = s.n / total
    spec = ModelSpec("ED", (lam,))
    return GenericFit(spec, loglik(spec, s), converged=True, n_starts=1, n_converged=1)


# --- GED ------------------------------------------------------------------

def ged_logpdf(alpha, lam, x):
    _check_pos(alpha, lam)
    x = _arr(x)
    return _out(math.log(alpha * lam) - lam * x + (alpha - 1.0) * _log_g(lam, x))


def ged_cdf(alpha, lam, x):
    _check_pos(alpha, lam)
    x = _arr(x, strict=False)
    with np.errstate(divide="ignore"):
        return _out(np.exp(alpha * _log_g(lam, x)))


# --- BED ------------------------------------------------------------------

def bed_logpdf(a, b, lam, x):
    _check_pos(a, b, lam)
    x = _arr(x)
    return _out(math.log(lam) - numerics.ln_beta(a, b) - b * lam * x
                + (a - 1.0) * _log_g(lam, x))


def bed_cdf(a, b, lam, x):
    _check_pos(a, b, lam)
    x = _arr(x, strict=False)
    return _out(_ibeta_vec(a, b, -np.expm1(-lam * x)))


def _beta_sf(p, q, z, one_minus_z):
    # 1 - I_z(p, q): by subtraction while I_z < 1/2, else as I_{1-z}(q, p)
    # with 1 - z supplied accurately by the caller
    c = _ibeta_vec(p, q, z)
    upper = _ibeta_vec(q, p, one_minus_z)
    return np.where(c < 0.5, 1.0 - c, upper)


def _bed_sf(a, b, lam, x):
    return _beta_sf(a, b, -np.expm1(-lam * x), np.exp(-lam * x))


# --- BGED -----------------------------------------------------------------

def bged_logpdf(a, b, alpha, lam, x):
    _check_pos(a, b, alpha, lam)
    x = _arr(x)
    lg = _log_g(lam, x)
    w = alpha * lg
    with np.errstate(divide="ignore"):
        tail = np.where(w < -0.693, np.log1p(-np.exp(w)), np.log(-np.expm1(w)))
    return _out(math.log(alpha * lam) - numerics.ln_beta(a, b) - lam * x
                + (a * alpha - 1.0) * lg + (b - 1.0) * tail)


def bged_cdf(a, b, alpha, lam, x):
    _check_pos(a, b, alpha, lam)
    x = _arr(x, strict=False)
    with np.errstate(divide="ignore"):
        z = np.exp(alpha * _log_g(lam, x))
    return _out(_ibeta_vec(a, b, z))


def _bged_sf(a, b, alpha, lam, x):
    with np.errstate(divide="ignore"):
        w = alpha * _log_g(lam, x)
    return _beta_sf(a, b, np.exp(w), -np.expm1(w))


# --- generic interface ----------------------------------------------------

def logpdf(spec: ModelSpec, x):
    k, p = spec.kind, spec.params
    if k == "ED":
        return ed_logpdf(*p, x)
    if k == "GED":
        return ged_logpdf(*p, x)
    if k == "BED":
        return bed_logpdf(*p, x)
    if k == "BGED":
        return bged_logpdf(*p, x)
    return core.log_pdf(p, x)


def pdf(spec: ModelSpec, x):
    if spec.kind == "WGED":
        return core.pdf(spec.params, x)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    if np.any(x < 0):
        raise DomainError("x must be non-negative")
    # the x = 0 limit is 0 or +inf depending on shapes; only x > 0 is evaluated
    if np.any(~pos):
        out[~pos] = math.nan
    if np.any(pos):
        out[pos] = np.exp(logpdf(spec, x[pos]))
    return _out(out)


def cdf(spec: ModelSpec, x):
    k, p = spec.kind, spec.params
    if k == "ED":
        return ed_cdf(*p, x)
    if k == "GED":
        return ged_cdf(*p, x)
    if k == "BED":
        return bed_cdf(*p, x)
    if k == "BGED":
        return bged_cdf(*p, x)
    return core.cdf(p, x)


def survival(spec: ModelSpec, x):
    """Survival function, computed without subtracting from one where possible."""
    k, p = spec.kind, spec.params
    x = _arr(x, strict=False)
    if k == "ED":
        return _out(np.exp(-p[0] * x))
    if k == "GED":
        with np.errstate(divide="ignore"):
            return _out(-np.expm1(p[0] * _log_g(p[1], x)))
    if k == "BED":
        return _out(_bed_sf(*p, x))
    if k == "BGED":
        return _out(_bged_sf(*p, x))
    return core.survival(p, x)


def quantile(spec: ModelSpec, q):
    """Inverse cdf; closed form for ED, GED and WGED, root finding otherwise."""
    k, p = spec.kind, spec.params
    q = np.asarray(q, dtype=float)
    if np.any(~((q >= 0) & (q < 1))):
        raise DomainError("quantile requires 0 <= q < 1")
    if k == "WGED":
        return core.quantile(p, q)
    if k == "ED":
        return _out(-np.log1p(-q) / p[0])
    if k == "GED":
        return _out(-np.log1p(-q ** (1.0 / p[0])) / p[1])
    lam = p[-1]

    def gap(u, v):
        # signed distance from level v at x = e^u, on the side with more digits
        x = math.exp(u)
        if v <= 0.5:
            return float(cdf(spec, x)) - v
        return (1.0 - v) - float(survival(spec, x))

    def one(v):
        if v == 0.0:
            return 0.0
        lo = hi = math.log(1.0 / lam)
        while gap(lo, v) > 0:
            lo -= 2.0
            if lo < -745.0:
                return math.exp(lo)
        while gap(hi, v) < 0:
            hi += 1.0
        return math.exp(numerics.brent_root(lambda u: gap(u, v), lo, hi, tol=1e-13))

    return _out(np.array([one(float(v)) for v in np.ravel(q)]).reshape(q.shape))


def loglik(spec: ModelSpec, s) -> float:
    s = estimation._as_sample(s)
    k, p = spec.kind, spec.params
    kern = backend.active
    x = s.values
    if k == "ED":
        return s.n * math.log(p[0]) - p[0] * float(np.sum(x))
    if k == "GED":
        return float(kern.ged_loglik(p[0], p[1], x))
    if k == "BED":
        return float(kern.bed_loglik(p[0], p[1], p[2], numerics.ln_beta(p[0], p[1]), x))
    if k == "BGED":
        return float(kern.bged_loglik(p[0], p[1], p[2], p[3], numerics.ln_beta(p[0], p[1]), x))
    return estimation.log_likelihood(p, s)


def sample(spec: ModelSpec, n, seed=None):
    """Inverse-transform draws, deterministic per ``seed``."""
    if spec.kind == "WGED":
        return core.sample(spec.params, n, seed)
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    u = (rng.integers(0, 2 ** 53, size=int(n)) + 0.5) / 2.0 ** 53
    return np.asarray(quantile(spec, u), dtype=float)


# --- fitting harness ------------------------------------------------------

def _rate_mask(kind):
    return np.array([name == "lambda" for name in PARAM_NAMES[kind]])


def _fit_generic(kind, s: Sample, starts, cfg: FitConfig) -> GenericFit:
    """Multi-start Nelder-Mead in boxed log coordinates."""
    xbar = s.mean()
    scale = np.where(_rate_mask(kind), 1.0 / xbar, 1.0)
    bound = cfg.log_bound

    def to_params(theta):
        return tuple(float(v) for v in np.exp(theta) * scale)

    def objective(theta):
        if np.any(np.abs(theta) > bound):
            return math.inf
        return -loglik(ModelSpec(kind, to_params(theta)), s)

    runs = []
    for st in starts:
        theta0 = np.clip(np.log(np.asarray(st, dtype=float) / scale), -bound, bound)
        if not math.isfinite(objective(theta0)):
            continue
        runs.append(numerics.nelder_mead(objective, theta0, tol=cfg.tol, max_iter=cfg.max_iter,
                                         step=cfg.step, restarts=cfg.restarts))
    if not runs:
        raise DomainError(f"no finite starting point for {kind}")
    pool = [r for r in runs if r.converged] or runs
    best = min(pool, key=lambda r: (r.fmin, tuple(r.argmin)))
    at_bound = bool(np.any(np.abs(best.argmin) > bound - 1e-3))
    spec = ModelSpec(kind, to_params(best.argmin))
    if at_bound:
        warnings.warn(f"{kind} fit reached the parameter box (|ln theta| = {bound}); "
                      "the likelihood is flat or increasing towards the boundary",
                      BoundaryWarning, stacklevel=3)
    return GenericFit(spec, loglik(spec, s), converged=best.converged, at_bound=at_bound,
                      n_starts=len(runs), n_converged=sum(r.converged for r in runs))


def _grid(*axes):
    out = [()]
    for axis in axes:
        out = [o + (v,) for o in out for v in axis]
    return out


def ged_fit(s, config: FitConfig | None = None) -> GenericFit:
    cfg = config or FitConfig()
    s = estimation._as_sample(s)
    xbar = s.mean()
    starts = _grid((0.5, 2.0, 8.0, 32.0, 128.0), tuple(v / xbar for v in (0.5, 1.0, 2.0, 4.0)))
    return _fit_generic("GED", s, starts, cfg)


def bed_fit(s, config: FitConfig | None = None, ged: GenericFit | None = None) -> GenericFit:
    cfg = config or FitConfig()
    s = estimation._as_sample(s)
    xbar = s.mean()
    ged = ged or ged_fit(s, cfg)
    alpha, lam = ged.spec.params
    # BED(a, 1, lam) is GED(a, lam)
    starts = [(alpha, 1.0, lam)]
    starts += _grid((0.5, 2.0, 8.0, 32.0), (0.5, 2.0, 8.0), (0.5 / xbar, 2.0 / xbar))
    return _fit_generic("BED", s, starts, cfg)


def bged_fit(s, config: FitConfig | None = None, ged: GenericFit | None = None,
             bed: GenericFit | None = None) -> GenericFit:
    cfg = config or FitConfig()
    s = estimation._as_sample(s)
    ged = ged or ged_fit(s, cfg)
    bed = bed or bed_fit(s, cfg, ged)
    alpha, lam = ged.spec.params
    # BGED(a, 1, alpha, lam) is GED(a alpha, lam); BGED(a, b, 1, lam) is BED(a, b, lam)
    starts = [(a0, b0, alpha / a0, lam) for a0, b0 in _grid((0.5, 1.0, 2.0), (0.5, 1.0, 2.0))]
    ba, bb, bl = bed.spec.params
    starts.append((ba, bb, 1.0, bl))
    return _fit_generic("BGED", s, starts, cfg)


def wged_fit(s, config: FitConfig | None = None) -> GenericFit:
    res = estimation.fit_mle(s, config)
    spec = ModelSpec("WGED", res.params.astuple())
    return GenericFit(spec, res.loglik, converged=res.converged, n_starts=res.n_starts,
                      n_converged=res.n_converged, detail=res)


def fit(kind, s, config: FitConfig | None = None) -> GenericFit:
    kind = str(kind).upper()
    if kind == "ED":
        return ed_fit(s)
    if kind == "GED":
        return ged_fit(s, config)
    if kind == "BED":
        return bed_fit(s, config)
    if kind == "BGED":
        return bged_fit(s, config)
    if kind == "WGED":
        return wged_fit(s, config)
    raise DomainError(f"unknown model {kind!r}; expected one of {MODEL_KINDS}")
