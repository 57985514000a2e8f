"""Maximum-likelihood estimation for the WGED on complete samples.

The scale-like parameter ``a`` has a closed-form maximiser for fixed
``(b, lam)``, so the fit is a 2-D search over ``(ln b, ln lam)`` of the
profile likelihood, started from a deterministic grid.  Standard errors and
Wald intervals come from the analytic observed information at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend, numerics
from .core import WgedParams
from .curves import CurveTable
from .errors import DomainError, SingularMatrixError
from .numerics import SymMatrix3

__all__ = [
    "Sample",
    "FitConfig",
    "FitResult",
    "log_likelihood",
    "score",
    "observed_information",
    "profile_a",
    "fit_mle",
    "wald_ci",
    "profile_loglik",
]

PARAM_NAMES = ("a", "b", "lambda")


class Sample:
    """Sorted, validated complete sample of positive observations."""

    __slots__ = ("values", "n")

    def __init__(self, values):
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("sample is empty")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError("sample values must be finite and positive")
        arr = np.ascontiguousarray(np.sort(arr, kind="stable"))
        arr.setflags(write=False)
        self.values = arr
        self.n = int(arr.size)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Sample(n={self.n}, min={self.values[0]:g}, max={self.values[-1]:g})"

    def mean(self) -> float:
        return float(np.mean(self.values))

    def scaled(self, c) -> "Sample":
        return Sample(self.values * c)


def _as_sample(s):
    return s if isinstance(s, Sample) else Sample(s)


def _as_params(p):
    return p if isinstance(p, WgedParams) else WgedParams(*p)


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings.

    ``b_range`` and ``lam_range`` span the geometric multi-start grid; the
    rate range is in units of ``1 / mean(x)``.  ``log_bound`` caps
    ``|ln theta|`` (rates in those same units) for the competitor-model
    harness.
    """

    grid: int = 5
    b_range: tuple = (0.25, 8.0)
    lam_range: tuple = (0.1, 4.0)
    tol: float = numerics.DEFAULT_OPT_TOL
    max_iter: int = 5000
    restarts: int = 1
    step: float = 0.1
    log_bound: float = 16.0
    level: float = 0.95


@dataclass(frozen=True)
class FitResult:
    params: WgedParams
    loglik: float
    cov: SymMatrix3 | None
    std_errors: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    level: float
    converged: bool
    n_restarts: int
    n_starts: int = 0
    n_converged: int = 0
    iterations: int = 0
    information: SymMatrix3 | None = field(default=None, repr=False)


def log_likelihood(p, s) -> float:
    """``n ln(ab lam) + lam sum x + (b-1) sum ln(e^{lam x}-1) - a sum (e^{lam x}-1)^b``.

    Returns ``-inf`` if a term overflows.
    """
    p = _as_params(p)
    s = _as_sample(s)
    return float(backend.active.wged_loglik(p.a, p.b, p.lam, s.values))


def score(p, s) -> np.ndarray:
    """Gradient ``(dL/da, dL/db, dL/dlam)`` of the log-likelihood."""
    p = _as_params(p)
    s = _as_sample(s)
    return np.array(backend.active.wged_score(p.a, p.b, p.lam, s.values))


def observed_information(p, s) -> SymMatrix3:
    """Negated Hessian of the log-likelihood, ordered (a, b, lam)."""
    p = _as_params(p)
    s = _as_sample(s)
    return SymMatrix3(*backend.active.wged_info(p.a, p.b, p.lam, s.values))


def profile_a(b, lam, s) -> float:
    """``n / sum (e^{lam x} - 1)^b``, the maximiser over ``a`` for fixed (b, lam)."""
    if not (b > 0 and lam > 0):
        raise DomainError("b and lam must be positive")
    s = _as_sample(s)
    a, _ = backend.active.wged_profile(float(b), float(lam), s.values)
    if not 0.0 < a < math.inf:
        raise OverflowError(f"sum of (e^(lam x) - 1)^b is out of range for b={b}, lam={lam}")
    return a


def _z_value(level):
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return numerics.std_normal_quantile(0.5 + 0.5 * level)


def _wald(est, cov, level):
    z = _z_value(level)
    var = cov.diag()
    if np.any(np.isnan(var)) or np.any(var < 0):
        raise DomainError(f"variance estimates must be non-negative, got {var}")
    half = z * np.sqrt(var)
    return np.maximum(est - half, 0.0), est + half


def wald_ci(fit, delta=0.05):
    """Intervals ``estimate +- z_{1-delta/2} sqrt(var)`` with lower bounds clipped at 0.

    ``fit`` is a :class:`FitResult` (or any object with ``params`` and
    ``cov``).  Returns three ``(lower, upper)`` tuples in the order
    (a, b, lam).
    """
    if fit.cov is None:
        raise SingularMatrixError(math.nan, "observed information is singular")
    lo, hi = _wald(np.array(fit.params.astuple()), fit.cov, 1.0 - delta)
    return [(float(l), float(h)) for l, h in zip(lo, hi)]


def _start_grid(lo, hi, k):
    if k == 1:
        return np.array([math.sqrt(lo * hi)])
    return np.geomspace(lo, hi, k)


def fit_mle(s, config: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of all three parameters.

    Every grid start is run to convergence; the best converged optimum wins
    (ties go to the lexicographically smallest ``(ln b, ln lam)``).  If no
    start converges the best overall is returned with ``converged=False``.
    """
    cfg = config or FitConfig()
    s = _as_sample(s)
    if s.n < 4:
        raise DomainError(f"fitting three parameters needs n >= 4 observations, got {s.n}")
    if s.values[0] == s.values[-1]:
        raise DomainError("degenerate sample: all observations are equal")
    xbar = s.mean()
    kern = backend.active
    x = s.values

    def objective(theta):
        b = math.exp(theta[0])
        lam = math.exp(theta[1])
        return -kern.wged_profile(b, lam, x)[1]

    runs = []
    for b0 in _start_grid(*cfg.b_range, cfg.grid):
        for l0 in _start_grid(cfg.lam_range[0] / xbar, cfg.lam_range[1] / xbar, cfg.grid):
            res = numerics.nelder_mead(objective, [math.log(b0), math.log(l0)], tol=cfg.tol,
                                       max_iter=cfg.max_iter, step=cfg.step,
                                       restarts=cfg.restarts)
            runs.append(res)
    pool = [r for r in runs if r.converged] or runs
    best = min(pool, key=lambda r: (r.fmin, tuple(r.argmin)))
    b_hat = math.exp(best.argmin[0])
    lam_hat = math.exp(best.argmin[1])
    params = WgedParams(profile_a(b_hat, lam_hat, s), b_hat, lam_hat)
    return _finish(params, s, cfg, converged=best.converged,
                   n_restarts=sum(r.restarts_used for r in runs), n_starts=len(runs),
                   n_converged=sum(r.converged for r in runs),
                   iterations=sum(r.iterations for r in runs))


def _finish(params, s, cfg, **diag):
    info = observed_information(params, s)
    est = np.array(params.astuple())
    try:
        cov = numerics.invert_sym3(info)
    except SingularMatrixError:
        cov = None
    if cov is None:
        se = np.full(3, math.nan)
        lo = hi = np.full(3, math.nan)
    else:
        var = cov.diag()
        se = np.where(var >= 0, np.sqrt(np.abs(var)), math.nan)
        try:
            lo, hi = _wald(est, cov, cfg.level)
        except DomainError:
            lo = hi = np.full(3, math.nan)
    return FitResult(params=params, loglik=log_likelihood(params, s), cov=cov,
                     std_errors=se, ci_lower=lo, ci_upper=hi, level=cfg.level,
                     information=info, **diag)


def fit_at(params, s, config: FitConfig | None = None) -> FitResult:
    """A :class:`FitResult` evaluated at given parameters (no optimisation)."""
    return _finish(_as_params(params), _as_sample(s), config or FitConfig(),
                   converged=False, n_restarts=0)


_AXES = {"a": 0, "b": 1, "lambda": 2, "lam": 2}


def profile_loglik(s, axis, grid, fit) -> CurveTable:
    """Log-likelihood along one parameter with the other two held at ``fit``.

    ``fit`` may be a :class:`FitResult` or a parameter triple.
    """
    s = _as_sample(s)
    try:
        idx = _AXES[axis]
    except KeyError:
        raise DomainError(f"axis must be one of a, b, lambda; got {axis!r}") from None
    base = list((fit.params if isinstance(fit, FitResult) else _as_params(fit)).astuple())
    grid = np.asarray(grid, dtype=float)
    if np.any(~(grid > 0)):
        raise DomainError("profile grid values must be positive")
    values = []
    for v in grid:
        theta = list(base)
        theta[idx] = float(v)
        values.append(log_likelihood(theta, s))
    return CurveTable.from_columns(grid, {"loglik": values})
