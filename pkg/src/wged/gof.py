"""Goodness of fit: Kolmogorov-Smirnov, information criteria, Kaplan-Meier."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimation import _as_sample

__all__ = [
    "GofReport",
    "KmCurve",
    "ks_statistic",
    "ks_pvalue",
    "information_criteria",
    "kaplan_meier",
    "gof_report",
    "EXACT_MAX_N",
]

# exact Kolmogorov p-values are used up to this n under method="auto"
EXACT_MAX_N = 1000


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_pvalue: float
    aic: float
    aicc: float
    bic: float
    hqic: float
    loglik: float
    k: int
    n: int

    def as_dict(self):
        return {"loglik": self.loglik, "k": self.k, "n": self.n, "aic": self.aic,
                "aicc": self.aicc, "bic": self.bic, "hqic": self.hqic,
                "ks_stat": self.ks_stat, "ks_pvalue": self.ks_pvalue}


@dataclass(frozen=True)
class KmCurve:
    times: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray

    def at(self, t):
        """Right-continuous step value ``S(t)``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right")
        vals = np.concatenate(([1.0], self.survival))[idx]
        return float(vals) if vals.ndim == 0 else vals


def ks_statistic(s, cdf, method="pointwise") -> float:
    """Kolmogorov-Smirnov distance between the sample and ``cdf``.

    ``method="classical"`` is the two-sided ``D_n``, the larger of
    ``i/n - F(x_(i))`` and ``F(x_(i)) - (i-1)/n`` over the sorted sample.
    ``method="pointwise"`` (default) compares only at the upper step,
    ``max_i |i/n - F(x_(i))|``; this is the convention behind the glass-fibre
    comparison table and never exceeds the classical value.
    """
    s = _as_sample(s)
    f = np.asarray(cdf(s.values), dtype=float).reshape(-1)
    if f.shape[0] != s.n:
        raise DomainError("cdf must return one value per observation")
    i = np.arange(1, s.n + 1)
    upper = i / s.n - f
    if method == "pointwise":
        return float(np.max(np.abs(upper)))
    if method == "classical":
        lower = f - (i - 1) / s.n
        return float(max(np.max(upper), np.max(lower)))
    raise DomainError(f"method must be 'pointwise' or 'classical', got {method!r}")


def _mtw_cdf(d, n):
    """``P(D_n < d)`` by the Marsaglia-Tsang-Wang matrix power."""
    k = int(n * d) + 1
    m = 2 * k - 1
    h = k - n * d
    i = np.arange(m)[:, None]
    j = np.arange(m)[None, :]
    g = i - j + 1
    hmat = (g >= 0).astype(float)
    powers = h ** np.arange(1, m + 1)
    hmat[:, 0] -= powers
    hmat[m - 1, :] -= powers[::-1]
    if 2 * h - 1 > 0:
        hmat[m - 1, 0] += (2 * h - 1) ** m
    # entries with (i-j+1)! beyond double range are zero to working precision
    with np.errstate(over="ignore"):
        fact = np.exp([math.lgamma(v + 1) for v in np.clip(g, 0, None).ravel()]).reshape(m, m)
    hmat = np.where(g > 0, hmat / fact, hmat)

    # matrix power keeping a separate base-10 exponent against overflow
    result, e_res = None, 0
    base, e_base = hmat, 0
    p = n
    while p:
        if p & 1:
            if result is None:
                result, e_res = base.copy(), e_base
            else:
                result, e_res = result @ base, e_res + e_base
            if abs(result[k - 1, k - 1]) > 1e140:
                result, e_res = result * 1e-140, e_res + 140
        p >>= 1
        if p:
            base, e_base = base @ base, 2 * e_base
            if abs(base[k - 1, k - 1]) > 1e140:
                base, e_base = base * 1e-140, e_base + 140
    val = result[k - 1, k - 1]
    if val <= 0:
        return 0.0
    # times n! / n^n
    log_p = math.log(val) + e_res * math.log(10.0) + math.lgamma(n + 1) - n * math.log(n)
    return math.exp(min(log_p, 0.0))


def _asymptotic_sf(d, n):
    t = 2.0 * n * d * d
    total = 0.0
    k = 1
    while True:
        term = math.exp(-t * k * k)
        total += term if k % 2 else -term
        if term < 1e-12:
            break
        k += 1
    return 2.0 * total


def ks_pvalue(d, n, method="auto") -> float:
    """``P(D_n >= d)`` for a fully specified continuous null.

    ``method`` is ``"exact"`` (matrix power), ``"asymptotic"`` (Kolmogorov
    series) or ``"auto"`` (exact for ``n <= 1000``).
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if not 0.0 <= d <= 1.0 or math.isnan(d):
        raise DomainError(f"d must lie in [0, 1], got {d!r}")
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "asymptotic"
    if method not in ("exact", "asymptotic"):
        raise DomainError(f"method must be exact, asymptotic or auto, got {method!r}")
    if d == 0.0:
        return 1.0
    if method == "asymptotic":
        if d * math.sqrt(n) < 0.2:
            return 1.0
        return float(min(1.0, max(0.0, _asymptotic_sf(d, n))))
    if d <= 0.5 / n:
        return 1.0
    if d >= 1.0:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - _mtw_cdf(d, n))))


def information_criteria(loglik, k, n):
    """Return ``(aic, aicc, bic, hqic)``.

    ``k = 0`` is accepted (all criteria reduce to ``-2 L``).
    """
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n <= k + 1:
        raise DomainError(f"AICc needs n > k + 1, got n={n}, k={k}")
    if not math.isfinite(loglik):
        raise DomainError(f"log-likelihood must be finite, got {loglik!r}")
    dev = -2.0 * loglik
    aic = 2.0 * k + dev
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1)
    bic = k * math.log(n) + dev
    # ln ln n is negative for n < 3; the formula is still applied as written
    hqic = 2.0 * k * math.log(math.log(n)) + dev
    return aic, aicc, bic, hqic


def kaplan_meier(s) -> KmCurve:
    """Product-limit estimate for a complete sample, ties aggregated."""
    s = _as_sample(s)
    times, events = np.unique(s.values, return_counts=True)
    at_risk = s.n - np.concatenate(([0], np.cumsum(events)[:-1]))
    # for complete data the product of (1 - d_j/n_j) telescopes to (#values > t)/n
    surv = (at_risk - events) / s.n
    return KmCurve(times=times, survival=surv, at_risk=at_risk, events=events)


def gof_report(s, cdf, loglik, k, ks_method="pointwise", pvalue="auto") -> GofReport:
    s = _as_sample(s)
    d = ks_statistic(s, cdf, method=ks_method)
    aic, aicc, bic, hqic = information_criteria(loglik, k, s.n)
    return GofReport(ks_stat=d, ks_pvalue=ks_pvalue(d, s.n, pvalue), aic=aic, aicc=aicc,
                     bic=bic, hqic=hqic, loglik=float(loglik), k=int(k), n=s.n)
