"""Likelihood kernels in plain numpy.

Fallback for the compiled ``_ckernels`` extension; both modules expose the
same functions with the same signatures.  ``x`` is always a contiguous 1-D
float64 array of positive observations.
"""

import math

import numpy as np

NAME = "python"


def _log_expm1(u):
    # ln(e^u - 1) without overflow for large u
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(u > 30.0, u + np.log1p(-np.exp(-np.minimum(u, 745.0))),
                        np.log(np.expm1(np.minimum(u, 30.0))))


def _log_neg_expm1(u):
    # ln(1 - e^{-u}) for u > 0
    with np.errstate(divide="ignore"):
        return np.where(u > 0.693, np.log1p(-np.exp(-u)), np.log(-np.expm1(-u)))


def wged_loglik(a, b, lam, x):
    u = lam * x
    L = _log_expm1(u)
    with np.errstate(over="ignore"):
        total_h = a * np.sum(np.exp(b * L))
    val = (x.size * math.log(a * b * lam) + float(np.sum(u))
           + (b - 1.0) * float(np.sum(L)) - float(total_h))
    return -math.inf if math.isnan(val) else val


def wged_profile(b, lam, x):
    """Return ``(a_hat, loglik)`` with ``a`` profiled out in closed form."""
    n = x.size
    u = lam * x
    L = _log_expm1(u)
    z = b * L
    zmax = float(np.max(z))
    lse = zmax + math.log(float(np.sum(np.exp(z - zmax))))
    log_a = math.log(n) - lse
    val = (n * (log_a + math.log(b * lam)) + float(np.sum(u))
           + (b - 1.0) * float(np.sum(L)) - n)
    return math.exp(log_a), val


def wged_score(a, b, lam, x):
    n = x.size
    u = lam * x
    L = _log_expm1(u)
    with np.errstate(over="ignore", invalid="ignore"):
        P = np.exp(b * L)                      # (e^{lam x} - 1)^b
        ratio = 1.0 / (-np.expm1(-u))          # e^{lam x} / (e^{lam x} - 1)
        Q = np.exp(u + (b - 1.0) * L)          # e^{lam x} (e^{lam x} - 1)^{b-1}
        s_a = n / a - float(np.sum(P))
        s_b = n / b + float(np.sum(L)) - a * float(np.sum(P * L))
        s_l = (n / lam + float(np.sum(x)) + (b - 1.0) * float(np.sum(x * ratio))
               - a * b * float(np.sum(x * Q)))
    return s_a, s_b, s_l


def wged_info(a, b, lam, x):
    """Entries (aa, ab, al, bb, bl, ll) of the negated Hessian."""
    n = x.size
    u = lam * x
    L = _log_expm1(u)
    with np.errstate(over="ignore", invalid="ignore"):
        P = np.exp(b * L)
        ratio = 1.0 / (-np.expm1(-u))
        Q = np.exp(u + (b - 1.0) * L)
        # e^{lam x} / (e^{lam x} - 1)^2
        R = ratio * np.exp(-L)
        # e^{lam x} (b e^{lam x} - 1) (e^{lam x} - 1)^{b-2}
        T = Q * (b * np.exp(u) - 1.0) * np.exp(-L)
        i_aa = n / a ** 2
        i_ab = float(np.sum(P * L))
        i_al = b * float(np.sum(x * Q))
        i_bb = n / b ** 2 + a * float(np.sum(P * L * L))
        i_bl = -(float(np.sum(x * ratio)) - a * float(np.sum(x * Q * (b * L + 1.0))))
        i_ll = (n / lam ** 2 + (b - 1.0) * float(np.sum(x * x * R))
                + a * b * float(np.sum(x * x * T)))
    return i_aa, i_ab, i_al, i_bb, i_bl, i_ll


def ged_loglik(alpha, lam, x):
    u = lam * x
    val = (x.size * math.log(alpha * lam) - float(np.sum(u))
           + (alpha - 1.0) * float(np.sum(_log_neg_expm1(u))))
    return -math.inf if math.isnan(val) else val


def bed_loglik(a, b, lam, lnbeta, x):
    u = lam * x
    val = (x.size * (math.log(lam) - lnbeta) - b * float(np.sum(u))
           + (a - 1.0) * float(np.sum(_log_neg_expm1(u))))
    return -math.inf if math.isnan(val) else val


def bged_loglik(a, b, alpha, lam, lnbeta, x):
    u = lam * x
    lg = _log_neg_expm1(u)
    with np.errstate(divide="ignore"):
        # ln(1 - G^alpha) = ln(-expm1(alpha ln G))
        w = alpha * lg
        tail = np.where(w < -0.693, np.log1p(-np.exp(w)), np.log(-np.expm1(w)))
    val = (x.size * (math.log(alpha * lam) - lnbeta) - float(np.sum(u))
           + (a * alpha - 1.0) * float(np.sum(lg)) + (b - 1.0) * float(np.sum(tail)))
    return -math.inf if math.isnan(val) else val
