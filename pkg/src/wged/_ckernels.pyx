# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled likelihood kernels (same interface as ``_pykernels``)."""

from libc.math cimport exp, expm1, log, log1p, INFINITY, isnan

NAME = "cython"


cdef inline double _log_expm1(double u) nogil:
    if u > 30.0:
        return u + log1p(-exp(-u))
    return log(expm1(u))


cdef inline double _log_neg_expm1(double u) nogil:
    if u > 0.693:
        return log1p(-exp(-u))
    return log(-expm1(-u))


def wged_loglik(double a, double b, double lam, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, L, s_u = 0.0, s_l = 0.0, s_h = 0.0, val
    with nogil:
        for i in range(n):
            u = lam * x[i]
            L = _log_expm1(u)
            s_u += u
            s_l += L
            s_h += exp(b * L)
    val = n * log(a * b * lam) + s_u + (b - 1.0) * s_l - a * s_h
    if isnan(val):
        return -INFINITY
    return val


def wged_profile(double b, double lam, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, L, z, zmax = -INFINITY, s_u = 0.0, s_l = 0.0, s_e = 0.0
    cdef double log_a, val
    with nogil:
        for i in range(n):
            u = lam * x[i]
            L = _log_expm1(u)
            s_u += u
            s_l += L
            z = b * L
            if z > zmax:
                zmax = z
        for i in range(n):
            s_e += exp(b * _log_expm1(lam * x[i]) - zmax)
    log_a = log(<double> n) - (zmax + log(s_e))
    val = n * (log_a + log(b * lam)) + s_u + (b - 1.0) * s_l - n
    return exp(log_a), val


def wged_score(double a, double b, double lam, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, L, P, ratio, Q, xi
    cdef double s_p = 0.0, s_l = 0.0, s_pl = 0.0, s_x = 0.0, s_xr = 0.0, s_xq = 0.0
    with nogil:
        for i in range(n):
            xi = x[i]
            u = lam * xi
            L = _log_expm1(u)
            P = exp(b * L)
            ratio = 1.0 / (-expm1(-u))
            Q = exp(u + (b - 1.0) * L)
            s_p += P
            s_l += L
            s_pl += P * L
            s_x += xi
            s_xr += xi * ratio
            s_xq += xi * Q
    return (n / a - s_p,
            n / b + s_l - a * s_pl,
            n / lam + s_x + (b - 1.0) * s_xr - a * b * s_xq)


def wged_info(double a, double b, double lam, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, L, P, ratio, Q, R, T, xi
    cdef double s_pl = 0.0, s_xq = 0.0, s_pll = 0.0, s_xr = 0.0, s_xqbl = 0.0
    cdef double s_xxr = 0.0, s_xxt = 0.0
    with nogil:
        for i in range(n):
            xi = x[i]
            u = lam * xi
            L = _log_expm1(u)
            P = exp(b * L)
            ratio = 1.0 / (-expm1(-u))
            Q = exp(u + (b - 1.0) * L)
            R = ratio * exp(-L)
            T = Q * (b * exp(u) - 1.0) * exp(-L)
            s_pl += P * L
            s_xq += xi * Q
            s_pll += P * L * L
            s_xr += xi * ratio
            s_xqbl += xi * Q * (b * L + 1.0)
            s_xxr += xi * xi * R
            s_xxt += xi * xi * T
    return (n / (a * a),
            s_pl,
            b * s_xq,
            n / (b * b) + a * s_pll,
            -(s_xr - a * s_xqbl),
            n / (lam * lam) + (b - 1.0) * s_xxr + a * b * s_xxt)


def ged_loglik(double alpha, double lam, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, s_u = 0.0, s_g = 0.0, val
    with nogil:
        for i in range(n):
            u = lam * x[i]
            s_u += u
            s_g += _log_neg_expm1(u)
    val = n * log(alpha * lam) - s_u + (alpha - 1.0) * s_g
    if isnan(val):
        return -INFINITY
    return val


def bed_loglik(double a, double b, double lam, double lnbeta, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, s_u = 0.0, s_g = 0.0, val
    with nogil:
        for i in range(n):
            u = lam * x[i]
            s_u += u
            s_g += _log_neg_expm1(u)
    val = n * (log(lam) - lnbeta) - b * s_u + (a - 1.0) * s_g
    if isnan(val):
        return -INFINITY
    return val


def bged_loglik(double a, double b, double alpha, double lam, double lnbeta,
                const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, lg, w, s_u = 0.0, s_g = 0.0, s_t = 0.0, val
    with nogil:
        for i in range(n):
            u = lam * x[i]
            lg = _log_neg_expm1(u)
            w = alpha * lg
            s_u += u
            s_g += lg
            if w < -0.693:
                s_t += log1p(-exp(w))
            else:
                s_t += log(-expm1(w))
    val = (n * (log(alpha * lam) - lnbeta) - s_u + (a * alpha - 1.0) * s_g
           + (b - 1.0) * s_t)
    if isnan(val):
        return -INFINITY
    return val
