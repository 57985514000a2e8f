"""Numerical kernel: special functions, quadrature, optimization, root finding
and 3x3 symmetric linear algebra.

Everything here is a pure function of its inputs, so it is safe to call from
several threads at once.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError, SingularMatrixError

__all__ = [
    "ln_gamma",
    "ln_beta",
    "regularized_incomplete_beta",
    "std_normal_quantile",
    "integrate_semi_infinite",
    "integrate_interval",
    "OptimResult",
    "nelder_mead",
    "brent_root",
    "SymMatrix3",
    "invert_sym3",
]

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_OPT_TOL = 1e-10
DEFAULT_ROOT_TOL = 1e-12
DET_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def _stirling_tail(z):
    # ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2], valid for large z
    z2 = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z


def ln_beta(p: float, q: float) -> float:
    """ln B(p, q), stable when one argument is much larger than the other."""
    p = float(p)
    q = float(q)
    if not (p > 0 and q > 0) or math.isinf(p) or math.isinf(q):
        raise DomainError(f"ln_beta requires finite p, q > 0, got ({p!r}, {q!r})")
    small, big = (p, q) if p <= q else (q, p)
    if big < 1e6 or big < 1e4 * small:
        return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)
    # lgamma(big) - lgamma(big + small) loses all digits once big ~ 1e8, so
    # expand the difference with Stirling's series instead.
    diff = (-(big + small - 0.5) * math.log1p(small / big) - small * math.log(big)
            + small + _stirling_tail(big) - _stirling_tail(big + small))
    return math.lgamma(small) + diff


_TINY = 1e-300
_CF_EPS = 1e-16


def _beta_cf(p, q, x, max_iter):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = p + q
    qap = p + 1.0
    qam = p - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (q - m) * x / ((qam + m2) * (p + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for p={p}, q={q}, x={x}")


def regularized_incomplete_beta(p: float, q: float, x: float,
                                max_iter: int = 200_000) -> float:
    """Regularized incomplete beta function I_x(p, q).

    The continued fraction is evaluated on whichever side of the symmetry
    ``I_x(p, q) = 1 - I_{1-x}(q, p)`` converges fastest.
    """
    p = float(p)
    q = float(q)
    x = float(x)
    if not (p > 0 and q > 0) or math.isinf(p) or math.isinf(q):
        raise DomainError(f"incomplete beta requires p, q > 0, got ({p!r}, {q!r})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = p * math.log(x) + q * math.log1p(-x) - ln_beta(p, q)
    if x < (p + 1.0) / (p + q + 2.0):
        return min(1.0, math.exp(log_front) * _beta_cf(p, q, x, max_iter) / p)
    return max(0.0, 1.0 - math.exp(log_front) * _beta_cf(q, p, 1.0 - x, max_iter) / q)


_NORMAL = NormalDist()


def std_normal_quantile(p: float) -> float:
    """Inverse of the standard normal cdf."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal quantile requires 0 < p < 1, got {p!r}")
    return _NORMAL.inv_cdf(p)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

# Gauss-Kronrod 7/15 nodes on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, centre, ...)
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[[9, 11, 13]] = _WG[2::-1]


def _gk15(g, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    vals = np.asarray(g(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError(f"integrand is not finite on [{lo}, {hi}]")
    k = half * float(np.dot(_WK, vals))
    gauss = half * float(np.dot(_WG_FULL, vals))
    return k, abs(k - gauss)


def _adaptive(g, lo, hi, tol, max_subdivisions):
    val, err = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, val)]
    final_vals = []
    total_err = err
    n_sub = 0
    while total_err > tol:
        if not heap:
            raise ConvergenceError(
                f"quadrature stalled at error {total_err:.3e} > tol {tol:.3e}")
        neg_err, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            # interval is at machine resolution; its estimate stays as is
            final_vals.append(v)
            continue
        n_sub += 1
        if n_sub > max_subdivisions:
            raise ConvergenceError(
                f"quadrature exceeded {max_subdivisions} subdivisions "
                f"(error estimate {total_err:.3e})")
        v1, e1 = _gk15(g, a, m)
        v2, e2 = _gk15(g, m, b)
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        total_err += e1 + e2 + neg_err
    value = math.fsum(final_vals + [item[3] for item in heap])
    return value, total_err


def integrate_interval(f: Callable, lo: float, hi: float, tol: float = DEFAULT_QUAD_TOL,
                       max_subdivisions: int = 2000):
    """Adaptive Gauss-Kronrod quadrature of ``f`` over a finite ``[lo, hi]``.

    ``f`` is called with 1-D arrays of abscissae.  Returns ``(value, error)``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    return _adaptive(f, float(lo), float(hi), tol, max_subdivisions)


def integrate_semi_infinite(f: Callable, tol: float = DEFAULT_QUAD_TOL,
                            max_subdivisions: int = 2000):
    """Integrate ``f`` over ``(0, inf)``.

    The half line is mapped onto ``(0, 1)`` with ``x = t / (1 - t)`` and the
    transformed integrand is handled by globally adaptive Gauss-Kronrod 7/15.
    ``f`` must accept a 1-D ndarray.  Returns ``(value, error_estimate)``;
    raises :class:`ConvergenceError` if the subdivision budget runs out.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")

    def g(t):
        s = 1.0 - t
        return f(t / s) / (s * s)

    return _adaptive(g, 0.0, 1.0, tol, max_subdivisions)


# ---------------------------------------------------------------------------
# optimization and root finding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimResult:
    argmin: np.ndarray
    fmin: float
    iterations: int
    converged: bool
    restarts_used: int = 0


def _finite(v):
    v = float(v)
    return v if v == v else math.inf


def _nm_run(fun, x0, step, tol, max_iter):
    dim = x0.size
    simplex = np.empty((dim + 1, dim))
    simplex[0] = x0
    for i in range(dim):
        simplex[i + 1] = x0
        simplex[i + 1, i] += step[i]
    fvals = np.array([fun(v) for v in simplex])
    it = 0
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        if (np.max(np.abs(simplex[1:] - simplex[0])) <= tol
                and np.max(np.abs(fvals[1:] - fvals[0])) <= tol):
            return simplex[0].copy(), float(fvals[0]), it, True
        if it >= max_iter:
            return simplex[0].copy(), float(fvals[0]), it, False
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = fun(xr)
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = fun(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = fun(xc)
            accept = fc <= fr
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = fun(xc)
            accept = fc < fvals[-1]
        if accept:
            simplex[-1], fvals[-1] = xc, fc
            continue
        # shrink towards the best vertex
        simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
        fvals[1:] = [fun(v) for v in simplex[1:]]


def nelder_mead(objective: Callable, start: Sequence[float], tol: float = DEFAULT_OPT_TOL,
                max_iter: int = 5000, step: float | Sequence[float] = 0.1,
                restarts: int = 1) -> OptimResult:
    """Minimize ``objective`` with the Nelder-Mead simplex method.

    Convergence requires both the simplex extent (max-norm distance of every
    vertex from the best one) and the spread of objective values to fall
    below ``tol``.  After convergence the simplex is rebuilt around the best
    point up to ``restarts`` times, which guards against collapse onto a
    non-stationary point; a restart that improves less than ``tol`` ends the
    search.  ``max_iter`` bounds the total number of iterations; running out
    yields ``converged=False``.  NaN objective values are treated as ``+inf``.
    """
    x0 = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    if x0.ndim != 1:
        raise DomainError("start must be a vector")
    step = np.broadcast_to(np.asarray(step, dtype=float), x0.shape)

    def fun(v):
        return _finite(objective(v))

    f0 = fun(x0)
    if not math.isfinite(f0):
        raise DomainError("objective is not finite at the starting point")
    best, fbest, iters, conv = _nm_run(fun, x0, step, tol, max_iter)
    used = 0
    while conv and used < restarts:
        used += 1
        x1, f1, it1, conv = _nm_run(fun, best, step, tol, max_iter - iters)
        iters += it1
        improved = fbest - f1
        if f1 < fbest:
            best, fbest = x1, f1
        if improved <= tol:
            break
    return OptimResult(argmin=best, fmin=fbest, iterations=iters,
                       converged=conv, restarts_used=used)


def brent_root(f: Callable[[float], float], lo: float, hi: float,
               tol: float = DEFAULT_ROOT_TOL, max_iter: int = 500) -> float:
    """Brent's method for a root of ``f`` inside the bracket ``[lo, hi]``."""
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0 or math.isnan(fa) or math.isnan(fb):
        raise BracketError(f"f({a})={fa} and f({b})={fb} do not bracket a root")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * 2.2e-16 * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = float(f(b))
    raise ConvergenceError("brent_root did not converge")


# ---------------------------------------------------------------------------
# 3x3 symmetric matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymMatrix3:
    """Symmetric 3x3 matrix stored by its six unique entries."""

    m00: float
    m01: float
    m02: float
    m11: float
    m12: float
    m22: float

    @classmethod
    def from_array(cls, arr) -> "SymMatrix3":
        a = np.asarray(arr, dtype=float)
        if a.shape != (3, 3):
            raise DomainError(f"expected a 3x3 matrix, got shape {a.shape}")
        # average the off-diagonal pairs so symmetry holds by construction
        return cls(a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), 0.5 * (a[0, 2] + a[2, 0]),
                   a[1, 1], 0.5 * (a[1, 2] + a[2, 1]), a[2, 2])

    @classmethod
    def identity(cls) -> "SymMatrix3":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)

    def to_array(self) -> np.ndarray:
        return np.array([[self.m00, self.m01, self.m02],
                         [self.m01, self.m11, self.m12],
                         [self.m02, self.m12, self.m22]])

    def __array__(self, dtype=None, copy=None):
        arr = self.to_array()
        return arr if dtype is None else arr.astype(dtype)

    def diag(self) -> np.ndarray:
        return np.array([self.m00, self.m11, self.m22])

    def det(self) -> float:
        return (self.m00 * (self.m11 * self.m22 - self.m12 * self.m12)
                - self.m01 * (self.m01 * self.m22 - self.m12 * self.m02)
                + self.m02 * (self.m01 * self.m12 - self.m11 * self.m02))


def invert_sym3(m: SymMatrix3, det_floor: float = DET_FLOOR) -> SymMatrix3:
    """Inverse of a symmetric 3x3 matrix via its adjugate."""
    det = m.det()
    if not abs(det) >= det_floor:
        raise SingularMatrixError(det)
    c00 = m.m11 * m.m22 - m.m12 * m.m12
    c01 = m.m02 * m.m12 - m.m01 * m.m22
    c02 = m.m01 * m.m12 - m.m02 * m.m11
    c11 = m.m00 * m.m22 - m.m02 * m.m02
    c12 = m.m01 * m.m02 - m.m00 * m.m12
    c22 = m.m00 * m.m11 - m.m01 * m.m01
    return SymMatrix3(c00 / det, c01 / det, c02 / det, c11 / det, c12 / det, c22 / det)
