import math
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wged import backend, core, estimation
from wged.data import GLASS_FIBRE
from wged.numerics import ln_beta

needs_cython = pytest.mark.skipif("cython" not in backend.available(),
                                  reason="compiled kernels not built")


def _cases(seed=42, count=25):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 200))
        x = np.ascontiguousarray(rng.exponential(rng.uniform(0.2, 3.0), n) + 1e-6)
        yield x, np.exp(rng.uniform(-1.5, 1.5, 4))


@pytest.fixture
def restore_backend():
    previous = backend.name()
    yield
    backend.set_backend(previous)


def test_python_always_available():
    assert "python" in backend.available()
    assert backend.get("python").NAME == "python"
    with pytest.raises(ValueError):
        backend.get("fortran")


@needs_cython
def test_compiled_is_default():
    if os.environ.get("WGED_PURE_PYTHON", "") in ("", "0"):
        assert backend.name() == "cython"


@needs_cython
@pytest.mark.parametrize("fn", ["wged_loglik", "wged_score", "wged_info"])
def test_wged_kernels_agree(fn):
    c, py = getattr(backend.get("cython"), fn), getattr(backend.get("python"), fn)
    for x, (a, b, lam, _) in _cases():
        assert_allclose(c(a, b, lam, x), py(a, b, lam, x), rtol=1e-10, atol=1e-9)


@needs_cython
def test_profile_kernel_agrees():
    c, py = backend.get("cython"), backend.get("python")
    for x, (_, b, lam, _) in _cases():
        assert_allclose(c.wged_profile(b, lam, x), py.wged_profile(b, lam, x), rtol=1e-10)


@needs_cython
def test_competitor_kernels_agree():
    c, py = backend.get("cython"), backend.get("python")
    for x, (a, b, alpha, lam) in _cases(7):
        lb = ln_beta(a, b)
        assert_allclose(c.ged_loglik(alpha, lam, x), py.ged_loglik(alpha, lam, x), rtol=1e-10)
        assert_allclose(c.bed_loglik(a, b, lam, lb, x), py.bed_loglik(a, b, lam, lb, x),
                        rtol=1e-10)
        assert_allclose(c.bged_loglik(a, b, alpha, lam, lb, x),
                        py.bged_loglik(a, b, alpha, lam, lb, x), rtol=1e-10)


@needs_cython
def test_overflow_sentinel_both_backends():
    x = np.array([900.0, 1.0])
    for name in ("python", "cython"):
        assert backend.get(name).wged_loglik(1.0, 2.0, 1.0, x) == -math.inf


@needs_cython
def test_large_argument_stability():
    # ln(e^u - 1) takes the asymptotic branch for large lambda x
    x = np.array([40.0, 80.0, 120.0])
    vals = [backend.get(n).wged_loglik(1e-40, 0.5, 1.0, x) for n in ("python", "cython")]
    assert all(math.isfinite(v) for v in vals)
    assert_allclose(vals[0], vals[1], rtol=1e-12)


@needs_cython
def test_set_backend_switches_everywhere(restore_backend):
    s = estimation.Sample(GLASS_FIBRE)
    p = (56.881, 4.893, 0.222)
    before = backend.name()
    assert backend.set_backend("python") == before
    assert backend.name() == "python"
    ll_py = estimation.log_likelihood(p, s)
    backend.set_backend("cython")
    assert backend.name() == "cython"
    assert_allclose(estimation.log_likelihood(p, s), ll_py, rtol=1e-12)


@needs_cython
def test_fit_agrees_across_backends(restore_backend):
    s = estimation.Sample(core.sample((0.5, 3.0, 2.0), 400, seed=42))
    backend.set_backend("python")
    fit_py = estimation.fit_mle(s)
    backend.set_backend("cython")
    fit_c = estimation.fit_mle(s)
    assert_allclose(fit_c.params.astuple(), fit_py.params.astuple(), rtol=1e-5)
    assert abs(fit_c.loglik - fit_py.loglik) <= 1e-8


def test_environment_forces_fallback():
    env = dict(os.environ, WGED_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from wged import backend; print(backend.name())"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
