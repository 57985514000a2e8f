import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from wged import core, gof
from wged.data import GLASS_FIBRE
from wged.errors import DomainError
from wged.estimation import Sample

FIBRE = Sample(GLASS_FIBRE)


def test_ks_single_point():
    for method in ("pointwise", "classical"):
        assert gof.ks_statistic([2.0], lambda x: np.full_like(x, 0.5), method=method) == 0.5


def test_ks_published_statistics():
    d_wged = gof.ks_statistic(FIBRE, lambda x: core.cdf((56.881, 4.893, 0.222), x))
    assert abs(d_wged - 0.127366) <= 1e-3
    d_ed = gof.ks_statistic(FIBRE, lambda x: -np.expm1(-0.664 * x))
    assert abs(d_ed - 0.402316) <= 1e-3


def test_ks_classical_against_scipy():
    rng = np.random.default_rng(42)
    for n in (1, 5, 63, 500):
        x = rng.gamma(2.0, size=n)
        cdf = stats.gamma(2.2).cdf
        assert_allclose(gof.ks_statistic(x, cdf, method="classical"),
                        stats.kstest(x, cdf).statistic, rtol=1e-12)


def test_ks_pointwise_never_exceeds_classical():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.exponential(size=40)
        cdf = stats.expon(scale=rng.uniform(0.5, 2)).cdf
        assert gof.ks_statistic(x, cdf) <= gof.ks_statistic(x, cdf, method="classical")


def test_ks_invariant_under_monotone_transform():
    p = (56.881, 4.893, 0.222)
    direct = gof.ks_statistic(FIBRE, lambda x: core.cdf(p, x), method="classical")
    cubed = gof.ks_statistic(FIBRE.values ** 3, lambda y: core.cdf(p, np.cbrt(y)),
                             method="classical")
    assert_allclose(direct, cubed, rtol=1e-12)
    direct = gof.ks_statistic(FIBRE, lambda x: core.cdf(p, x))
    cubed = gof.ks_statistic(FIBRE.values ** 3, lambda y: core.cdf(p, np.cbrt(y)))
    assert_allclose(direct, cubed, rtol=1e-12)


def test_ks_bad_method():
    with pytest.raises(DomainError):
        gof.ks_statistic([1.0], lambda x: x / 2, method="two-sided")


def test_pvalue_trivial():
    for n in (1, 10, 63, 5000):
        assert gof.ks_pvalue(0.0, n) == 1.0
    assert gof.ks_pvalue(1.0, 10, "exact") == 0.0
    with pytest.raises(DomainError):
        gof.ks_pvalue(1.5, 10)
    with pytest.raises(DomainError):
        gof.ks_pvalue(0.2, 0)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 63, 100])
def test_pvalue_exact_against_scipy(n):
    for d in np.linspace(0.01, 0.99, 50):
        assert abs(gof.ks_pvalue(d, n, "exact") - stats.kstwo.sf(d, n)) <= 1e-10


def test_pvalue_asymptotic_against_scipy():
    for n in (63, 2000):
        for d in np.linspace(0.02, 0.5, 25):
            assert abs(gof.ks_pvalue(d, n, "asymptotic")
                       - stats.kstwobign.sf(d * math.sqrt(n))) <= 1e-11


def test_pvalue_table_values():
    assert abs(gof.ks_pvalue(0.127366, 63, "exact") - 0.24259) <= 0.02
    assert gof.ks_pvalue(0.402316, 63, "exact") < 1e-7


def _method_gap(n, grid):
    return max(abs(gof.ks_pvalue(d, n, "exact") - gof.ks_pvalue(d, n, "asymptotic"))
               for d in grid)


@pytest.mark.xfail(strict=True, reason="the uncorrected Kolmogorov limit trails the exact "
                   "p-value by up to 0.0335 near d = 0.09 at n = 63")
def test_pvalue_methods_agree_at_n63():
    assert _method_gap(63, np.linspace(0.02, 0.6, 59)) <= 0.03


def test_pvalue_method_gap_shrinks_like_root_n():
    gaps = [_method_gap(n, np.linspace(0.3, 3.0, 55) / math.sqrt(n)) for n in (16, 63, 250)]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    assert all(g * math.sqrt(n) < 0.3 for g, n in zip(gaps, (16, 63, 250)))


def test_pvalue_nonincreasing():
    for n in (3, 63, 2000):
        ps = [gof.ks_pvalue(d, n) for d in np.linspace(0, 1, 201)]
        assert all(b <= a + 1e-15 for a, b in zip(ps, ps[1:]))


def test_pvalue_auto_switch():
    assert gof.ks_pvalue(0.05, 1000) == gof.ks_pvalue(0.05, 1000, "exact")
    assert gof.ks_pvalue(0.05, 1001) == gof.ks_pvalue(0.05, 1001, "asymptotic")


def test_information_criteria_table_rows():
    aic, aicc, bic, hqic = gof.information_criteria(-14.828, 3, 63)
    assert_allclose([aic, aicc, bic, hqic], [35.656, 36.0628, 42.0854, 38.1847], atol=1e-3)
    aic, _, bic, _ = gof.information_criteria(-88.830, 1, 63)
    assert_allclose([aic, bic], [179.660, 181.8031], atol=1e-3)


def test_information_criteria_limits():
    assert gof.information_criteria(0.0, 0, 10) == (0.0, 0.0, 0.0, 0.0)
    aic, aicc, _, _ = gof.information_criteria(-100.0, 4, 10 ** 6)
    assert 0 <= aicc - aic < 1e-4
    for n, k in [(4, 3), (3, 3), (1, 0)]:
        with pytest.raises(DomainError):
            gof.information_criteria(-1.0, k, n)


def test_aicc_at_least_aic():
    for k in range(0, 6):
        for n in (k + 2, 20, 63):
            aic, aicc, _, _ = gof.information_criteria(-10.0, k, n)
            assert aicc >= aic


def test_kaplan_meier_small():
    km = gof.kaplan_meier([1.0, 2.0, 3.0])
    assert_allclose(km.survival, [2 / 3, 1 / 3, 0.0])
    assert km.at_risk.tolist() == [3, 2, 1]
    assert km.events.tolist() == [1, 1, 1]
    assert km.at(0.5) == 1.0 and km.at(2.0) == pytest.approx(1 / 3)


def test_kaplan_meier_is_one_minus_ecdf():
    km = gof.kaplan_meier(FIBRE)
    n = FIBRE.n
    for t, s_hat in zip(km.times, km.survival):
        above = sum(1 for v in GLASS_FIBRE if v > t)
        assert Fraction(s_hat).limit_denominator(1000) == Fraction(above, n)
    # product-limit form agrees with the counting form
    prod = np.cumprod(1 - km.events / km.at_risk)
    assert_allclose(prod, km.survival, atol=1e-14)
    assert np.all(np.diff(km.survival) < 0) and km.survival[-1] == 0.0


def test_kaplan_meier_ties():
    km = gof.kaplan_meier(FIBRE)
    i = int(np.flatnonzero(km.times == 1.61)[0])
    # 1.61 occurs four times in the data
    assert km.events[i] == 4
    before = km.survival[i - 1]
    assert_allclose(before - km.survival[i], 4 / 63, atol=1e-15)


def test_gof_report_fields():
    rep = gof.gof_report(FIBRE, lambda x: -np.expm1(-0.664 * x), -88.83, 1)
    assert rep.k == 1 and rep.n == 63
    assert 0 <= rep.ks_stat <= 1 and 0 <= rep.ks_pvalue <= 1
    assert rep.aicc >= rep.aic
    assert set(rep.as_dict()) == {"loglik", "k", "n", "aic", "aicc", "bic", "hqic",
                                  "ks_stat", "ks_pvalue"}
