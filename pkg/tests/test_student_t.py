import math

import mpmath
import pytest
from scipy import stats

from tvarspread.exceptions import InvalidArgumentError
from tvarspread.student_t import t_cdf, t_logpdf, t_ppf, t_sf, two_sided_quantile

DOFS = [1, 2, 5, 10, 30, 100, 1e6]
PROBS = [0.9, 0.95, 0.975, 0.995]


def mp_quantile(p, dof):
    """50-digit inversion of the incomplete-beta CDF by bisection."""
    with mpmath.workdps(50):
        nu = mpmath.mpf(dof)
        tail = 1 - mpmath.mpf(p)

        def sf(x):
            return mpmath.betainc(nu / 2, mpmath.mpf(1) / 2, 0, nu / (nu + x * x), regularized=True) / 2

        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        while sf(hi) > tail:
            hi *= 2
        for _ in range(200):
            mid = (lo + hi) / 2
            if sf(mid) > tail:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)


@pytest.mark.parametrize("dof", DOFS)
@pytest.mark.parametrize("p", PROBS)
def test_quantile_against_high_precision_oracle(p, dof):
    expected = mp_quantile(p, dof)
    assert t_ppf(p, dof) == pytest.approx(expected, abs=1e-8)
    assert t_ppf(1 - p, dof) == pytest.approx(-expected, abs=1e-8)


def test_known_values():
    assert t_ppf(0.975, 30) == pytest.approx(2.0423, abs=5e-5)
    assert t_ppf(0.975, 1) == pytest.approx(math.tan(math.pi * 0.475), rel=1e-10)
    # two dof has the closed form x = (2p - 1) / sqrt(2 p (1 - p))
    p = 0.995
    assert t_ppf(p, 2) == pytest.approx((2 * p - 1) / math.sqrt(2 * p * (1 - p)), rel=1e-10)
    assert two_sided_quantile(0.05, math.inf) == pytest.approx(1.959963984540054, rel=1e-14)
    assert t_ppf(0.5, 7) == 0.0


def test_cdf_and_density_agree_with_scipy():
    for dof in (1, 3, 12.5, 400):
        for x in (-8.0, -1.3, 0.0, 0.7, 25.0):
            assert t_cdf(x, dof) == pytest.approx(stats.t.cdf(x, dof), rel=1e-12, abs=1e-300)
            assert t_sf(x, dof) == pytest.approx(stats.t.sf(x, dof), rel=1e-12, abs=1e-300)
            assert t_logpdf(x, dof, 0.5, 2.25) == pytest.approx(stats.t.logpdf(x, dof, 0.5, 1.5), rel=1e-12)


def test_extreme_tail_inversion():
    for dof in (3, 50):
        x = t_ppf(1 - 1e-12, dof)
        assert t_sf(x, dof) == pytest.approx(1e-12, rel=1e-8)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, math.nan])
def test_invalid_probability(bad):
    with pytest.raises(InvalidArgumentError):
        t_ppf(bad, 5)


def test_invalid_dof():
    with pytest.raises(InvalidArgumentError):
        t_ppf(0.9, 0)
    with pytest.raises(InvalidArgumentError):
        two_sided_quantile(1.0, 5)
