import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvarspread.asymptotics import (
    LimitCovarianceSpec,
    approx_limit_covariance,
    default_truncation,
    inverse_p_recursion,
    limit_covariance,
    sigma2_posterior_variance,
    verify_convergence,
)
from tvarspread.exceptions import ConvergenceConditionError, InvalidArgumentError
from tvarspread.filter import FilterState, Hyperparams, PriorSpec, run_filter, step

from .conftest import ar1_series


class TestLimitCovariance:
    def test_constant_window_geometric_sum(self):
        h = Hyperparams(1, 1, 0.5, 0.98)
        lim = limit_covariance(LimitCovarianceSpec(h, np.full(2000, 2.0), truncation=2000))
        assert lim.p22 == pytest.approx(0.005, rel=1e-12)
        assert lim.p11 == pytest.approx(0.5, rel=1e-12)
        assert lim.truncation_error == pytest.approx(0.98**2000 * 4 / 0.02, rel=1e-9)

    def test_ratio_near_one_gives_reciprocal_J(self):
        h = Hyperparams(1, 1, 1 - 1e-15, 1 - 1e-15)
        for J in (1, 7, 50):
            lim = limit_covariance(LimitCovarianceSpec(h, np.ones(J), truncation=J, components=(1,)))
            assert lim.p11 == pytest.approx(1 / J, rel=1e-9)

    def test_equilibrium_closed_form(self):
        for mu, phi2, d2 in ((2.0, 1.0, 0.98), (0.5, 1.1, 0.9), (3.0, 0.99, 0.95)):
            h = Hyperparams(1.0, phi2, 0.9, d2)
            lim = limit_covariance(LimitCovarianceSpec(h, equilibrium_mu=mu))
            approx = approx_limit_covariance(h, mu)
            assert lim.p22 == pytest.approx(approx[1, 1], rel=1e-10)
            assert lim.p11 == pytest.approx(approx[0, 0], rel=1e-10)
            assert lim.p22 == pytest.approx((phi2**2 - d2) / (phi2**2 * mu**2), rel=1e-10)

    def test_default_truncation(self):
        assert default_truncation(0.5) == 40
        J = default_truncation(0.98)
        assert 0.98**J < 1e-12 <= 0.98 ** (J - 1)

    def test_divergent_configuration(self):
        with pytest.raises(ConvergenceConditionError):
            limit_covariance(LimitCovarianceSpec(Hyperparams(1, 1, 1, 0.98), np.ones(10), truncation=5))
        with pytest.raises(ConvergenceConditionError):
            limit_covariance(LimitCovarianceSpec(Hyperparams(1, 0.9, 0.9, 0.95), np.ones(10), truncation=5))

    def test_short_window(self):
        with pytest.raises(InvalidArgumentError):
            limit_covariance(LimitCovarianceSpec(Hyperparams(1, 1, 0.9, 0.9), np.ones(3), truncation=4))

    @settings(max_examples=100, deadline=None)
    @given(window=st.lists(st.floats(-10, 10), min_size=30, max_size=30), J=st.integers(1, 29), r=st.floats(0.1, 0.99))
    def test_monotone_in_truncation(self, window, J, r):
        h = Hyperparams(1, 1, r, r)
        w = np.array(window)
        small = limit_covariance(LimitCovarianceSpec(h, w, truncation=J))
        big = limit_covariance(LimitCovarianceSpec(h, w, truncation=J + 1))
        assert big.p11 <= small.p11
        if np.any(w[:J] != 0):
            assert big.p22 <= small.p22


class TestSigmaConcentration:
    def test_example(self):
        assert sigma2_posterior_variance(3, 10, 1.0) == pytest.approx(0.18, rel=1e-14)

    def test_zero_scale(self):
        assert sigma2_posterior_variance(3, 10, 0.0) == 0.0

    def test_decay(self):
        vals = [sigma2_posterior_variance(3, t, 1.0) * t for t in (10**3, 10**5, 10**7)]
        assert vals[-1] == pytest.approx(1.0, rel=1e-5)

    def test_domain(self):
        with pytest.raises(InvalidArgumentError):
            sigma2_posterior_variance(3, 2, 1.0)


def _diagonal_state(p11, p22, hyper, y_prev):
    return FilterState(1, np.zeros(2), np.diag([p11, p22]), 3.0, 1.0, y_prev, hyper)


@pytest.mark.parametrize("component", [1, 2])
def test_inverse_recursion_on_diagonal_runs(component):
    h = Hyperparams(0.97, 1.02, 0.95, 0.98)
    y = ar1_series(0.2, 0.25, 400, seed=5)
    p = 10.0
    state = _diagonal_state(p if component == 1 else 0.0, p if component == 2 else 0.0, h, y[0])
    for t in range(1, y.size):
        a = 1.0 if component == 1 else state.y_prev**2
        phi, delta = (h.phi1, h.delta1) if component == 1 else (h.phi2, h.delta2)
        prev = state.P[component - 1, component - 1]
        state, _ = step(state, y[t])
        assert state.P[0, 1] == 0.0
        got = state.P[component - 1, component - 1]
        assert 1 / got == pytest.approx(delta / (phi * phi * prev) + a, rel=1e-10)
        assert got == pytest.approx(inverse_p_recursion(prev, a, phi, delta), rel=1e-10)


def test_static_run_follows_summed_information():
    y = ar1_series(0.2, 0.25, 200, seed=6)
    state = _diagonal_state(0.0, 50.0, Hyperparams(1, 1, 1, 1), y[0])
    info = 1 / 50.0
    for t in range(1, y.size):
        info += y[t - 1] ** 2
        state, _ = step(state, y[t])
        assert state.P[1, 1] == pytest.approx(1 / info, rel=1e-10)


def test_verify_on_mean_reverting_data():
    y = ar1_series(0.2, 0.25, 3000, seed=7)
    h = Hyperparams(1, 1, 1, 0.98)
    _, records = run_filter(y, PriorSpec(), h)
    rep = verify_convergence(records)
    assert rep.ticks_checked == 300
    assert rep.max_rel_dev_p11 is None and rep.p11_limit is None
    assert rep.max_rel_dev_p22 < 0.05 and rep.converged
    d = rep.to_dict()
    for key in ("p11_limit", "p22_limit", "truncation_error", "observed_p11", "observed_p22", "max_offdiag"):
        assert key in d


def test_verify_flags_random_walk():
    rng = np.random.default_rng(8)
    y = 50.0 + np.cumsum(rng.standard_normal(3000))
    _, records = run_filter(y, PriorSpec(), Hyperparams(1, 1, 0.99, 0.98))
    rep = verify_convergence(records)
    assert not rep.converged


def test_verify_needs_a_convergent_component():
    y = ar1_series(0.2, 0.25, 50, seed=1)
    _, records = run_filter(y, PriorSpec(), Hyperparams(1, 1, 1, 1))
    with pytest.raises(ConvergenceConditionError):
        verify_convergence(records)
