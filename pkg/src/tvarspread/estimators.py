"""scikit-learn style wrappers around the filter and the hedge-ratio recursion.

Hyperparameters live in ``__init__`` so ``get_params``/``set_params``,
``clone`` and parameter sweeps work as usual; fitted quantities carry a
trailing underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_prices, check_series, check_unit_interval
from .diagnostics import diagnose, log_likelihood
from .filter import Hyperparams, PriorSpec, forecast, run_filter
from .fls import fls_filter
from .monitor import b_interval, verdict

__all__ = ["TVARMonitor", "FLSSpread"]

_TICK_FEATURES = ("f", "Q", "e", "b_hat", "b_lo", "b_hi", "S")


class TVARMonitor(TransformerMixin, BaseEstimator):
    """Online time-varying AR(1) filter with mean-reversion monitoring.

    Parameters
    ----------
    phi1, phi2 : float, default=1.0
        AR coefficients of the intercept and slope evolutions.
    delta1, delta2 : float, default=0.98
        Discount factors; 1.0 freezes the corresponding coefficient.
    m1 : tuple of float, default=(0.0, 0.0)
        Prior mean of (intercept, slope).
    p1 : float, default=1000.0
        Prior covariance scale, ``P1 = p1 * I``.
    n1, d1 : float, default=3.0, 1.0
        Inverse-gamma prior on the observation variance.
    gamma : float, default=0.05
        Credible intervals have level ``1 - gamma``.

    Attributes
    ----------
    state_ : FilterState
        Posterior after the last observation seen.
    records_ : list of StepRecord
        One record per updating tick (the first observation only seeds).
    verdict_ : MonitorVerdict
        Mean-reversion verdict at the last tick.

    Examples
    --------
    >>> from tvarspread import TVARMonitor
    >>> mon = TVARMonitor(delta1=1.0, delta2=1.0).fit([0.3, 0.1, 0.4, 0.2, 0.3])
    >>> mon.state_.t
    5
    """

    def __init__(self, phi1=1.0, phi2=1.0, delta1=0.98, delta2=0.98, m1=(0.0, 0.0), p1=1000.0, n1=3.0, d1=1.0, gamma=0.05):
        self.phi1 = phi1
        self.phi2 = phi2
        self.delta1 = delta1
        self.delta2 = delta2
        self.m1 = m1
        self.p1 = p1
        self.n1 = n1
        self.d1 = d1
        self.gamma = gamma

    def _hyper(self):
        return Hyperparams(self.phi1, self.phi2, self.delta1, self.delta2)

    def _prior(self):
        return PriorSpec(m1=np.asarray(self.m1, dtype=float), P1=float(self.p1) * np.eye(2), n1=self.n1, d1=self.d1)

    def fit(self, y, X=None):
        """Filter ``y`` from the prior, discarding any previous state."""
        y = check_series(y)
        check_unit_interval(self.gamma, "gamma")
        self.state_, self.records_ = run_filter(y, self._prior(), self._hyper())
        self.verdict_ = verdict(self.state_, self.gamma)
        return self

    def partial_fit(self, y, X=None):
        """Continue filtering from the current state (or start fresh)."""
        if not hasattr(self, "state_"):
            return self.fit(y)
        y = check_series(y, min_length=1)
        self.state_, records = run_filter(y, state=self.state_)
        self.records_ = self.records_ + records
        self.verdict_ = verdict(self.state_, self.gamma)
        return self

    def predict(self, X=None):
        """Point forecast of the next observation."""
        check_is_fitted(self, "state_")
        return forecast(self.state_)[0]

    def forecast(self):
        """``(location, squared scale, dof)`` of the next observation's t distribution."""
        check_is_fitted(self, "state_")
        return forecast(self.state_)

    def transform(self, y):
        """Per-tick forecast and slope-band features of a fresh run over ``y``.

        Returns an array of shape ``(len(y) - 1, 7)``; columns are named by
        :meth:`get_feature_names_out`.
        """
        check_is_fitted(self, "state_")
        y = check_series(y)
        _, records = run_filter(y, self._prior(), self._hyper())
        return self._features(records)

    def fit_transform(self, y, X=None, **fit_params):
        return self.fit(y)._features(self.records_)

    def _features(self, records):
        out = np.empty((len(records), len(_TICK_FEATURES)))
        for i, rec in enumerate(records):
            iv = b_interval(rec.posterior, self.gamma)
            out[i] = (rec.f, rec.Q, rec.e, iv.center, iv.lower, iv.upper, rec.posterior.S)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(_TICK_FEATURES, dtype=object)

    def score(self, y, X=None):
        """Mean one-step predictive log-density of a fresh run over ``y``."""
        y = check_series(y)
        _, records = run_filter(y, self._prior(), self._hyper())
        return log_likelihood(records) / len(records)

    def diagnostics(self, k=4):
        check_is_fitted(self, "records_")
        return diagnose(self.records_, k)

    @property
    def b_path_(self):
        check_is_fitted(self, "records_")
        return np.array([rec.posterior.m[1] for rec in self.records_])


class FLSSpread(TransformerMixin, BaseEstimator):
    """Spread ``p1 - beta_t p2`` with ``beta_t`` tracked by flexible least squares.

    Parameters
    ----------
    mu : float, default=1e6
        Penalty on hedge-ratio changes; large values approach running OLS.
    S1, s1 : float, default=0.0
        Initial accumulators.
    demean : bool, default=False
        Regress prices net of their running means.
    """

    def __init__(self, mu=1e6, S1=0.0, s1=0.0, demean=False):
        self.mu = mu
        self.S1 = S1
        self.s1 = s1
        self.demean = demean

    def _run(self, X):
        X = check_prices(X)
        return fls_filter(X[:, 0], X[:, 1], mu=self.mu, S1=self.S1, s1=self.s1, demean=self.demean)

    def fit(self, X, y=None):
        ticks = self._run(X)
        self.betas_ = np.array([tk.beta for tk in ticks])
        self.beta_ = self.betas_[-1]
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        """Spread column of shape ``(n, 1)`` (``n - 1`` rows when demeaning)."""
        check_is_fitted(self, "betas_")
        return np.array([[tk.y] for tk in self._run(X)])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["y"], dtype=object)
