"""Online estimation and mean-reversion monitoring of price spreads.

The spread is modelled as an AR(1) process whose intercept and slope drift
over time; a conjugate discount-factor filter tracks both and the slope's
posterior tells whether the spread is still mean reverting.
"""

from .diagnostics import (
    BayesFactorSeries,
    DiagnosticsReport,
    HyperGrid,
    aic_bic,
    bayes_factors,
    log_likelihood,
    msse,
    optimize_hyperparams,
)
from .estimators import FLSSpread, TVARMonitor
from .exceptions import TvarSpreadError
from .filter import (
    STATIC,
    FilterState,
    Hyperparams,
    PriorSpec,
    StepRecord,
    discount_evolution_covariance,
    forecast,
    init_state,
    run_filter,
    step,
)
from .fls import FlsState, fls_filter, fls_init, fls_step, make_spread
from .monitor import b_interval, obs_interval, signal, state_interval, verdict

__version__ = "0.1.0"

__all__ = [
    "BayesFactorSeries",
    "DiagnosticsReport",
    "FLSSpread",
    "FilterState",
    "FlsState",
    "HyperGrid",
    "Hyperparams",
    "PriorSpec",
    "STATIC",
    "StepRecord",
    "TVARMonitor",
    "TvarSpreadError",
    "aic_bic",
    "b_interval",
    "bayes_factors",
    "discount_evolution_covariance",
    "fls_filter",
    "fls_init",
    "fls_step",
    "forecast",
    "init_state",
    "log_likelihood",
    "make_spread",
    "msse",
    "obs_interval",
    "optimize_hyperparams",
    "run_filter",
    "signal",
    "state_interval",
    "step",
    "verdict",
]
