import numpy as np
import pytest

from tvarspread.filter import FilterState, Hyperparams


def make_state(m=(0.0, 0.0), P=((1000.0, 0.0), (0.0, 1000.0)), n=3.0, d=1.0, y_prev=1.0, hyper=None, t=1):
    return FilterState(
        t=t,
        m=np.asarray(m, dtype=float),
        P=np.asarray(P, dtype=float),
        n=float(n),
        d=float(d),
        y_prev=float(y_prev),
        hyper=hyper if hyper is not None else Hyperparams(1.0, 1.0, 1.0, 1.0),
    )


def ar1_series(A, B, T, seed, sigma=1.0):
    """Plain AR(1) draws used as test data, independent of the package simulator."""
    rng = np.random.default_rng(seed + 10_000)
    z = rng.standard_normal(T)
    y = np.empty(T)
    y[0] = A / (1.0 - B)
    for t in range(1, T):
        y[t] = A + B * y[t - 1] + sigma * z[t]
    return y


@pytest.fixture
def state_factory():
    return make_state
