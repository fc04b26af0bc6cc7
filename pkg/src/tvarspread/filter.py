"""Conjugate recursive estimation for the time-varying AR(1) spread model.

The observed spread follows ``y_t = A_t + B_t * y_{t-1} + eps_t`` where the
coefficient vector ``theta_t = (A_t, B_t)`` evolves as
``theta_t = Phi theta_{t-1} + nu_t`` with ``Phi = diag(phi1, phi2)``.  The
evolution covariance is never specified directly; it is implied by two
discount factors (component discounting).  Under a Normal/Inverse-Gamma
prior every posterior is available in closed form and is advanced one
observation at a time by :func:`step`.

All arithmetic is carried out on Python floats for the 2x2 case, which keeps
a single step cheap and makes replay bitwise deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    ConditioningError,
    InvalidArgumentError,
    InvalidPriorError,
    NonFiniteObservationError,
)

__all__ = [
    "Hyperparams",
    "PriorSpec",
    "FilterState",
    "StepRecord",
    "STATIC",
    "init_state",
    "discount_evolution_covariance",
    "evolution_prior",
    "step",
    "forecast",
    "run_filter",
]

# eigenvalues of P below -PSD_RTOL * trace(P) are treated as a conditioning failure
PSD_RTOL = 1e-9


@dataclass(frozen=True)
class Hyperparams:
    """State-evolution coefficients and discount factors.

    Parameters
    ----------
    phi1, phi2 : float
        AR coefficients of the intercept and slope evolutions.
    delta1, delta2 : float
        Discount factors in (0, 1] for the intercept and the slope.
    """

    phi1: float = 1.0
    phi2: float = 1.0
    delta1: float = 0.98
    delta2: float = 0.98

    def __post_init__(self):
        for name in ("phi1", "phi2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v == 0.0:
                raise InvalidArgumentError(f"{name} must be finite and nonzero, got {v!r}")
        for name in ("delta1", "delta2"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise InvalidArgumentError(f"{name} must lie in (0, 1], got {v!r}")

    @property
    def is_static(self) -> bool:
        return self.phi1 == 1.0 and self.phi2 == 1.0 and self.delta1 == 1.0 and self.delta2 == 1.0

    @property
    def Phi(self) -> np.ndarray:
        return np.diag([self.phi1, self.phi2])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.phi1, self.phi2, self.delta1, self.delta2)

    def to_dict(self) -> dict:
        return {"phi1": self.phi1, "phi2": self.phi2, "delta1": self.delta1, "delta2": self.delta2}


STATIC = Hyperparams(1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """Normal/Inverse-Gamma prior on ``(theta_1, sigma^2)``.

    ``theta_1 | sigma^2 ~ N(m1, sigma^2 P1)`` and ``sigma^2 ~ IG(n1/2, d1/2)``.
    The defaults are the weakly informative choice ``m1 = 0``,
    ``P1 = 1000 I``, ``n1 = 3``, ``d1 = 1``.
    """

    m1: np.ndarray = field(default_factory=lambda: np.zeros(2))
    P1: np.ndarray = field(default_factory=lambda: 1000.0 * np.eye(2))
    n1: float = 3.0
    d1: float = 1.0

    def __post_init__(self):
        m1 = np.asarray(self.m1, dtype=float).reshape(-1)
        P1 = np.asarray(self.P1, dtype=float)
        if P1.ndim == 0:
            P1 = float(P1) * np.eye(2)
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "P1", P1)
        self.validate()

    def validate(self):
        if self.m1.shape != (2,) or not np.all(np.isfinite(self.m1)):
            raise InvalidPriorError(f"m1 must be a finite 2-vector, got {self.m1!r}")
        if self.P1.shape != (2, 2) or not np.all(np.isfinite(self.P1)):
            raise InvalidPriorError("P1 must be a finite 2x2 matrix")
        if not np.allclose(self.P1, self.P1.T, rtol=1e-12, atol=0.0):
            raise InvalidPriorError("P1 must be symmetric")
        if np.linalg.eigvalsh(self.P1).min() <= 0.0:
            raise InvalidPriorError("P1 must be positive definite")
        if not (math.isfinite(self.n1) and self.n1 > 0):
            raise InvalidPriorError(f"n1 must be positive, got {self.n1!r}")
        if not (math.isfinite(self.d1) and self.d1 > 0):
            raise InvalidPriorError(f"d1 must be positive, got {self.d1!r}")


@dataclass(frozen=True, eq=False)
class FilterState:
    """Posterior summary after processing observations up to tick ``t``.

    ``theta_t | sigma^2, y^t ~ N(m, sigma^2 P)`` and
    ``sigma^2 | y^t ~ IG(n/2, d/2)``; ``S = d / n`` is the point estimate of
    the observation variance and ``y_prev`` the last observed spread.
    """

    t: int
    m: np.ndarray
    P: np.ndarray
    n: float
    d: float
    y_prev: float
    hyper: Hyperparams = STATIC

    @property
    def S(self) -> float:
        return self.d / self.n

    @property
    def F_next(self) -> np.ndarray:
        """Regression vector for the next observation, ``(1, y_prev)``."""
        return np.array([1.0, self.y_prev])

    def to_dict(self) -> dict:
        return {
            "t": int(self.t),
            "m": [float(v) for v in self.m],
            "P": [[float(v) for v in row] for row in self.P],
            "n": float(self.n),
            "d": float(self.d),
            "S": float(self.S),
            "y_prev": float(self.y_prev),
        }

    @classmethod
    def from_dict(cls, data: dict, hyper: Hyperparams = STATIC) -> "FilterState":
        return cls(
            t=int(data["t"]),
            m=np.asarray(data["m"], dtype=float),
            P=np.asarray(data["P"], dtype=float),
            n=float(data["n"]),
            d=float(data["d"]),
            y_prev=float(data["y_prev"]),
            hyper=hyper,
        )

    def __eq__(self, other):
        if not isinstance(other, FilterState):
            return NotImplemented
        return (
            self.t == other.t
            and np.array_equal(self.m, other.m)
            and np.array_equal(self.P, other.P)
            and self.n == other.n
            and self.d == other.d
            and self.y_prev == other.y_prev
            and self.hyper == other.hyper
        )


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Per-tick forecast quantities and the posterior that resulted.

    ``f`` and ``Q`` are the location and (scaled) variance of the one-step
    predictive distribution, ``e = y - f`` the forecast error and ``r`` the
    posterior residual.  ``n_prev`` and ``S_prev`` are the degrees of freedom
    and variance estimate *before* the update, so the predictive density of
    ``y_t`` is Student-t with ``n_prev`` dof, location ``f`` and scale
    ``Q * S_prev``.
    """

    t: int
    f: float
    Q: float
    e: float
    r: float
    n_prev: float
    S_prev: float
    posterior: FilterState

    @property
    def y(self) -> float:
        return self.posterior.y_prev

    def to_dict(self) -> dict:
        return {
            "t": int(self.t),
            "f": float(self.f),
            "Q": float(self.Q),
            "e": float(self.e),
            "r": float(self.r),
            "n_prev": float(self.n_prev),
            "S_prev": float(self.S_prev),
        }

    def __eq__(self, other):
        if not isinstance(other, StepRecord):
            return NotImplemented
        return self.to_dict() == other.to_dict() and self.posterior == other.posterior


def init_state(prior: PriorSpec, hyper: Hyperparams, y1: float) -> FilterState:
    """Seed the filter with the prior and the first observation.

    No posterior update happens at ``t = 1``; ``y1`` only defines the
    regression vector of the first real step.
    """
    prior.validate()
    y1 = float(y1)
    if not math.isfinite(y1):
        raise NonFiniteObservationError(f"first observation must be finite, got {y1!r}")
    return FilterState(
        t=1,
        m=prior.m1.copy(),
        P=prior.P1.copy(),
        n=float(prior.n1),
        d=float(prior.d1),
        y_prev=y1,
        hyper=hyper,
    )


def discount_evolution_covariance(P_prev, hyper: Hyperparams) -> np.ndarray:
    """Evolution covariance implied by component discounting.

    Only the diagonal of ``P_prev`` enters, so ``R = Phi P Phi + V`` has
    diagonal ``phi_i**2 p_ii / delta_i`` and keeps the off-diagonal
    ``phi1 phi2 p12`` of ``Phi P Phi``.
    """
    P_prev = np.asarray(P_prev, dtype=float)
    v11 = (1.0 - hyper.delta1) / hyper.delta1 * hyper.phi1**2 * P_prev[0, 0]
    v22 = (1.0 - hyper.delta2) / hyper.delta2 * hyper.phi2**2 * P_prev[1, 1]
    return np.array([[v11, 0.0], [0.0, v22]])


def evolution_prior(state: FilterState) -> tuple[np.ndarray, np.ndarray]:
    """Prior mean ``Phi m`` and scaled covariance ``R`` for the next tick."""
    h = state.hyper
    a1, a2, r11, r12, r22 = _evolve(state.m, state.P, h)
    return np.array([a1, a2]), np.array([[r11, r12], [r12, r22]])


def _evolve(m, P, h):
    r11 = h.phi1 * h.phi1 * P[0][0] / h.delta1
    r22 = h.phi2 * h.phi2 * P[1][1] / h.delta2
    r12 = h.phi1 * h.phi2 * 0.5 * (P[0][1] + P[1][0])
    return h.phi1 * m[0], h.phi2 * m[1], r11, r12, r22


def _check_psd(p11, p12, p22, t):
    tr = p11 + p22
    half_gap = math.hypot(0.5 * (p11 - p22), p12)
    lam_min = 0.5 * tr - half_gap
    if lam_min < -PSD_RTOL * abs(tr):
        raise ConditioningError(
            f"posterior covariance lost positive semi-definiteness at t={t} "
            f"(smallest eigenvalue {lam_min:.3e}, trace {tr:.3e})"
        )


def _update(m, P, n, d, y_prev, y, h, t):
    """One conjugate update on plain floats; returns the new moments and the record values."""
    a1, a2, r11, r12, r22 = _evolve(m, P, h)
    rf1 = r11 + r12 * y_prev
    rf2 = r12 + r22 * y_prev
    Q = rf1 + y_prev * rf2 + 1.0
    f = a1 + a2 * y_prev
    e = y - f
    k1 = rf1 / Q
    k2 = rf2 / Q
    m1 = a1 + k1 * e
    m2 = a2 + k2 * e
    p11 = r11 - k1 * rf1
    p12 = r12 - k1 * rf2
    p22 = r22 - k2 * rf2
    _check_psd(p11, p12, p22, t)
    # y - F'm_t equals e / Q exactly in real arithmetic; the direct
    # difference cancels badly once Q is large, the quotient does not.
    r = e / Q
    n_new = n + 1.0
    d_new = d + r * e
    return (m1, m2), (p11, p12, p22), n_new, d_new, f, Q, e, r


def step(state: FilterState, y: float) -> tuple[FilterState, StepRecord]:
    """Advance the posterior by one observation.

    Parameters
    ----------
    state : FilterState
        Posterior after tick ``t``.
    y : float
        Observation at tick ``t + 1``.

    Returns
    -------
    new_state : FilterState
    record : StepRecord

    Raises
    ------
    NonFiniteObservationError
        If ``y`` is NaN or infinite; ``state`` is left untouched.
    ConditioningError
        If the updated covariance is not PSD within tolerance.
    """
    y = float(y)
    if not math.isfinite(y):
        raise NonFiniteObservationError(f"observation at t={state.t + 1} is not finite: {y!r}")
    t = state.t + 1
    (m1, m2), (p11, p12, p22), n, d, f, Q, e, r = _update(
        state.m, state.P, state.n, state.d, state.y_prev, y, state.hyper, t
    )
    new_state = FilterState(
        t=t,
        m=np.array([m1, m2]),
        P=np.array([[p11, p12], [p12, p22]]),
        n=n,
        d=d,
        y_prev=y,
        hyper=state.hyper,
    )
    record = StepRecord(t=t, f=f, Q=Q, e=e, r=r, n_prev=state.n, S_prev=state.S, posterior=new_state)
    return new_state, record


def forecast(state: FilterState) -> tuple[float, float, float]:
    """One-step-ahead Student-t predictive parameters ``(location, scale, dof)``.

    ``scale`` is the squared scale ``Q * S`` (a variance-like quantity), as
    in ``y_{t+1} | y^t ~ t(n, f, Q S)``.
    """
    a1, a2, r11, r12, r22 = _evolve(state.m, state.P, state.hyper)
    x = state.y_prev
    f = a1 + a2 * x
    Q = r11 + 2.0 * r12 * x + r22 * x * x + 1.0
    return f, Q * state.S, state.n


def run_filter(
    y: Sequence[float] | Iterable[float],
    prior: PriorSpec | None = None,
    hyper: Hyperparams | None = None,
    state: FilterState | None = None,
) -> tuple[FilterState, list[StepRecord]]:
    """Filter a whole series.

    When ``state`` is given the series continues from it; otherwise the
    first element of ``y`` seeds a fresh state built from ``prior`` and
    ``hyper``.
    """
    it = iter(y)
    if state is None:
        prior = PriorSpec() if prior is None else prior
        hyper = Hyperparams() if hyper is None else hyper
        try:
            first = next(it)
        except StopIteration:
            raise InvalidArgumentError("cannot filter an empty series") from None
        state = init_state(prior, hyper, first)
    records = []
    for value in it:
        state, rec = step(state, value)
        records.append(rec)
    return state, records
