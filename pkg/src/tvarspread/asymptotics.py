"""Limiting posterior covariance and concentration of the variance posterior.

For a diagonal covariance the discount recursion reads

    1 / p_ii,t = delta_i / (phi_i^2 p_ii,t-1) + a_i,t,   a_1,t = 1,  a_2,t = y_{t-1}^2,

so ``p_ii,t`` settles at the reciprocal of a geometric series in the recent
regressors whenever ``delta_i < phi_i^2``.  The approximate closed form often
quoted for ``y_t ~ mu`` is ``p22 = (phi2^2 - delta2) / (phi2^2 mu^2)``; the
series itself is what is computed here.

The full filter keeps an off-diagonal covariance term that the diagonal
argument ignores, so :func:`verify_convergence` compares diagonals only and
reports the largest off-diagonal magnitude on the side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConvergenceConditionError, InvalidArgumentError
from .filter import Hyperparams, StepRecord

__all__ = [
    "LimitCovarianceSpec",
    "LimitCovariance",
    "ConvergenceReport",
    "default_truncation",
    "limit_covariance",
    "approx_limit_covariance",
    "sigma2_posterior_variance",
    "inverse_p_recursion",
    "verify_convergence",
]


@dataclass(frozen=True, eq=False)
class LimitCovarianceSpec:
    """Inputs to the limiting-covariance series.

    ``window`` lists the most recent observations newest first:
    ``y_{t-1}, y_{t-2}, ...``.  ``components`` selects which diagonal
    entries to evaluate; an entry whose ``delta_i >= phi_i**2`` cannot be
    requested.  Setting ``equilibrium_mu`` replaces every ``y`` in the window
    by that constant level.
    """

    hyper: Hyperparams
    window: np.ndarray = ()
    truncation: int | None = None
    equilibrium_mu: float | None = None
    components: tuple = (1, 2)


@dataclass(frozen=True)
class LimitCovariance:
    p11: float | None
    p22: float | None
    truncation: int
    truncation_error: float

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([np.nan if self.p11 is None else self.p11, np.nan if self.p22 is None else self.p22])


@dataclass(frozen=True)
class ConvergenceReport:
    p11_limit: float | None
    p22_limit: float | None
    truncation_error: float
    observed_p11: float
    observed_p22: float
    max_offdiag: float
    max_rel_dev_p11: float | None
    max_rel_dev_p22: float | None
    converged: bool
    ticks_checked: int

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(hyper, i):
    phi, delta = (hyper.phi1, hyper.delta1) if i == 1 else (hyper.phi2, hyper.delta2)
    if not delta < phi * phi:
        raise ConvergenceConditionError(
            f"component {i}: delta={delta} is not below phi^2={phi * phi}; the limiting series diverges"
        )
    return delta / (phi * phi)


def default_truncation(ratio: float, tol: float = 1e-12) -> int:
    """Smallest ``J`` with ``ratio**J < tol``."""
    if not 0.0 < ratio < 1.0:
        raise InvalidArgumentError(f"ratio must lie in (0, 1), got {ratio!r}")
    J = max(1, math.ceil(math.log(tol) / math.log(ratio)))
    while ratio**J >= tol:
        J += 1
    return J


def limit_covariance(spec: LimitCovarianceSpec) -> LimitCovariance:
    """Truncated series for the limiting diagonal covariance.

    ``p_ii = 1 / sum_{j<J} r_i^j a_{i,t-j}`` with ``r_i = delta_i / phi_i^2``.
    The reported truncation error bounds the neglected tail of the sum,
    ``r^J max(a) / (1 - r)``, taken over the requested components.
    """
    window = np.asarray(spec.window, dtype=float)
    out = {1: None, 2: None}
    tail = 0.0
    J_used = 0
    for i in spec.components:
        r = _ratio(spec.hyper, i)
        J = spec.truncation if spec.truncation is not None else default_truncation(r)
        if J < 1:
            raise InvalidArgumentError(f"truncation must be at least 1, got {J}")
        if i == 1:
            a = np.ones(J)
        elif spec.equilibrium_mu is not None:
            a = np.full(J, float(spec.equilibrium_mu) ** 2)
        else:
            if window.size < J:
                raise InvalidArgumentError(f"window has {window.size} values but truncation needs {J}")
            a = window[:J] ** 2
        weights = r ** np.arange(J)
        info = math.fsum(weights * a)
        out[i] = 1.0 / info if info > 0.0 else math.inf  # an all-zero window carries no information
        tail = max(tail, r**J * float(a.max()) / (1.0 - r))
        J_used = max(J_used, J)
    return LimitCovariance(out[1], out[2], J_used, tail)


def approx_limit_covariance(hyper: Hyperparams, mu: float) -> np.ndarray:
    """Closed-form limit when the spread sits at its equilibrium ``mu``."""
    p11 = (hyper.phi1**2 - hyper.delta1) / hyper.phi1**2
    p22 = (hyper.phi2**2 - hyper.delta2) / (hyper.phi2**2 * mu * mu)
    return np.diag([p11, p22])


def sigma2_posterior_variance(n1: float, t: int, S_t: float) -> float:
    """Posterior variance of the observation variance after ``t`` ticks.

    ``(n1 + t - 1)^2 S_t^2 / ((n1 + t - 3)^2 (n1 + t - 5))``, defined for
    ``n1 + t > 5``.
    """
    if not n1 + t > 5:
        raise InvalidArgumentError(f"need n1 + t > 5, got n1={n1}, t={t}")
    return (n1 + t - 1) ** 2 * S_t**2 / ((n1 + t - 3) ** 2 * (n1 + t - 5))


def inverse_p_recursion(p_prev: float, a: float, phi: float, delta: float) -> float:
    """Next diagonal entry from ``1/p_t = delta / (phi^2 p_{t-1}) + a_t``."""
    return 1.0 / (delta / (phi * phi * p_prev) + a)


def verify_convergence(
    records: Sequence[StepRecord],
    hyper: Hyperparams | None = None,
    truncation: int | None = None,
    tail_fraction: float = 0.1,
    rtol: float = 0.05,
) -> ConvergenceReport:
    """Compare the run's diagonal covariance with the limiting series.

    The comparison covers the last ``tail_fraction`` of ticks; at each of
    them the series is evaluated on the observations preceding that tick.
    Components with ``delta_i >= phi_i^2`` have no finite limit and are
    skipped.  Without an explicit ``truncation`` the default length is capped
    at the number of available lags.  ``converged`` is true when every checked relative deviation is
    within ``rtol``.
    """
    if not records:
        raise InvalidArgumentError("no records to verify")
    hyper = records[-1].posterior.hyper if hyper is None else hyper
    comps = tuple(i for i in (1, 2) if (hyper.delta1 < hyper.phi1**2 if i == 1 else hyper.delta2 < hyper.phi2**2))
    if not comps:
        raise ConvergenceConditionError("neither component satisfies delta_i < phi_i^2")
    ys = np.array([r.y for r in records])
    n_tail = max(1, int(round(tail_fraction * len(records))))
    dev = {1: [], 2: []}
    offdiag = 0.0
    limit = None
    for k in range(len(records) - n_tail, len(records)):
        rec = records[k]
        window = ys[k - 1 :: -1] if k > 0 else ys[:0]  # y_{t-1}, y_{t-2}, ...
        J = truncation
        if J is None:
            # short histories use every available lag; the tail bound reports the cost
            J = max(1, min(max(default_truncation(_ratio(hyper, i)) for i in comps), window.size))
        limit = limit_covariance(LimitCovarianceSpec(hyper, window, J, components=comps))
        P = rec.posterior.P
        offdiag = max(offdiag, abs(float(P[0, 1])))
        if limit.p11 is not None:
            dev[1].append(abs(P[0, 0] / limit.p11 - 1.0))
        if limit.p22 is not None:
            dev[2].append(abs(P[1, 1] / limit.p22 - 1.0))
    max1 = max(dev[1]) if dev[1] else None
    max2 = max(dev[2]) if dev[2] else None
    worst = max(v for v in (max1, max2) if v is not None)
    P_last = records[-1].posterior.P
    return ConvergenceReport(
        p11_limit=limit.p11,
        p22_limit=limit.p22,
        truncation_error=limit.truncation_error,
        observed_p11=float(P_last[0, 0]),
        observed_p22=float(P_last[1, 1]),
        max_offdiag=offdiag,
        max_rel_dev_p11=max1,
        max_rel_dev_p22=max2,
        converged=bool(worst <= rtol),
        ticks_checked=n_tail,
    )

