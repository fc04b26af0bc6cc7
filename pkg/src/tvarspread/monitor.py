"""Mean-reversion verdicts, credible bands and the entry signal rule.

A spread is declared mean reverting at tick ``t`` when the posterior mean of
the slope satisfies ``|B_t| < 1`` (point rule).  The conservative rule asks
for the whole credible interval of ``B_t`` to sit strictly inside (-1, 1).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .exceptions import InvalidArgumentError
from .filter import FilterState, evolution_prior
from .student_t import two_sided_quantile

__all__ = [
    "CredibleInterval",
    "MonitorVerdict",
    "TradeSignal",
    "b_interval",
    "state_interval",
    "obs_interval",
    "verdict",
    "signal",
]


@dataclass(frozen=True)
class CredibleInterval:
    center: float
    lower: float
    upper: float
    level: float
    dof: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)

    def contains(self, other: "CredibleInterval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MonitorVerdict:
    t: int
    b_hat: float
    interval: CredibleInterval
    point_rule: bool
    conservative_rule: bool

    @property
    def mean_reverting(self) -> bool:
        return self.point_rule

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "b_hat": self.b_hat,
            "interval": self.interval.to_dict(),
            "point_rule": self.point_rule,
            "conservative_rule": self.conservative_rule,
        }


@dataclass(frozen=True)
class TradeSignal:
    t: int
    direction: str
    gap: float
    threshold: float


def _interval(center, scale2, gamma, dof):
    q = two_sided_quantile(gamma, dof)
    half = q * math.sqrt(max(scale2, 0.0))
    return CredibleInterval(center, center - half, center + half, 1.0 - gamma, dof)


def b_interval(state: FilterState, gamma: float = 0.05) -> CredibleInterval:
    """Central ``1 - gamma`` credible interval for the slope ``B_t``."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma!r}")
    return _interval(float(state.m[1]), float(state.P[1, 1]) * state.S, gamma, state.n)


def _next_step_moments(state):
    a, R = evolution_prior(state)
    F = state.F_next
    f = float(F @ a)
    FRF = float(F @ R @ F)
    return f, FRF


def state_interval(state: FilterState, gamma: float = 0.05) -> CredibleInterval:
    """Band for the noise-free next value ``x_{t+1} = F' theta_{t+1}``."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma!r}")
    f, FRF = _next_step_moments(state)
    return _interval(f, FRF * state.S, gamma, state.n)


def obs_interval(state: FilterState, gamma: float = 0.05) -> CredibleInterval:
    """Predictive band for the next observation ``y_{t+1}``."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma!r}")
    f, FRF = _next_step_moments(state)
    return _interval(f, (FRF + 1.0) * state.S, gamma, state.n)


def verdict(state: FilterState, gamma: float = 0.05) -> MonitorVerdict:
    iv = b_interval(state, gamma)
    b_hat = float(state.m[1])
    return MonitorVerdict(
        t=state.t,
        b_hat=b_hat,
        interval=iv,
        point_rule=abs(b_hat) < 1.0,
        conservative_rule=(-1.0 < iv.lower and iv.upper < 1.0),
    )


def signal(y: float, reference: float, threshold: float = 0.0, t: int = 0) -> TradeSignal:
    """Long when the spread sits above ``reference`` by more than ``threshold``.

    ``reference`` is whichever estimate the caller trades against, for
    instance the one-step forecast or the filtered state.
    """
    if not threshold >= 0.0:
        raise InvalidArgumentError(f"threshold must be nonnegative, got {threshold!r}")
    gap = y - reference
    if gap > threshold:
        direction = "long"
    elif gap < -threshold:
        direction = "short"
    else:
        direction = "flat"
    return TradeSignal(t=t, direction=direction, gap=gap, threshold=threshold)
