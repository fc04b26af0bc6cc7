"""Recursive flexible least squares (FLS) for a drifting hedge ratio.

FLS minimises

    sum_t (p1_t - beta_t p2_t)^2 + mu * sum_t (beta_{t+1} - beta_t)^2

and the filtered estimate ``beta_t`` (the last coordinate of the minimiser
over ticks ``1..t``) obeys a two-accumulator scalar recursion.  ``mu = 0``
decouples the ticks entirely; ``mu -> inf`` recovers running no-intercept
OLS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateRegressorError, InvalidArgumentError

__all__ = ["FlsState", "SpreadTick", "fls_init", "fls_step", "make_spread", "fls_filter"]


@dataclass(frozen=True)
class FlsState:
    S: float
    s: float
    beta: float
    mu: float
    t: int = 0


@dataclass(frozen=True)
class SpreadTick:
    t: int
    p1: float
    p2: float
    beta: float
    y: float


def fls_init(S1: float = 0.0, s1: float = 0.0, mu: float = 1e6) -> FlsState:
    """Seed the accumulators; ``mu`` may be ``math.inf`` for exact running OLS."""
    if not mu >= 0.0:
        raise InvalidArgumentError(f"mu must be nonnegative, got {mu!r}")
    if not S1 >= 0.0:
        raise InvalidArgumentError(f"S1 must be nonnegative, got {S1!r}")
    if not math.isfinite(s1) or not math.isfinite(S1):
        raise InvalidArgumentError("initial accumulators must be finite")
    return FlsState(S=float(S1), s=float(s1), beta=math.nan, mu=float(mu))


def fls_step(state: FlsState, p1: float, p2: float) -> tuple[FlsState, float]:
    """Update the hedge ratio with one pair of prices."""
    denom = state.S + p2 * p2
    if denom == 0.0:
        raise DegenerateRegressorError(f"S + p2^2 vanishes at tick {state.t + 1}; beta is not identified")
    num = state.s + p1 * p2
    beta = num / denom
    mu = state.mu
    if math.isinf(mu):
        S, s = denom, num
    else:
        shrink = mu / (denom + mu)
        S, s = shrink * denom, shrink * num
    return FlsState(S=S, s=s, beta=beta, mu=mu, t=state.t + 1), beta


def make_spread(p1: float, p2: float, beta: float, t: int = 0) -> SpreadTick:
    return SpreadTick(t=t, p1=p1, p2=p2, beta=beta, y=p1 - beta * p2)


def fls_filter(p1, p2, mu: float = 1e6, S1: float = 0.0, s1: float = 0.0, demean: bool = False) -> list[SpreadTick]:
    """Run the recursion over two aligned price series.

    With ``demean`` the regression uses prices net of their running means,
    a stand-in for the spread intercept; the first tick then only seeds the
    means and is omitted from the output.  The emitted spread is always
    ``p1 - beta * p2`` on the raw prices.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape or p1.ndim != 1:
        raise InvalidArgumentError("price series must be 1-d and of equal length")
    if not (np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))):
        raise InvalidArgumentError("price series contain non-finite values")
    state = fls_init(S1, s1, mu)
    ticks = []
    sum1 = sum2 = 0.0
    for i, (a, b) in enumerate(zip(p1.tolist(), p2.tolist())):
        t = i + 1
        if demean:
            sum1 += a
            sum2 += b
            if t == 1:
                continue
            state, beta = fls_step(state, a - sum1 / t, b - sum2 / t)
        else:
            state, beta = fls_step(state, a, b)
        ticks.append(make_spread(a, b, beta, t))
    return ticks
