"""Synthetic spreads from the static and time-varying AR state-space models.

Random numbers come from numpy's ``PCG64`` bit generator seeded with the
spec's integer seed; Gaussian variates use numpy's ziggurat sampler
(``Generator.standard_normal``).  Draw order is fixed and documented per
function so streams are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError
from .filter import Hyperparams

__all__ = [
    "StaticSsSpec",
    "TvarSpec",
    "ScenarioSpec",
    "simulate_static",
    "simulate_tvar",
    "tvar_observe",
    "simulate_scenario",
    "level_jump_scenario",
    "b_jump_scenario",
    "static_moments",
    "ar_noise_variance",
]


@dataclass(frozen=True)
class StaticSsSpec:
    """``x_t = A + B x_{t-1} + C eps_t`` observed as ``y_t = x_t + D omega_t``."""

    A: float = 0.2
    B: float = 0.25
    C: float = 1.0
    D: float = 0.0
    x1: float | None = None
    T: int = 3000
    seed: int = 0

    def __post_init__(self):
        if self.T < 2:
            raise InvalidArgumentError(f"T must be at least 2, got {self.T}")
        if self.C < 0 or self.D < 0:
            raise InvalidArgumentError("C and D are standard deviations and must be nonnegative")

    @property
    def start(self) -> float:
        """``x1``, defaulting to the equilibrium ``A / (1 - B)`` when that exists."""
        if self.x1 is not None:
            return float(self.x1)
        return self.A / (1.0 - self.B) if self.B != 1.0 else 0.0

    @property
    def sigma2(self) -> float:
        return ar_noise_variance(self.B, self.C, self.D)


@dataclass(frozen=True, eq=False)
class TvarSpec:
    hyper: Hyperparams = field(default_factory=lambda: Hyperparams(1.0, 1.0, 1.0, 1.0))
    V: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    sigma2: float = 1.0
    theta1: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.25]))
    y1: float = 0.0
    T: int = 3000
    seed: int = 0

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "theta1", np.asarray(self.theta1, dtype=float))
        if not self.sigma2 > 0:
            raise InvalidArgumentError(f"sigma2 must be positive, got {self.sigma2!r}")
        if V.shape != (2, 2) or not np.allclose(V, V.T) or np.linalg.eigvalsh(V).min() < -1e-12:
            raise InvalidArgumentError("V must be a symmetric positive semi-definite 2x2 matrix")
        if self.T < 2:
            raise InvalidArgumentError(f"T must be at least 2, got {self.T}")


@dataclass(frozen=True)
class ScenarioSpec:
    """A static spec whose ``A`` or ``B`` switch value at given ticks.

    ``jumps`` holds ``(tick, name, value)`` with ``name`` in ``{"A", "B"}``;
    the new value applies from ``tick`` onwards.
    """

    base: StaticSsSpec = field(default_factory=StaticSsSpec)
    jumps: tuple = ()

    def __post_init__(self):
        ticks = [j[0] for j in self.jumps]
        for tick, name, _ in self.jumps:
            if not 1 < tick < self.base.T:
                raise InvalidArgumentError(f"jump tick {tick} outside (1, {self.base.T})")
            if name not in ("A", "B"):
                raise InvalidArgumentError(f"jumps may change 'A' or 'B', got {name!r}")
        if any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise InvalidArgumentError("jump ticks must be strictly increasing")

    def paths(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-tick ``A_t`` and ``B_t`` (index 0 is tick 1)."""
        T = self.base.T
        A = np.full(T, float(self.base.A))
        B = np.full(T, float(self.base.B))
        for tick, name, value in self.jumps:
            (A if name == "A" else B)[tick - 1 :] = value
        return A, B


def ar_noise_variance(B: float, C: float, D: float) -> float:
    """Variance of the AR-form error of a noisy AR(1) state: ``D^2 + B^2 D^2 + C^2``."""
    return D * D + B * B * D * D + C * C


def static_moments(A: float, B: float, C: float, x1_mean: float, x1_var: float, t: int) -> tuple[float, float]:
    """Exact mean and variance of ``x_t`` for the static state recursion."""
    if B == 1.0:
        return x1_mean + A * (t - 1), x1_var + C * C * (t - 1)
    bt = B ** (t - 1)
    mean = bt * x1_mean + A * (1.0 - bt) / (1.0 - B)
    var = bt * bt * x1_var + C * C * (1.0 - bt * bt) / (1.0 - B * B)
    return mean, var


def _simulate_paths(A, B, C, D, x1, rng):
    # draw order: T-1 state innovations, then T observation noises
    T = A.size
    eps = rng.standard_normal(T - 1)
    omega = rng.standard_normal(T)
    x = np.empty(T)
    x[0] = x1
    prev = x1
    for i in range(1, T):
        prev = A[i] + B[i] * prev + C * eps[i - 1]
        x[i] = prev
    return x, x + D * omega


def simulate_static(spec: StaticSsSpec) -> tuple[np.ndarray, np.ndarray]:
    """Hidden state ``x`` and observed spread ``y``, each of length ``T``."""
    rng = np.random.default_rng(spec.seed)
    A = np.full(spec.T, float(spec.A))
    B = np.full(spec.T, float(spec.B))
    return _simulate_paths(A, B, spec.C, spec.D, spec.start, rng)


def simulate_scenario(spec: ScenarioSpec) -> np.ndarray:
    """Observed spread under a piecewise-constant parameter schedule."""
    rng = np.random.default_rng(spec.base.seed)
    A, B = spec.paths()
    _, y = _simulate_paths(A, B, spec.base.C, spec.base.D, spec.base.start, rng)
    return y


def level_jump_scenario(seed=0, T=3000, tick=1500, A_before=0.2, A_after=20.0, B=0.25, sigma2=1.0) -> ScenarioSpec:
    """Mean-reverting spread whose equilibrium level jumps at ``tick``."""
    base = StaticSsSpec(A=A_before, B=B, C=math.sqrt(sigma2), D=0.0, T=T, seed=seed)
    return ScenarioSpec(base=base, jumps=((tick, "A", A_after),))


def b_jump_scenario(seed=0, T=3000, tick=1501, A=0.2, B_before=0.25, B_after=1.0, sigma2=1.0) -> ScenarioSpec:
    """Slope switches from ``B_before`` to ``B_after`` (a unit root by default) at ``tick``."""
    base = StaticSsSpec(A=A, B=B_before, C=math.sqrt(sigma2), D=0.0, T=T, seed=seed)
    return ScenarioSpec(base=base, jumps=((tick, "B", B_after),))


def _psd_sqrt(V):
    w, U = np.linalg.eigh(V)
    return U * np.sqrt(np.clip(w, 0.0, None))


def tvar_observe(theta, y1, noise=None) -> np.ndarray:
    """Observations ``y_t = A_t + B_t y_{t-1} + noise_t`` along a given coefficient path.

    ``theta`` has shape ``(T, 2)``; row 0 belongs to tick 1 and is unused.
    ``noise`` defaults to zeros, which gives the conditional mean path.
    """
    theta = np.asarray(theta, dtype=float)
    T = theta.shape[0]
    noise = np.zeros(T) if noise is None else np.asarray(noise, dtype=float)
    y = np.empty(T)
    y[0] = prev = float(y1)
    for i in range(1, T):
        prev = theta[i, 0] + theta[i, 1] * prev + noise[i]
        y[i] = prev
    return y


def simulate_tvar(spec: TvarSpec) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient path ``theta`` (shape ``(T, 2)``) and observations ``y``.

    Draw order: ``T - 1`` observation noises, then ``T - 1`` bivariate
    evolution innovations with covariance ``sigma2 * V``.
    """
    rng = np.random.default_rng(spec.seed)
    T = spec.T
    s = math.sqrt(spec.sigma2)
    eps = rng.standard_normal(T - 1)
    nu = rng.standard_normal((T - 1, 2)) @ (s * _psd_sqrt(spec.V)).T
    phi = np.array([spec.hyper.phi1, spec.hyper.phi2])
    theta = np.empty((T, 2))
    theta[0] = spec.theta1
    for i in range(1, T):
        theta[i] = phi * theta[i - 1] + nu[i - 1]
    noise = np.concatenate([[0.0], s * eps])
    return theta, tvar_observe(theta, spec.y1, noise)
