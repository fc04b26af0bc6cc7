"""Student-t distribution helpers: CDF, log-density and quantile.

The quantile has no closed form.  It is obtained by inverting the
regularized incomplete beta representation of the upper tail,

    P(T > x) = 0.5 * I_{nu / (nu + x^2)}(nu / 2, 1 / 2)
             = 0.5 * (1 - I_{x^2 / (nu + x^2)}(1 / 2, nu / 2)),    x >= 0,

with a bracketed Newton iteration.  Working with the tail probability rather
than the CDF avoids cancellation for probabilities near one.
"""

import math

from scipy.special import betainc, betaincc, ndtri

from .exceptions import InvalidArgumentError

__all__ = ["t_sf", "t_cdf", "t_logpdf", "t_ppf", "two_sided_quantile"]

_XTOL = 1e-10


def _check_dof(dof):
    if not dof > 0:
        raise InvalidArgumentError(f"degrees of freedom must be positive, got {dof!r}")


def t_sf(x, dof):
    """Upper-tail probability ``P(T > x)`` of the standard t distribution."""
    _check_dof(dof)
    if math.isinf(dof):
        return 0.5 * math.erfc(x / math.sqrt(2.0))
    # evaluate whichever of I_w(nu/2, 1/2) and its complement keeps the
    # argument small; the direct form loses digits for very large nu
    w = dof / (dof + x * x)
    if w < 0.5:
        tail = 0.5 * float(betainc(0.5 * dof, 0.5, w))
    else:
        tail = 0.5 * float(betaincc(0.5, 0.5 * dof, x * x / (dof + x * x)))
    return tail if x >= 0 else 1.0 - tail


def t_cdf(x, dof):
    return t_sf(-x, dof)


def t_logpdf(x, dof, loc=0.0, scale2=1.0):
    """Log-density of a location-scale t variable.

    ``scale2`` is the squared scale, matching the ``t(n, f, Q S)``
    parameterisation used for predictive distributions.
    """
    _check_dof(dof)
    if not scale2 > 0:
        raise InvalidArgumentError(f"squared scale must be positive, got {scale2!r}")
    z2 = (x - loc) ** 2 / scale2
    if math.isinf(dof):
        return -0.5 * (math.log(2.0 * math.pi * scale2) + z2)
    half = 0.5 * dof
    return (
        math.lgamma(half + 0.5)
        - math.lgamma(half)
        - 0.5 * math.log(math.pi * dof * scale2)
        - (half + 0.5) * math.log1p(z2 / dof)
    )


def _upper_quantile(tail, dof):
    """Positive ``x`` with ``P(T > x) = tail`` for ``0 < tail <= 0.5``."""
    if tail == 0.5:
        return 0.0
    # bracket: expand until the tail probability drops below the target
    lo, hi = 0.0, max(1.0, -ndtri(tail))
    while t_sf(hi, dof) > tail:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        g = t_sf(x, dof) - tail
        if g > 0:
            lo = x
        else:
            hi = x
        dens = math.exp(t_logpdf(x, dof))
        x_new = x + g / dens if dens > 0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= _XTOL * max(1.0, abs(x)) * 1e-3 or hi - lo <= _XTOL * 1e-3:
            return x_new
        x = x_new
    return x


def t_ppf(p, dof):
    """Quantile function of the standard t distribution.

    Parameters
    ----------
    p : float
        Probability in (0, 1).
    dof : float
        Degrees of freedom, ``math.inf`` gives the normal quantile.
    """
    _check_dof(dof)
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"probability must lie in (0, 1), got {p!r}")
    if math.isinf(dof):
        return float(ndtri(p))
    if p >= 0.5:
        return _upper_quantile(1.0 - p, dof)
    return -_upper_quantile(p, dof)


def two_sided_quantile(gamma, dof):
    """Critical value ``t_{gamma/2}`` giving a central ``1 - gamma`` interval."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma!r}")
    _check_dof(dof)
    if math.isinf(dof):
        return float(-ndtri(0.5 * gamma))
    return _upper_quantile(0.5 * gamma, dof)
