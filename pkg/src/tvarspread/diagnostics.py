"""Model assessment, model comparison and likelihood-based tuning.

Every quantity here is computed from :class:`~tvarspread.filter.StepRecord`
sequences, i.e. from one-step-ahead Student-t predictive distributions
``y_t | y^{t-1} ~ t(n_{t-1}, f_t, Q_t S_{t-1})``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import EmptyInputError, InvalidArgumentError, InvalidRecordError
from .filter import Hyperparams, PriorSpec, StepRecord, run_filter
from .student_t import t_logpdf

__all__ = [
    "DiagnosticsReport",
    "BayesFactorSeries",
    "HyperGrid",
    "GridResult",
    "standardized_errors",
    "msse",
    "loglik_terms",
    "loglik_term_closed_form",
    "predictive_logpdf",
    "log_likelihood",
    "aic_bic",
    "diagnose",
    "bayes_factors",
    "grid_scores",
    "rank_results",
    "optimize_hyperparams",
]


@dataclass(frozen=True)
class DiagnosticsReport:
    msse: float
    log_likelihood: float
    aic: float
    bic: float
    count: int
    msse_skipped: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class BayesFactorSeries:
    """Per-tick Bayes factors of model 1 against model 2."""

    H: np.ndarray
    log_H: np.ndarray
    cumulative_log_H: float

    @property
    def summary(self) -> dict:
        return {
            "mean": float(np.mean(self.H)),
            "min": float(np.min(self.H)),
            "max": float(np.max(self.H)),
            "geometric_mean": float(np.exp(np.mean(self.log_H))),
        }

    def to_dict(self) -> dict:
        return {"cumulative_log_H": self.cumulative_log_H, "count": int(self.H.size), **self.summary}


@dataclass(frozen=True)
class HyperGrid:
    """Candidate values for exhaustive hyperparameter search.

    With ``enforce_constraint`` set, points violating ``delta_i < phi_i**2``
    (needed for the posterior covariance to settle) are dropped.
    """

    phi1: Sequence[float] = (1.0,)
    phi2: Sequence[float] = (1.0,)
    delta1: Sequence[float] = (1.0,)
    delta2: Sequence[float] = (0.95, 0.98, 0.99)
    enforce_constraint: bool = True

    def points(self) -> list[Hyperparams]:
        pts = []
        for p1, p2, d1, d2 in itertools.product(self.phi1, self.phi2, self.delta1, self.delta2):
            if self.enforce_constraint and not (d1 < p1 * p1 and d2 < p2 * p2):
                continue
            pts.append(Hyperparams(float(p1), float(p2), float(d1), float(d2)))
        return pts

    @property
    def n_free(self) -> int:
        """Number of hyperparameters that actually vary across the grid."""
        return sum(len(set(v)) > 1 for v in (self.phi1, self.phi2, self.delta1, self.delta2))


@dataclass(frozen=True)
class GridResult:
    hyper: Hyperparams
    report: DiagnosticsReport
    index: int = field(default=0, compare=False)


def _check_record(rec):
    scale2 = rec.Q * rec.S_prev
    if not (scale2 > 0 and math.isfinite(scale2)):
        raise InvalidRecordError(f"record at t={rec.t} has non-positive predictive scale {scale2!r}")
    return scale2


def standardized_errors(records: Sequence[StepRecord]) -> np.ndarray:
    """``u_t = e_t / sqrt(Q_t S_{t-1})``, standard-t with ``n_{t-1}`` dof."""
    return np.array([rec.e / math.sqrt(_check_record(rec)) for rec in records])


def msse(records: Sequence[StepRecord], *, return_skipped: bool = False):
    """Mean of squared standardized forecast errors.

    Each squared error is scaled by ``1 - 2 / n_{t-1}`` so that it has unit
    expectation under a correctly specified model.  Records with
    ``n_{t-1} <= 2`` have no finite second moment and are skipped.
    """
    total = []
    skipped = 0
    for rec in records:
        if rec.n_prev <= 2.0:
            skipped += 1
            continue
        u2 = rec.e * rec.e / _check_record(rec)
        total.append((1.0 - 2.0 / rec.n_prev) * u2)
    if skipped:
        warnings.warn(f"{skipped} record(s) with n_prev <= 2 excluded from MSSE", RuntimeWarning)
    if not total:
        raise EmptyInputError("no records eligible for MSSE")
    value = math.fsum(total) / len(total)
    return (value, skipped) if return_skipped else value


def loglik_term_closed_form(rec: StepRecord) -> float:
    """Predictive log-density of one tick in gamma-ratio form.

    ``log G(n_t/2) - log G(n_{t-1}/2) - 0.5 log(pi n_{t-1} Q_t S_{t-1})
    - (n_t/2) log(1 + e_t^2 / (n_{t-1} Q_t S_{t-1}))`` with ``n_t = n_{t-1} + 1``.
    """
    scale2 = _check_record(rec)
    n_prev = rec.n_prev
    n_t = n_prev + 1.0
    return (
        math.lgamma(0.5 * n_t)
        - math.lgamma(0.5 * n_prev)
        - 0.5 * math.log(math.pi * n_prev * scale2)
        - 0.5 * n_t * math.log1p(rec.e * rec.e / (n_prev * scale2))
    )


def predictive_logpdf(rec: StepRecord) -> float:
    """Same quantity as :func:`loglik_term_closed_form`, via the t log-density."""
    return t_logpdf(rec.e, rec.n_prev, 0.0, _check_record(rec))


def loglik_terms(records: Sequence[StepRecord]) -> np.ndarray:
    return np.array([loglik_term_closed_form(rec) for rec in records])


def log_likelihood(records: Sequence[StepRecord]) -> float:
    if len(records) == 0:
        raise EmptyInputError("log-likelihood needs at least one record")
    return math.fsum(loglik_terms(records))


def aic_bic(loglik: float, k: int, T: int) -> tuple[float, float]:
    if T < 1 or k < 0:
        raise InvalidArgumentError(f"need T >= 1 and k >= 0, got T={T}, k={k}")
    return -2.0 * loglik + 2.0 * k, -2.0 * loglik + k * math.log(T)


def diagnose(records: Sequence[StepRecord], k: int = 4) -> DiagnosticsReport:
    """Bundle MSSE, log-likelihood, AIC and BIC for one filter run."""
    ll = log_likelihood(records)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        value, skipped = msse(records, return_skipped=True)
    aic, bic = aic_bic(ll, k, len(records))
    return DiagnosticsReport(msse=value, log_likelihood=ll, aic=aic, bic=bic, count=len(records), msse_skipped=skipped)


def bayes_factors(records1: Sequence[StepRecord], records2: Sequence[StepRecord]) -> BayesFactorSeries:
    """Sequential Bayes factors ``H_t = p(y_t | y^{t-1}, M1) / p(y_t | y^{t-1}, M2)``.

    Both record sequences must come from filtering the same observations.
    """
    if len(records1) != len(records2):
        raise InvalidArgumentError(f"record sequences differ in length: {len(records1)} vs {len(records2)}")
    if len(records1) == 0:
        raise EmptyInputError("no records to compare")
    l1 = loglik_terms(records1)
    l2 = loglik_terms(records2)
    log_H = l1 - l2
    return BayesFactorSeries(H=np.exp(log_H), log_H=log_H, cumulative_log_H=math.fsum(l1) - math.fsum(l2))


def _score(y, prior, hyper, k):
    _, records = run_filter(y, prior, hyper)
    return diagnose(records, k)


def grid_scores(y, prior: PriorSpec | None, grid: HyperGrid, k: int | None = None, n_jobs: int = 1) -> list[GridResult]:
    """Filter ``y`` under every grid point; results come back in grid order."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 10:
        raise InvalidArgumentError("hyperparameter search needs a 1-d series of at least 10 observations")
    prior = PriorSpec() if prior is None else prior
    points = grid.points()
    if not points:
        raise InvalidArgumentError("hyperparameter grid is empty after applying delta < phi**2")
    k = grid.n_free if k is None else k
    if n_jobs == 1:
        reports = [_score(y, prior, h, k) for h in points]
    else:
        from joblib import Parallel, delayed

        reports = Parallel(n_jobs=n_jobs)(delayed(_score)(y, prior, h, k) for h in points)
    return [GridResult(h, r, i) for i, (h, r) in enumerate(zip(points, reports))]


def rank_results(results: Sequence[GridResult]) -> list[GridResult]:
    """Best first: highest likelihood, then larger delta2, then larger delta1."""
    return sorted(
        results,
        key=lambda g: (-g.report.log_likelihood, -g.hyper.delta2, -g.hyper.delta1, g.index),
    )


def optimize_hyperparams(y, prior: PriorSpec | None, grid: HyperGrid, k: int | None = None, n_jobs: int = 1):
    """Exhaustive maximum-likelihood search over ``grid``.

    Returns
    -------
    best : Hyperparams
    report : DiagnosticsReport
        Diagnostics of the filter run under ``best``.
    """
    best = rank_results(grid_scores(y, prior, grid, k=k, n_jobs=n_jobs))[0]
    return best.hyper, best.report
