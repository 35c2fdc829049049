from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import curve_fit
from sklearn.linear_model import LinearRegression

from .config import CONFIDENCE_Z, FIT_MAX_RELATIVE_ERROR, FIT_MIN_R2, JACKKNIFE_BLOCKS
from .utils import column_mean_and_stderr

logger = lg.getLogger(__name__)


@dataclass
class DecayFit:
    """Log-linear fit ``log y = intercept + rate * x`` with jackknife error bars."""

    rate: float
    rate_stderr: float
    intercept: float
    r2: float
    n_points: int
    used: NDArray[np.bool_]
    flagged: bool

    @property
    def confidence_interval(self) -> tuple[float, float]:
        half = CONFIDENCE_Z * self.rate_stderr
        return self.rate - half, self.rate + half


@dataclass
class StretchedExponentialFit:
    amplitude: float
    tau: float
    alpha: float
    alpha_stderr: float
    r2: float
    converged: bool

    @property
    def alpha_interval(self) -> tuple[float, float]:
        half = CONFIDENCE_Z * self.alpha_stderr
        return self.alpha - half, self.alpha + half


def usable_points(values: NDArray, errors: NDArray, max_relative_error: float = FIT_MAX_RELATIVE_ERROR) -> NDArray[np.bool_]:
    values = np.asarray(values, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(values > 0, errors / values, np.inf)
    return np.isfinite(values) & (values > 0) & (relative <= max_relative_error)


def _weighted_fit(x: NDArray, values: NDArray, errors: NDArray) -> tuple[float, float, float]:
    log_values = np.log(values)
    relative = np.maximum(errors / values, 1e-12)
    weights = 1.0 / relative**2
    weights = weights / weights.max()
    design = x.reshape(-1, 1)
    model = LinearRegression().fit(design, log_values, sample_weight=weights)
    r2 = model.score(design, log_values, sample_weight=weights) if len(x) > 2 else 1.0
    return float(model.coef_[0]), float(model.intercept_), float(r2)


def fit_log_linear(x: NDArray, values: NDArray, errors: NDArray) -> DecayFit:
    """Weighted least squares on log-values; points with large relative error are skipped."""
    x = np.asarray(x, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    used = usable_points(values, errors)
    n_points = int(used.sum())
    if n_points < 2:
        logger.warning(f"Only {n_points} usable points for a log-linear fit")
        return DecayFit(math.nan, math.inf, math.nan, math.nan, n_points, used, True)

    rate, intercept, r2 = _weighted_fit(x[used], values[used], errors[used])
    xs = x[used]
    weights = (values[used] / np.maximum(errors[used], 1e-300)) ** 2
    spread = float(np.sum(weights * (xs - np.average(xs, weights=weights)) ** 2))
    rate_stderr = math.sqrt(1.0 / spread) if spread > 0 else math.inf
    flagged = r2 < FIT_MIN_R2
    if flagged:
        logger.warning(f"Log-linear fit has R^2 = {r2:.3f} below {FIT_MIN_R2}")
    return DecayFit(rate, rate_stderr, intercept, r2, n_points, used, flagged)


def fit_replica_decay(
    x: NDArray,
    samples: NDArray,
    offset: float = 0.0,
    blocks: int = JACKKNIFE_BLOCKS,
) -> DecayFit:
    """Fit the decay of ``mean(samples) - offset`` and replace the slope error by a jackknife estimate.

    ``samples`` holds one row per replica and one column per point of ``x``.
    """
    samples = np.asarray(samples, dtype=np.float64)
    means, errors = column_mean_and_stderr(samples)
    fit = fit_log_linear(x, means - offset, errors)
    if fit.n_points < 2:
        return fit

    n_replicas = samples.shape[0]
    blocks = min(blocks, n_replicas)
    if blocks < 2:
        return fit
    labels = np.arange(n_replicas) * blocks // n_replicas
    used = fit.used
    xs = np.asarray(x, dtype=np.float64)[used]
    rates = []
    for block in range(blocks):
        kept = samples[labels != block][:, used]
        block_means, block_errors = column_mean_and_stderr(kept)
        block_values = block_means - offset
        if np.any(block_values <= 0):
            continue
        rate, _, _ = _weighted_fit(xs, block_values, np.maximum(block_errors, 1e-300))
        rates.append(rate)

    if len(rates) >= 2:
        rates = np.asarray(rates)
        k = len(rates)
        fit.rate_stderr = math.sqrt((k - 1) / k * float(np.sum((rates - rates.mean()) ** 2)))
    return fit


def _stretched(t: NDArray, amplitude: float, tau: float, alpha: float) -> NDArray:
    return amplitude * np.exp(-np.power(np.maximum(t, 0.0) / tau, alpha))


def fit_stretched_exponential(t: NDArray, values: NDArray, errors: NDArray) -> StretchedExponentialFit:
    """Fit ``A exp(-(t / tau)^alpha)``; the exponent is reported with its confidence interval."""
    t = np.asarray(t, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    used = np.isfinite(values) & np.isfinite(errors)
    if used.sum() < 4:
        return StretchedExponentialFit(math.nan, math.nan, math.nan, math.inf, math.nan, False)

    t, values, errors = t[used], values[used], errors[used]
    sigma = np.maximum(errors, 1e-3 * max(float(np.abs(values).max()), 1e-12))
    amplitude0 = max(float(values[0]), 1e-6)
    tau0 = max(float(t[-1]) / 4, 1e-3)
    try:
        params, covariance = curve_fit(
            _stretched,
            t,
            values,
            p0=(amplitude0, tau0, 1.0),
            sigma=sigma,
            bounds=((0.0, 1e-6, 0.05), (np.inf, np.inf, 5.0)),
            maxfev=20_000,
        )
    except (RuntimeError, ValueError) as error:
        logger.warning(f"Stretched-exponential fit failed: {error}")
        return StretchedExponentialFit(math.nan, math.nan, math.nan, math.inf, math.nan, False)

    residuals = (values - _stretched(t, *params)) / sigma
    centred = (values - np.average(values, weights=sigma**-2)) / sigma
    total = float(np.sum(centred**2))
    r2 = 1.0 - float(np.sum(residuals**2)) / total if total > 0 else math.nan
    alpha_stderr = float(np.sqrt(covariance[2, 2])) if np.isfinite(covariance[2, 2]) else math.inf
    return StretchedExponentialFit(float(params[0]), float(params[1]), float(params[2]), alpha_stderr, r2, True)
