from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit

from .model_params import ModelParams


def _check_ratio(a: ArrayLike) -> NDArray[np.float64]:
    a = np.asarray(a, dtype=np.float64)
    if np.any(np.isnan(a)) or np.any(a < 0):
        msg = "Ratios must be non-negative numbers (+inf allowed)"
        raise ValueError(msg)
    return a


def log_f_beta(params: ModelParams, x: ArrayLike) -> NDArray[np.float64] | float:
    """log F(e^x) with F(a) = (eps + a) / (1 + eps a); x may be +-inf."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(x)):
        msg = "Log-ratio must not be NaN"
        raise ValueError(msg)
    log_eps = params.log_eps
    with np.errstate(invalid="ignore"):
        value = np.logaddexp(log_eps, x) - np.logaddexp(0.0, log_eps + x)
    value = np.where(np.isposinf(x), -log_eps, value)
    return value if value.ndim else float(value)


def f_beta(params: ModelParams, a: ArrayLike) -> NDArray[np.float64] | float:
    a = _check_ratio(a)
    with np.errstate(divide="ignore"):
        value = np.exp(log_f_beta(params, np.log(a)))
    return value if np.ndim(value) else float(value)


def k_from_log(params: ModelParams, x: ArrayLike) -> NDArray[np.float64] | float:
    """K(e^x) = 1/(eps a + 1) - 1/(a/eps + 1); zero at both ends."""
    x = np.asarray(x, dtype=np.float64)
    log_eps = params.log_eps
    with np.errstate(invalid="ignore"):
        value = expit(-(x + log_eps)) - expit(-(x - log_eps))
    value = np.where(np.isinf(x), 0.0, np.clip(value, 0.0, 1.0))
    return value if value.ndim else float(value)


def k_beta(params: ModelParams, a: ArrayLike) -> NDArray[np.float64] | float:
    a = _check_ratio(a)
    with np.errstate(divide="ignore"):
        return k_from_log(params, np.log(a))


def log_k_beta(params: ModelParams, x: ArrayLike) -> NDArray[np.float64] | float:
    with np.errstate(divide="ignore"):
        return np.log(k_from_log(params, x))
