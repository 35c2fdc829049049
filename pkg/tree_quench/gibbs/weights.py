from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from ..config import ENVIRONMENT_STREAM
from ..tree import Plus, TreeShape, ancestor_table, sample_obstacles_iid
from ..utils import Estimate, column_mean_and_stderr, replica_generator, run_replicas
from .classifiers import get_classifier_by_name
from .coupling import k_from_log
from .model_params import ModelParams
from .recursion import r_recursion


@dataclass
class WeightMoment:
    """Exponential moments of the level weight sum and of its modified version."""

    moment: Estimate
    modified_moment: Estimate
    bad_fraction: Estimate


def modified_weight_moment(
    params: ModelParams,
    p: float,
    level: int,
    t: float,
    u: float,
    n_samples: int,
    seed: int,
    regime: str = "a",
    margin: float | None = None,
    ratio_depth: int = 4,
    workers: int | None = None,
    verbose: bool = False,
) -> WeightMoment:
    """Monte Carlo of ``E_p[exp(t sum_x W(x))]`` over the vertices ``x`` of ``level``.

    Ratios come from ``ratio_depth`` extra levels under a plus boundary. The modified weight
    replaces every coupling factor on the path by the classifier's ``psi``.
    """
    if t < 0:
        msg = f"Moment parameter must be non-negative, got: {t}"
        raise ValueError(msg)
    if level < 1:
        msg = f"Weights need paths of length at least one, got level {level}"
        raise ValueError(msg)
    if n_samples <= 0:
        msg = "Cannot estimate a moment from an empty sample"
        raise ValueError(msg)
    classifier = get_classifier_by_name(regime, margin)
    shape = TreeShape(params.b, level + ratio_depth)
    table = ancestor_table(shape, level)

    def sample(i: int) -> tuple[float, float, float]:
        env = sample_obstacles_iid(shape, p, replica_generator(seed, i, ENVIRONMENT_STREAM))
        field = r_recursion(params, shape, env, Plus())
        weights = np.prod(k_from_log(params, field.log_ratios[table]), axis=1)
        factors, bad = classifier.psi(field, level, u)
        modified = np.prod(factors, axis=1)
        inside = np.isfinite(field.log_ratios[table]).sum()
        bad_fraction = bad.sum() / inside if inside else 0.0
        return math.exp(t * math.fsum(weights)), math.exp(t * math.fsum(modified)), float(bad_fraction)

    samples = np.array(run_replicas(sample, n_samples, workers, verbose, desc="Sampling weights"))
    means, errors = column_mean_and_stderr(samples)
    return WeightMoment(*(Estimate(float(m), float(e), n_samples) for m, e in zip(means, errors)))


def exact_level_one_weight_moment(params: ModelParams, p: float, t: float) -> float:
    """Level-one moment with leaf ratios taken directly from the plus boundary.

    Each free child of a free root has ratio ``e^{-2 beta h} eps^b``; obstacles carry weight 0.
    """
    leaf_log_ratio = params.log_field + params.b * params.log_eps
    factor = math.exp(t * float(k_from_log(params, leaf_log_ratio)))
    counts = np.arange(params.b + 1)
    free_root = float(np.dot(binom.pmf(counts, params.b, p), factor**counts))
    return (1.0 - p) + p * free_root
