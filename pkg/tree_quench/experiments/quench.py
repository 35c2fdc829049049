from __future__ import annotations

import logging as lg
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import BOUNDARY_STREAM, INITIAL_STREAM
from ..dynamics import CouplingDriver, DoublingCheck, coupled_simulate, truncation_doubling_check
from ..fitting import StretchedExponentialFit, fit_stretched_exponential
from ..gibbs import mu_minus_root, mu_plus_root
from ..hardcore import HCConfig, hc_coupled_simulate, hc_mu_even_root, hc_mu_odd_root, hc_sample_nu
from ..tree import Even, Fixed, Minus, Odd, Plus, SpinConfig, TreeShape, sample_bernoulli_spins
from ..utils import column_mean_and_stderr, replica_generator, run_replicas
from .experiment_spec import ExperimentSpec, Table

logger = lg.getLogger(__name__)


@dataclass
class QuenchResult:
    """Root observable from the quenched start, sandwiched between the two extremal starts.

    Rows of ``lower``, ``quenched`` and ``upper`` follow ``checkpoint_times``. ``target`` is the
    infinite-volume value the quenched curve should approach.
    """

    checkpoint_times: NDArray[np.float64]
    lower: NDArray[np.float64]
    lower_se: NDArray[np.float64]
    quenched: NDArray[np.float64]
    quenched_se: NDArray[np.float64]
    upper: NDArray[np.float64]
    upper_se: NDArray[np.float64]
    target: float
    opposite_target: float
    violations: int
    sandwich_holds: bool
    fit: StretchedExponentialFit
    depth: int
    doubling: DoublingCheck | None = None

    @property
    def gap(self) -> NDArray[np.float64]:
        return self.quenched - self.target

    def table(self, name: str) -> Table:
        header = ["t", "rho", "se", "target", "gap", "lower", "lower_se", "upper", "upper_se"]
        rows = zip(
            self.checkpoint_times,
            self.quenched,
            self.quenched_se,
            [self.target] * len(self.checkpoint_times),
            self.gap,
            self.lower,
            self.lower_se,
            self.upper,
            self.upper_se,
        )
        return Table(name, header, rows)


def _summarize(
    checkpoint_times: NDArray[np.float64],
    runs: list[tuple[NDArray, int, bool]],
    target: float,
    opposite_target: float,
    depth: int,
) -> QuenchResult:
    roots = np.stack([r[0] for r in runs])  # (replicas, 3, checkpoints)
    violations = sum(r[1] for r in runs)
    pathwise = all(r[2] for r in runs)
    means, errors = [], []
    for row in range(3):
        m, e = column_mean_and_stderr(roots[:, row, :])
        means.append(m)
        errors.append(e)

    distance = np.abs(means[1] - target)
    fit = fit_stretched_exponential(checkpoint_times, distance, errors[1])
    if fit.converged:
        logger.info(f"Stretched exponent {fit.alpha:.3f} +/- {fit.alpha_stderr:.3f} (R^2 = {fit.r2:.3f})")
    if violations:
        logger.warning(f"Monotone coupling broke {violations} times")
    return QuenchResult(
        checkpoint_times,
        means[0],
        errors[0],
        means[1],
        errors[1],
        means[2],
        errors[2],
        target,
        opposite_target,
        violations,
        violations == 0 and pathwise,
        fit,
        depth,
    )


def _root_rows(snapshots: list[NDArray]) -> tuple[NDArray, bool]:
    roots = np.stack([s[:, 0] for s in snapshots]).astype(np.float64)
    return roots, bool(np.all(roots[0] <= roots[1]) and np.all(roots[1] <= roots[2]))


def quench_convergence(spec: ExperimentSpec, workers: int | None = None, verbose: bool = False) -> QuenchResult:
    """Ising quench from i.i.d. Bernoulli(p) spins, coupled with the all-minus and all-plus starts.

    The quenched copy keeps its initial values one level below the tree as a fixed boundary;
    the extremal copies carry the matching constant boundary, so the three copies stay ordered.
    """
    params = spec.model_params()
    depth = spec.resolved_depth()
    shape = TreeShape(params.b, depth)
    checkpoints = spec.checkpoint_times()

    def replica(i: int) -> tuple[NDArray, int, bool]:
        eta = sample_bernoulli_spins(shape, spec.p, replica_generator(spec.seed, i, INITIAL_STREAM))
        rng = replica_generator(spec.seed, i, BOUNDARY_STREAM)
        below = np.where(rng.random(params.b ** (depth + 1)) < spec.p, 1, -1)
        initials = [
            SpinConfig.constant(shape, -1, Minus()),
            SpinConfig(shape, eta.values, Fixed(below)),
            SpinConfig.constant(shape, 1, Plus()),
        ]
        driver = CouplingDriver(spec.seed, shape.n_vertices, spec.t_max, replica=i)
        run = coupled_simulate(params, initials, driver, checkpoints)
        roots, pathwise = _root_rows([t.snapshots for t in run.trajectories])
        return roots, run.violations, pathwise

    runs = run_replicas(replica, spec.replicas, workers, verbose, desc="Ising quench")
    result = _summarize(checkpoints, runs, mu_plus_root(params), mu_minus_root(params), depth)
    if spec.check_truncation:
        result.doubling = truncation_doubling_check(params, spec.t_max, spec.replicas, spec.seed, depth, workers=workers)
        if not result.doubling.agree:
            logger.warning(f"Depth {result.doubling.depth} and {result.doubling.doubled_depth} disagree at t={spec.t_max}")
    logger.info(f"Quench at t={checkpoints[-1]}: rho={result.quenched[-1]:.4f} +/- {result.quenched_se[-1]:.4f}, mu+={result.target:.4f}")
    return result


def _hc_quenched_start(spec: ExperimentSpec, shape: TreeShape, i: int) -> HCConfig:
    params = spec.hc_params()
    # sampled one level deeper; the extra level becomes the fixed boundary
    extended = TreeShape(shape.b, shape.depth + 1)
    nu = hc_sample_nu(params, spec.p, extended, replica_generator(spec.seed, i, INITIAL_STREAM))
    n = shape.n_vertices
    return HCConfig(shape, nu.values[:n], Fixed(nu.values[n:]))


def hc_quench_convergence(spec: ExperimentSpec, workers: int | None = None, verbose: bool = False) -> QuenchResult:
    """Hard-core quench from the two-stage law, between the odd and even phase starts."""
    params = spec.hc_params()
    depth = spec.resolved_depth()
    shape = TreeShape(params.b, depth)
    checkpoints = spec.checkpoint_times()

    def replica(i: int) -> tuple[NDArray, int, bool]:
        initials = [
            HCConfig.parity(shape, 1, Odd()),
            _hc_quenched_start(spec, shape, i),
            HCConfig.parity(shape, 0, Even()),
        ]
        driver = CouplingDriver(spec.seed, shape.n_vertices, spec.t_max, replica=i)
        run = hc_coupled_simulate(params, initials, driver, checkpoints)
        roots, pathwise = _root_rows([t.snapshots for t in run.trajectories])
        return roots, run.violations, pathwise

    runs = run_replicas(replica, spec.replicas, workers, verbose, desc="Hard-core quench")
    result = _summarize(checkpoints, runs, hc_mu_even_root(params), hc_mu_odd_root(params), depth)
    logger.info(f"Hard-core quench at t={checkpoints[-1]}: occupation={result.quenched[-1]:.4f}, mu_e={result.target:.4f}")
    return result
