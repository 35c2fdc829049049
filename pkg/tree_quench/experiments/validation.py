from __future__ import annotations

import logging as lg
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from ..config import BOUNDARY_STREAM, EQUILIBRIUM_STREAM, INITIAL_STREAM, SIGMA_SLACK
from ..dynamics import CouplingDriver, coupled_simulate, simulate
from ..fitting import fit_log_linear
from ..gibbs import (
    ModelParams,
    bound_stays_below_fixed_point,
    brute_force_gibbs,
    critical_beta0,
    critical_beta1,
    critical_field,
    r_tail_bound_recursion,
    r_tail_monte_carlo,
    sample_gibbs,
    single_site_marginals,
)
from ..hardcore import (
    HCConfig,
    HCParams,
    hc_brute_force_gibbs,
    hc_coupled_simulate,
    hc_lambda_c,
    hc_sample_nu,
    hc_single_site_marginals,
    hc_tail_recursion,
)
from ..spectral import build_ising_generator, reversibility_residual, spectral_gap_exact, transition_law, variance_decay_gap
from ..tree import Boundary, Even, Fixed, Free, Minus, Odd, Plus, SpinConfig, TreeShape, sample_bernoulli_spins
from ..utils import replica_generator, run_replicas
from .contraction import contraction_experiment
from .experiment_spec import ExperimentSpec, Table
from .phase_diagram import asymptotic_critical_field
from .quench import hc_quench_convergence, quench_convergence

logger = lg.getLogger(__name__)

ORACLE_TOLERANCE = 1e-10
GAP_SLOPE_FLOOR = -0.02  # Smallest admissible log-slope of the fitted gap against depth
GAP_TIME_GRID = np.linspace(0.0, 1.0, 6)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def table(self, name: str) -> Table:
        return Table(name, ["check", "passed", "detail"], [(c.name, c.passed, c.detail) for c in self.checks])


@dataclass
class ValidationSizes:
    """Workload of the suite; the full sizes are the desk-scale reference runs."""

    ising_grid: tuple[tuple[float, ...], tuple[float, ...]]
    random_boundaries: int
    law_depth: int
    law_samples: int
    law_tolerance: float
    coupled_replicas: int
    coupled_checkpoints: int
    tail_samples: int
    gap_exact_depth: int
    gap_fit_depths: tuple[int, ...]
    gap_samples: int
    quench_depth: int
    quench_time: float
    quench_replicas: int
    contraction_depth: int
    contraction_samples: int

    @classmethod
    def quick(cls) -> ValidationSizes:
        return cls(
            ising_grid=((0.7, 2.0), (-0.3, 0.3)),
            random_boundaries=2,
            law_depth=1,
            law_samples=20_000,
            law_tolerance=0.03,
            coupled_replicas=50,
            coupled_checkpoints=50,
            tail_samples=2_000,
            gap_exact_depth=2,
            gap_fit_depths=(3, 4, 5),
            gap_samples=4_000,
            quench_depth=6,
            quench_time=10.0,
            quench_replicas=200,
            contraction_depth=4,
            contraction_samples=500,
        )

    @classmethod
    def full(cls) -> ValidationSizes:
        return cls(
            ising_grid=((0.3, 0.7, 1.2, 2.0, 5.0), (-1.0, -0.3, 0.0, 0.3, 1.0)),
            random_boundaries=20,
            law_depth=2,
            law_samples=200_000,
            law_tolerance=0.01,
            coupled_replicas=1_000,
            coupled_checkpoints=1_000,
            tail_samples=20_000,
            gap_exact_depth=3,
            gap_fit_depths=(3, 4, 5, 6, 7, 8),
            gap_samples=40_000,
            quench_depth=12,
            quench_time=60.0,
            quench_replicas=2_000,
            contraction_depth=8,
            contraction_samples=5_000,
        )


def _oracle_shapes() -> list[TreeShape]:
    return [TreeShape(2, 1), TreeShape(2, 2), TreeShape(3, 1), TreeShape(3, 2)]


def _random_fixed(shape: TreeShape, rng: np.random.Generator, ising: bool) -> Fixed:
    values = rng.integers(0, 2, size=shape.b ** (shape.depth + 1))
    return Fixed(2 * values - 1 if ising else values)


def check_ising_oracle(sizes: ValidationSizes, seed: int) -> CheckResult:
    rng = replica_generator(seed, 0, BOUNDARY_STREAM)
    betas, fields = sizes.ising_grid
    worst, cases = 0.0, 0
    for shape in _oracle_shapes():
        boundaries: list[Boundary] = [Plus(), Minus(), Free()]
        boundaries += [_random_fixed(shape, rng, True) for _ in range(sizes.random_boundaries)]
        for boundary in boundaries:
            for beta in betas:
                for h in fields:
                    params = ModelParams(beta, h, shape.b)
                    exact = brute_force_gibbs(params, shape, boundary=boundary).marginals()
                    recursive = single_site_marginals(params, shape, boundary=boundary)
                    worst = max(worst, float(np.abs(exact - recursive).max()))
                    cases += 1
    return CheckResult("ising_oracle", worst < ORACLE_TOLERANCE, f"{cases} cases, worst difference {worst:.2e}")


def check_hardcore_oracle(sizes: ValidationSizes, seed: int) -> CheckResult:
    worst, cases = 0.0, 0
    for shape in _oracle_shapes():
        for boundary in (Even(), Odd(), Free()):
            for lam in (0.5, 1.0, 4.0, 6.0):
                params = HCParams(lam, shape.b)
                exact = hc_brute_force_gibbs(params, shape, boundary).marginals()
                recursive = hc_single_site_marginals(params, shape, boundary)
                worst = max(worst, float(np.abs(exact - recursive).max()))
                cases += 1
    return CheckResult("hardcore_oracle", worst < ORACLE_TOLERANCE, f"{cases} cases, worst difference {worst:.2e}")


def _empirical_law(codes: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(codes, minlength=size) / len(codes)


def check_dynamics_law(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    params = ModelParams(1.0, 0.2, 2)
    shape = TreeShape(2, sizes.law_depth)
    generator = build_ising_generator(params, shape, boundary=Plus())
    space = generator.space
    residual = reversibility_residual(generator)

    start = SpinConfig.constant(shape, 1, Plus())
    exact = transition_law(generator, start.values, 1.0)

    def at_time_one(i: int) -> int:
        driver = CouplingDriver(seed, shape.n_vertices, 1.0, replica=i)
        final = simulate(params, start, driver, [1.0]).final()
        return int(space.index_of(final)[0])

    codes = np.array(run_replicas(at_time_one, sizes.law_samples, workers, verbose, desc="Dynamics law"))
    law_tv = 0.5 * float(np.abs(_empirical_law(codes, len(space)) - exact).sum())

    first = sizes.law_samples
    equilibrium = sample_gibbs(params, shape, replica_generator(seed, 0, EQUILIBRIUM_STREAM), boundary=Plus(), size=sizes.law_samples)

    def at_time_five(i: int) -> int:
        driver = CouplingDriver(seed, shape.n_vertices, 5.0, replica=first + i)
        final = simulate(params, SpinConfig(shape, equilibrium[i], Plus()), driver, [5.0]).final()
        return int(space.index_of(final)[0])

    codes = np.array(run_replicas(at_time_five, sizes.law_samples, workers, verbose, desc="Stationarity"))
    drift_tv = 0.5 * float(np.abs(_empirical_law(codes, len(space)) - generator.mu).sum())

    passed = law_tv < sizes.law_tolerance and drift_tv < sizes.law_tolerance and residual < 1e-12
    detail = f"law TV {law_tv:.4f}, stationarity TV {drift_tv:.4f}, balance residual {residual:.1e}"
    return CheckResult("dynamics_law", passed, detail)


def check_monotone_coupling(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    shape = TreeShape(2, 4)
    checkpoints = np.linspace(0.0, 10.0, sizes.coupled_checkpoints)
    ising = ModelParams(1.0, 0.0, 2)
    hardcore = HCParams(6.0, 2)

    def ising_triple(i: int) -> int:
        eta = sample_bernoulli_spins(shape, 0.7, replica_generator(seed, i, INITIAL_STREAM))
        below = _random_fixed(shape, replica_generator(seed, i, BOUNDARY_STREAM), True)
        initials = [SpinConfig.constant(shape, -1, Minus()), SpinConfig(shape, eta.values, below), SpinConfig.constant(shape, 1, Plus())]
        run = coupled_simulate(ising, initials, CouplingDriver(seed, shape.n_vertices, 10.0, replica=i), checkpoints)
        snapshots = np.stack([t.snapshots for t in run.trajectories])
        return run.violations + int(np.any(snapshots[0] > snapshots[1]) or np.any(snapshots[1] > snapshots[2]))

    def hardcore_triple(i: int) -> int:
        extended = TreeShape(shape.b, shape.depth + 1)
        nu = hc_sample_nu(hardcore, 0.9, extended, replica_generator(seed, i, INITIAL_STREAM))
        n = shape.n_vertices
        initials = [HCConfig.parity(shape, 1, Odd()), HCConfig(shape, nu.values[:n], Fixed(nu.values[n:])), HCConfig.parity(shape, 0, Even())]
        run = hc_coupled_simulate(hardcore, initials, CouplingDriver(seed, n, 10.0, replica=i), checkpoints)
        return run.violations

    broken = sum(run_replicas(ising_triple, sizes.coupled_replicas, workers, verbose, desc="Ising triples"))
    broken += sum(run_replicas(hardcore_triple, sizes.coupled_replicas, workers, verbose, desc="Hard-core triples"))
    return CheckResult("monotone_coupling", broken == 0, f"{2 * sizes.coupled_replicas} triples, {broken} violations")


def check_critical_values(sizes: ValidationSizes, seed: int) -> CheckResult:
    beta0, beta1 = critical_beta0(2), critical_beta1(2)
    field_at_five = critical_field(ModelParams(5.0, 0.0, 2)).value
    passed = (
        abs(beta0 - 0.5493061) < 1e-6
        and abs(beta1 - 0.8813736) < 1e-6
        and hc_lambda_c(2) == 4.0
        and abs(hc_lambda_c(3) - 1.6875) < 1e-12
        and abs(field_at_five - asymptotic_critical_field(2, 5.0)) < 1e-3
    )
    detail = f"beta_0={beta0:.7f}, beta_1={beta1:.7f}, lambda_c(2)={hc_lambda_c(2)}, lambda_c(3)={hc_lambda_c(3)}, h_c(5)={field_at_five:.4f}"
    return CheckResult("critical_values", passed, detail)


def check_tail_recursions(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    a = 1.0
    k0 = math.floor(4 / a - 1)
    p = 1.0 - 2.0 ** -(5 + 2 * k0)
    exact = bound_stays_below_fixed_point(a, p, max_level=100)

    bound = r_tail_bound_recursion(a, p, max_level=6)
    estimate = r_tail_monte_carlo(ModelParams(3.0, 0.0, 2), p, 6, sizes.tail_samples, seed, workers, verbose)
    monte_carlo = estimate.value <= bound.values[-1] + 3 * estimate.stderr

    consistent = True
    for q in (0.9, 0.99, 0.999, 0.9999):
        hc = hc_tail_recursion(q, 6.0)
        consistent &= hc.diverged == (1.0 - 120.0 * 12.0 * (1.0 - q) < 0)
    detail = f"exact check {exact}, Monte Carlo {estimate.value:.2e} vs bound {bound.values[-1]:.2e}, hard-core flags consistent {consistent}"
    return CheckResult("tail_recursions", exact and monte_carlo and consistent, detail)


def check_gap_phenomenology(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    params = ModelParams(1.2, 0.0, 2)
    exact_depths = range(1, sizes.gap_exact_depth + 1)
    ordered = True
    for depth in exact_depths:
        shape = TreeShape(2, depth)
        plus = spectral_gap_exact(build_ising_generator(params, shape, boundary=Plus()))
        free = spectral_gap_exact(build_ising_generator(params, shape, boundary=Free()))
        ordered &= plus >= free

    gaps, errors = [], []
    for depth in sizes.gap_fit_depths:
        decay = variance_decay_gap(
            params, TreeShape(2, depth), GAP_TIME_GRID, sizes.gap_samples, seed, boundary=Plus(), workers=workers, verbose=verbose
        )
        gaps.append(decay.gap)
        errors.append(decay.gap_stderr)
    fit = fit_log_linear(np.array(sizes.gap_fit_depths, dtype=np.float64), np.array(gaps), np.array(errors))
    flat = math.isfinite(fit.rate) and fit.rate + SIGMA_SLACK * fit.rate_stderr >= GAP_SLOPE_FLOOR

    gap_list = ", ".join(f"{g:.4f}" for g in gaps)
    detail = (
        f"plus >= free at depths 1-{sizes.gap_exact_depth}: {ordered}; "
        f"fitted gaps [{gap_list}] at depths {list(sizes.gap_fit_depths)}, log-slope {fit.rate:.4f} +/- {fit.rate_stderr:.4f}"
    )
    return CheckResult("gap_phenomenology", bool(ordered and flat), detail)


def check_deep_quench(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    common = {"seed": seed, "depth": sizes.quench_depth, "t_max": sizes.quench_time, "replicas": sizes.quench_replicas}
    runs = [
        ("ising", quench_convergence(ExperimentSpec("ising", beta=1.0, h=0.0, p=0.95, **common), workers, verbose)),
        ("hard-core", hc_quench_convergence(ExperimentSpec("hardcore", lam=6.0, p=0.9, **common), workers, verbose)),
    ]
    passed, parts = True, []
    for name, result in runs:
        distance = abs(result.quenched[-1] - result.target)
        stderr = result.quenched_se[-1]
        passed &= distance <= SIGMA_SLACK * stderr and result.sandwich_holds
        parts.append(f"{name}: |rho - target| {distance:.4f} (SE {stderr:.4f}), sandwich {result.sandwich_holds}")
    return CheckResult("deep_quench", bool(passed), "; ".join(parts))


def check_contraction(sizes: ValidationSizes, seed: int, workers: int | None = None, verbose: bool = False) -> CheckResult:
    checkpoints = np.linspace(0.0, 2.0, 5)
    weight = 2**-0.5
    warm = contraction_experiment(
        ModelParams(0.5, 0.0, 2), weight, sizes.contraction_depth, checkpoints, sizes.contraction_samples, seed, workers=workers, verbose=verbose
    )
    # at infinite temperature the root discrepancy lasts until the first root update
    hot = contraction_experiment(
        ModelParams(0.0, 0.0, 2), weight, sizes.contraction_depth, checkpoints, sizes.contraction_samples, seed, workers=workers, verbose=verbose
    )
    deviation = np.abs(hot.distances - np.exp(-checkpoints))
    matched = bool(np.all(deviation <= SIGMA_SLACK * hot.errors + 1e-12))
    detail = f"beta=0.5 rate {warm.fit.rate:.4f}, decaying {warm.decaying}; beta=0 largest deviation {deviation.max():.4f}, matched {matched}"
    return CheckResult("contraction", warm.decaying and matched, detail)


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "ising_oracle": check_ising_oracle,
    "hardcore_oracle": check_hardcore_oracle,
    "dynamics_law": check_dynamics_law,
    "monotone_coupling": check_monotone_coupling,
    "critical_values": check_critical_values,
    "tail_recursions": check_tail_recursions,
    "gap_phenomenology": check_gap_phenomenology,
    "deep_quench": check_deep_quench,
    "contraction": check_contraction,
}
PARALLEL_CHECKS = {"dynamics_law", "monotone_coupling", "tail_recursions", "gap_phenomenology", "deep_quench", "contraction"}


def run_validation(
    full: bool = False,
    seed: int = 0,
    only: list[str] | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> ValidationReport:
    """Run the named checks, or all of ``CHECKS``, at quick or full sizes."""
    sizes = ValidationSizes.full() if full else ValidationSizes.quick()
    names = list(CHECKS) if only is None else only
    report = ValidationReport()
    for name in names:
        if name not in CHECKS:
            msg = f"Unknown check: {name}, valid options are: {', '.join(CHECKS)}"
            raise ValueError(msg)
        check = CHECKS[name]
        if name in PARALLEL_CHECKS:
            result = check(sizes, seed, workers=workers, verbose=verbose)
        else:
            result = check(sizes, seed)
        level = lg.INFO if result.passed else lg.WARNING
        logger.log(level, f"{name}: {'passed' if result.passed else 'FAILED'} ({result.detail})")
        report.checks.append(result)
    return report
