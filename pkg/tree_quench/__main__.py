from __future__ import annotations

import argparse
import logging as lg
import math
import sys
import time
from collections.abc import Callable

from .experiments import (
    ExperimentSpec,
    Table,
    contraction_experiment,
    hc_quench_convergence,
    phase_diagram_scan,
    quench_convergence,
    run_validation,
    write_run,
)
from .gibbs import ModelParams, modified_weight_moment, mu_minus_root, mu_plus_root, r_recursion, single_site_marginals
from .hardcore import HardCoreModel, HCParams
from .run_config import RunConfig
from .spectral import GeneratorMatrix, block_dynamics_gap, build_generator, build_ising_generator, logsob_upper_bound, spectral_gap_exact, vm_mixing_check
from .tree import TreeShape, get_boundary_by_name
from .utils import clear_cache, parse_float_list

logger = lg.getLogger(__name__)

DEFAULT_BETAS = [0.25 * k for k in range(1, 21)]


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", help="JSON file with run settings; flags override its values")
    parser.add_argument("--seed", type=int, help="Master seed (mandatory)")
    parser.add_argument("--b", type=int, help="Branching factor")
    parser.add_argument("--beta", type=float, help="Inverse temperature")
    parser.add_argument("--h", type=float, help="External field")
    parser.add_argument("--lambda", dest="lam", type=float, help="Hard-core activity")
    parser.add_argument("--p", type=float, help="Bias of the initial law")
    parser.add_argument("--depth", type=int, help="Tree depth; defaults to the truncation rule")
    parser.add_argument("--boundary", choices=["plus", "minus", "free", "even", "odd"], help="Boundary condition")
    parser.add_argument("--t-max", dest="t_max", type=float, help="Time horizon")
    parser.add_argument("--checkpoints", type=parse_float_list, help="Checkpoint times, '0,1,2' or 'start:stop:num'")
    parser.add_argument("--replicas", type=int, help="Number of independent replicas")
    parser.add_argument("--workers", type=int, help="Parallel workers (default: $TREEQ_WORKERS or 1)")
    parser.add_argument("--out", "-o", help="Output directory")
    parser.add_argument("--regime", choices=["a", "b", "c"], help="Good/bad vertex classification variant")
    parser.add_argument("--verbose", "-v", action="store_true", default=None, help="Progress bars and INFO logging")


def create_parser() -> argparse.ArgumentParser:
    """
    Create the top-level parser with one subparser per experiment plus 'clear'.
    """
    parser = argparse.ArgumentParser(prog="treeq", description="Glauber dynamics of the Ising and hard-core models on b-ary trees")

    subparsers = parser.add_subparsers(dest="command", help="Sub-command to run")
    # ------------------------
    # Subparser: "quench"
    # ------------------------
    quench_parser = subparsers.add_parser("quench", help="Ising quench from a Bernoulli(p) start")
    _add_common_arguments(quench_parser)
    quench_parser.add_argument("--check-truncation", dest="check_truncation", action="store_true", default=None, help="Rerun at doubled depth and compare")

    # ------------------------
    # Subparser: "hc-quench"
    # ------------------------
    hc_parser = subparsers.add_parser("hc-quench", help="Hard-core quench from the two-stage biased law")
    _add_common_arguments(hc_parser)

    # ------------------------
    # Subparser: "phase-diagram"
    # ------------------------
    phase_parser = subparsers.add_parser("phase-diagram", help="Critical field h_c over a grid of beta")
    _add_common_arguments(phase_parser)
    phase_parser.add_argument("--betas", type=parse_float_list, help="Grid of inverse temperatures")

    # ------------------------
    # Subparser: "recursion"
    # ------------------------
    recursion_parser = subparsers.add_parser("recursion", help="Root magnetization from the ratio recursion")
    _add_common_arguments(recursion_parser)
    recursion_parser.add_argument("--moment-t", dest="moment_t", type=float, help="Exponent of the weight moment (with --regime)")
    recursion_parser.add_argument("--u", type=float, help="Good-vertex factor of the modified weight (with --regime)")
    recursion_parser.add_argument("--margin", type=float, help="Field margin of the regime (a: > 0, b: in (0, 1/2), c: in (0, 1))")

    # ------------------------
    # Subparser: "gap"
    # ------------------------
    gap_parser = subparsers.add_parser("gap", help="Exact spectral gap and log-Sobolev upper bound")
    _add_common_arguments(gap_parser)
    gap_parser.add_argument("--model", choices=["ising", "hardcore"], help="Spin model")

    # ------------------------
    # Subparser: "blocks"
    # ------------------------
    blocks_parser = subparsers.add_parser("blocks", help="Block dynamics bound and variance-mixing check")
    _add_common_arguments(blocks_parser)
    blocks_parser.add_argument("--model", choices=["ising", "hardcore"], help="Spin model")
    blocks_parser.add_argument("--ell1", type=int, help="Largest block height (default: depth + 1)")

    # ------------------------
    # Subparser: "contraction"
    # ------------------------
    contraction_parser = subparsers.add_parser("contraction", help="Weighted Hamming distance of two coupled copies")
    _add_common_arguments(contraction_parser)
    contraction_parser.add_argument("--weight", type=float, help="Distance weight (default: b**-0.5)")

    # ------------------------
    # Subparser: "validate"
    # ------------------------
    validate_parser = subparsers.add_parser("validate", help="Oracle and consistency checks")
    _add_common_arguments(validate_parser)
    validate_parser.add_argument("--full", action="store_true", default=None, help="Full-size sample sizes")

    # ------------------------
    # Subparser: "clear"
    # ------------------------
    subparsers.add_parser("clear", help="Clear precomputed cache")
    return parser


def _experiment_spec(config: RunConfig, model: str) -> ExperimentSpec:
    return ExperimentSpec(
        model=model,
        seed=config.seed,
        b=config.b,
        beta=config.beta,
        h=config.h,
        lam=config.lam,
        p=config.p,
        depth=config.depth,
        safety_constant=config.safety_constant,
        t_max=config.t_max,
        checkpoints=config.checkpoints,
        replicas=config.replicas,
        regime=config.regime,
        margin=config.margin,
        check_truncation=config.check_truncation,
    )


def _exact_generator(config: RunConfig, depth: int) -> GeneratorMatrix:
    shape = TreeShape(config.b, depth)
    if config.model == "hardcore":
        model = HardCoreModel(HCParams(config.lam, config.b))
        return build_generator(model, model.region(shape, get_boundary_by_name(config.boundary or "even")))
    params = ModelParams(config.beta, config.h, config.b)
    return build_ising_generator(params, shape, boundary=get_boundary_by_name(config.boundary or "plus"))


def run_quench(config: RunConfig) -> tuple[list[Table], int]:
    result = quench_convergence(_experiment_spec(config, "ising"), config.workers, config.verbose)
    t = result.checkpoint_times[-1]
    print(f"rho_t at t={t:g}: {result.quenched[-1]:.6f} +/- {result.quenched_se[-1]:.6f}; mu+ root {result.target:.6f}; depth {result.depth}")
    if result.doubling is not None:
        print(f"Depth {result.doubling.depth} against {result.doubling.doubled_depth} agrees: {result.doubling.agree}")
    return [result.table("quench")], 0 if result.sandwich_holds else 1


def run_hc_quench(config: RunConfig) -> tuple[list[Table], int]:
    result = hc_quench_convergence(_experiment_spec(config, "hardcore"), config.workers, config.verbose)
    t = result.checkpoint_times[-1]
    print(f"Root occupation at t={t:g}: {result.quenched[-1]:.6f} +/- {result.quenched_se[-1]:.6f}; even phase {result.target:.6f}")
    return [result.table("hc_quench")], 0 if result.sandwich_holds else 1


def run_phase_diagram(config: RunConfig) -> tuple[list[Table], int]:
    diagram = phase_diagram_scan(config.b, config.betas or DEFAULT_BETAS, verbose=config.verbose)
    print(f"h_c at beta={diagram.betas[-1]:g}: {diagram.fields[-1]:.6f} (asymptote {diagram.asymptote:g})")
    return [diagram.table("phase_diagram")], 0 if diagram.monotone else 1


def run_recursion(config: RunConfig) -> tuple[list[Table], int]:
    params = ModelParams(config.beta, config.h, config.b)
    depth = 8 if config.depth is None else config.depth
    shape = TreeShape(config.b, depth)
    boundary = get_boundary_by_name(config.boundary or "plus")
    magnetization = r_recursion(params, shape, boundary=boundary).root_magnetization()
    print(f"Root magnetization at depth {depth} with {boundary.name} boundary: {magnetization:.12f}")
    print(f"Infinite-volume plus phase {mu_plus_root(params):.12f}, minus phase {mu_minus_root(params):.12f}")

    plus = 2 * single_site_marginals(params, shape, boundary=boundary) - 1
    rows = [(k, float(plus[shape.level_vertices(k)].mean())) for k in range(depth + 1)]
    tables = [Table("recursion", ["level", "mean_magnetization"], rows)]
    if config.regime is not None:
        level = max(depth, 1)
        moment = modified_weight_moment(
            params, config.p, level, config.moment_t, config.u, config.replicas, config.seed, config.regime,
            margin=config.margin, workers=config.workers, verbose=config.verbose,
        )
        print(f"Weight moment at level {level}: {moment.moment.value:.6g}, modified {moment.modified_moment.value:.6g} (regime {config.regime})")
        header = ["quantity", "value", "se"]
        estimates = [("moment", moment.moment), ("modified_moment", moment.modified_moment), ("bad_fraction", moment.bad_fraction)]
        tables.append(Table("weight_moment", header, [(name, e.value, e.stderr) for name, e in estimates]))
    return tables, 0


def run_gap(config: RunConfig) -> tuple[list[Table], int]:
    depth = 2 if config.depth is None else config.depth
    rows = []
    for d in range(1, depth + 1):
        generator = _exact_generator(config, d)
        logsob = logsob_upper_bound(generator, seed=config.seed)
        rows.append((d, spectral_gap_exact(generator), logsob.value, logsob.degenerate))
        print(f"Depth {d}: gap {rows[-1][1]:.8g}, log-Sobolev upper bound {logsob.value:.8g}")
    return [Table("gap", ["depth", "gap", "log_sobolev_upper_bound", "degenerate_restarts"], rows)], 0


def run_blocks(config: RunConfig) -> tuple[list[Table], int]:
    depth = 2 if config.depth is None else config.depth
    generator = _exact_generator(config, depth)
    largest = depth + 1 if config.ell1 is None else config.ell1
    rows, mixing_rows = [], []
    for ell1 in range(1, largest + 1):
        result = block_dynamics_gap(generator, ell1)
        rows.append((ell1, result.block_gap, result.min_block_gap, result.single_site_gap, result.bound, result.holds))
        if config.model == "ising" and ell1 <= depth:
            params = ModelParams(config.beta, config.h, config.b)
            boundary = get_boundary_by_name(config.boundary or "plus")
            check = vm_mixing_check(params, TreeShape(config.b, depth), ell1, boundary=boundary)
            mixing_rows.append((ell1, check.worst_ratio, check.worst_vertex, check.weight_bound_holds))
    holds = all(row[-1] for row in rows) and all(row[-1] for row in mixing_rows)
    print(f"Block bounds hold for every ell1 up to {largest}: {holds}")
    tables = [Table("blocks", ["ell1", "block_gap", "min_block_gap", "gap", "bound", "holds"], rows)]
    if mixing_rows:
        tables.append(Table("variance_mixing", ["ell1", "worst_ratio", "worst_vertex", "weight_bound_holds"], mixing_rows))
    return tables, 0 if holds else 1


def run_contraction(config: RunConfig) -> tuple[list[Table], int]:
    spec = _experiment_spec(config, "ising")
    params = spec.model_params()
    weight = config.b**-0.5 if config.weight is None else config.weight
    boundary = get_boundary_by_name(config.boundary or "free")
    result = contraction_experiment(
        params, weight, spec.resolved_depth(), spec.checkpoint_times(), config.replicas, config.seed, boundary=boundary, workers=config.workers, verbose=config.verbose
    )
    low, high = result.fit.confidence_interval if math.isfinite(result.fit.rate) else (math.nan, math.nan)
    print(f"Contraction rate {result.fit.rate:.6f}, 95% interval ({low:.6f}, {high:.6f}); decaying: {result.decaying}")
    return [result.table("contraction")], 0


def run_validate(config: RunConfig) -> tuple[list[Table], int]:
    report = run_validation(full=config.full, seed=config.seed, workers=config.workers, verbose=config.verbose)
    for check in report.checks:
        print(f"{check.name:<20} {'ok' if check.passed else 'FAILED':<7} {check.detail}")
    return [report.table("validation")], 0 if report.passed else 1


RUNNERS: dict[str, Callable[[RunConfig], tuple[list[Table], int]]] = {
    "quench": run_quench,
    "hc-quench": run_hc_quench,
    "phase-diagram": run_phase_diagram,
    "recursion": run_recursion,
    "gap": run_gap,
    "blocks": run_blocks,
    "contraction": run_contraction,
    "validate": run_validate,
}


def load_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfig:
    overrides = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    if args.config:
        try:
            config = RunConfig.from_json(args.config, command=args.command)
        except (OSError, ValueError) as error:
            parser.error(f"Cannot read config file {args.config}: {error}")
    else:
        config = RunConfig(args.command)
    config = config.overridden(overrides)
    if config.seed is None:
        parser.error("A seed is mandatory: pass --seed or set 'seed' in the config file")
    return config


def main(argv: list[str] | None = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    if args.command == "clear":
        clear_cache()
        return 0

    config = load_config(parser, args)
    lg.basicConfig(level=lg.INFO if config.verbose else lg.WARNING, format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        tables, code = RUNNERS[config.command](config)
    except ValueError as error:
        print(f"treeq {config.command}: {error}", file=sys.stderr)
        return 2
    manifest = write_run(config.out, config.command, config.experiment_fields(), tables, started)
    logger.info(f"{config.command} finished in {manifest.wall_time:.1f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
