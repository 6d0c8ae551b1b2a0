"""Command-line front end.

Usage:
    distillkit fit     [--config FILE | --preset NAME] [--epsilon EPS] [--interpolant]
    distillkit distill [--config FILE | --preset NAME] [--epsilon EPS] [--max-rounds N]
    distillkit bounds  [--trace trace.json | --config FILE | --preset NAME]
    distillkit kernel  [--config FILE] [--samples N]

Outputs go to --out-dir, else $DISTILLKIT_OUT_DIR, else the current directory.

Exit codes:
    0  success
    1  configuration, I/O or numerical error
    2  the labels collapse at round 0 (||y||^2 <= K eps)
    3  a bound was violated
"""

from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
import logging
import os
from pathlib import Path
import sys

import colorlog
import numpy as np
from numpy.typing import NDArray

from .analysis import compare_bounds, theory_report
from .config import ExperimentConfig, apply_overrides, build_config, load_config
from .const import (
    DEFAULT_SURFACE_SAMPLES,
    ENV_OUT_DIR,
    EXIT_BOUND_VIOLATION,
    EXIT_COLLAPSE,
    EXIT_ERROR,
    EXIT_OK,
    KERNEL_CUBIC_SPLINE_GREEN,
    SPLINE_DOMAIN,
)
from .distillation import DistillationTrace, model_at, run_chain
from .errors import CollapseCondition, DistillkitError, PreconditionViolation
from .export import (
    load_trace_json,
    save_trace_json,
    write_bounds_csv,
    write_curve_csv,
    write_json,
    write_report_json,
    write_surface_csv,
    write_trace_csv,
)
from .kernels import Dataset, green_surface
from .presets import sine_target
from .regression import RegressionModel, fit_multiclass, interpolate, multiplier_bounds, prepare_system

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """Send colored log records to stderr."""
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, handlers=[handler], force=True)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment JSON file")
    common.add_argument("--preset", help="built-in dataset (paper_sine)")
    common.add_argument("--epsilon", type=float, help="loss tolerance eps")
    common.add_argument("--max-rounds", type=int, help="distillation round cap")
    common.add_argument("--out-dir", type=Path, help=f"output directory (default ${ENV_OUT_DIR} or .)")
    common.add_argument("--curve-samples", type=int, help="points in exported curves")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="distillkit",
        description="Self-distillation of kernel ridge regression in a Hilbert space",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit_cmd = sub.add_parser("fit", parents=[common], help="single-round fit and curve export")
    fit_cmd.add_argument("--interpolant", action="store_true", help="add the near-interpolating curve")
    fit_cmd.set_defaults(handler=cmd_fit)

    distill_cmd = sub.add_parser("distill", parents=[common], help="run the distillation chain")
    distill_cmd.set_defaults(handler=cmd_distill)

    bounds_cmd = sub.add_parser("bounds", parents=[common], help="check every bound against a trace")
    bounds_cmd.add_argument("--trace", type=Path, help="saved trace JSON to re-evaluate")
    bounds_cmd.set_defaults(handler=cmd_bounds)

    kernel_cmd = sub.add_parser("kernel", parents=[common], help="export the Green's function surface")
    kernel_cmd.add_argument("--samples", type=int, default=DEFAULT_SURFACE_SAMPLES, help="grid points per axis")
    kernel_cmd.set_defaults(handler=cmd_kernel)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the config file with flag overrides."""
    raw = load_config(args.config) if args.config else {}
    merged = apply_overrides(
        raw,
        preset=args.preset,
        epsilon=args.epsilon,
        max_rounds=args.max_rounds,
        curve_samples=args.curve_samples,
    )
    base_dir = args.config.parent if args.config else Path.cwd()
    return build_config(merged, base_dir=base_dir)


def output_dir(args: argparse.Namespace) -> Path:
    """Return --out-dir, else $DISTILLKIT_OUT_DIR, else the current directory."""
    if args.out_dir is not None:
        return args.out_dir
    env = os.environ.get(ENV_OUT_DIR)
    return Path(env) if env else Path.cwd()


def _curve_grid(config: ExperimentConfig, data: Dataset) -> NDArray[np.float64] | None:
    samples = config.outputs.curve_samples
    if config.kernel.variant == KERNEL_CUBIC_SPLINE_GREEN:
        return np.linspace(*SPLINE_DOMAIN, samples)
    if data.input_dim != 1:
        _LOGGER.warning("Curve export skipped: inputs are %d-dimensional", data.input_dim)
        return None
    return np.linspace(float(np.min(data.points)), float(np.max(data.points)), samples)


def _evaluate(model: RegressionModel, grid: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.array([model(x) for x in grid])


def cmd_fit(args: argparse.Namespace, config: ExperimentConfig) -> int:
    """Fit one round per label column; write the curve CSV and a fit report."""
    table = config.label_table()
    fit_config = config.fit_config()
    data = table.data
    system = prepare_system(data, config.kernel)
    result = fit_multiclass(data, table.label_sets, config.kernel, fit_config)
    if len(result.failures) == len(table.label_sets):
        raise next(iter(result.failures.values()))

    outputs = []
    for name, labels, model in zip(table.names, table.label_sets, result.models, strict=True):
        entry: dict[str, object] = {"name": name, "collapsed": model is None}
        if model is not None:
            budget = fit_config.epsilon - system.anchored_error(labels)
            c_lo, c_hi = multiplier_bounds(system.spectrum, system.rotate(labels), budget, n_samples=data.K)
            entry.update(c=model.c, achieved_error=model.achieved_error, c_lo=c_lo, c_hi=c_hi)
        outputs.append(entry)
    report: dict[str, object] = {
        "kernel": config.kernel.as_dict(),
        "K": data.K,
        "epsilon": fit_config.epsilon,
        "outputs": outputs,
    }

    out = output_dir(args)
    grid = _curve_grid(config, data)
    if grid is not None:
        columns: dict[str, NDArray[np.float64]] = {}
        for index, model in enumerate(result.models):
            if model is None:
                continue
            key = "f" if len(result.models) == 1 else f"f_q{index}"
            columns[key] = _evaluate(model, grid)
        if args.interpolant and not table.multiclass:
            columns["f_interp"] = _evaluate(interpolate(data, config.kernel), grid)
        if config.sine_generated and "f" in columns:
            report["max_abs_deviation"] = float(np.max(np.abs(columns["f"] - sine_target(grid))))
        write_curve_csv(out / config.outputs.curve_csv, grid, columns)
    write_json(out / config.outputs.fit_json, report)
    return EXIT_OK


def _run(config: ExperimentConfig) -> DistillationTrace:
    return run_chain(config.dataset(), config.kernel, config.fit_config(), config.max_rounds)


def cmd_distill(args: argparse.Namespace, config: ExperimentConfig) -> int:
    """Run the chain and write the trace, the theory report and the round curves."""
    trace = _run(config)
    out = output_dir(args)
    save_trace_json(trace, out / config.outputs.trace_json)
    write_trace_csv(trace, out / config.outputs.trace_csv)
    try:
        write_report_json(theory_report(trace), out / config.outputs.report_json)
    except PreconditionViolation as err:
        _LOGGER.warning("Theory report skipped: %s", err)

    grid = _curve_grid(config, trace.system.data)
    if grid is not None:
        columns = {f"f_t{t}": _evaluate(model_at(trace, t), grid) for t in range(trace.rounds)}
        write_curve_csv(out / config.outputs.curve_csv, grid, columns)
    _LOGGER.info("Distilled %d rounds (collapsed at %s)", trace.rounds, trace.collapsed_at)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace, config: ExperimentConfig) -> int:
    """Compare every bound with a saved or fresh trace; exit 3 on any violation."""
    trace = load_trace_json(args.trace) if args.trace else _run(config)
    checks = compare_bounds(trace)
    write_bounds_csv(checks, output_dir(args) / config.outputs.bounds_csv)
    if all(check.satisfied for check in checks):
        return EXIT_OK
    return EXIT_BOUND_VIOLATION


def cmd_kernel(args: argparse.Namespace, config: ExperimentConfig) -> int:
    """Write the kernel evaluated on a grid of [0, 1]^2."""
    if args.samples < 2:
        raise PreconditionViolation("--samples must be at least 2")
    grid, values = green_surface(config.kernel, args.samples)
    write_surface_csv(output_dir(args) / config.outputs.surface_csv, grid, values)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    handler: Callable[[argparse.Namespace, ExperimentConfig], int] = args.handler
    try:
        return handler(args, resolve_config(args))
    except CollapseCondition as err:
        _LOGGER.error("Collapse: %s; the optimal function is f = 0", err)
        return EXIT_COLLAPSE
    except (DistillkitError, OSError) as err:
        _LOGGER.error("%s", err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
