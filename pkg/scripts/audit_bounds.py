#!/usr/bin/env python3
"""Audit the distillation engine on random problems.

Each problem draws K in 2..20 points, a spline or Gaussian kernel and a
tolerance, then runs three checks:

- compare_bounds on the recorded chain
- the from-scratch refit chain against the spectral recurrence
- the theory report builds without precondition errors

Usage:
    python scripts/audit_bounds.py [--count N] [--seed S] [--max-rounds T]

Arguments:
    --count         Number of random problems (default: 100)
    --seed          Philox seed (default: 0)
    --max-rounds    Round cap per chain (default: 12)
    --tolerance     Allowed relative disagreement with the refit chain (default: 1e-8)

Examples:
    # Default audit
    python scripts/audit_bounds.py

    # Larger audit with another seed
    python scripts/audit_bounds.py --count 1000 --seed 42

"""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from pathlib import Path
import sys

import numpy as np

# Allow running from a source checkout
sys.path.insert(0, str(Path(__file__).parent.parent))

from distillkit.analysis import compare_bounds, theory_report  # noqa: E402
from distillkit.const import KERNEL_CUBIC_SPLINE_GREEN, KERNEL_GAUSSIAN  # noqa: E402
from distillkit.distillation import DistillationTrace, refit_chain, run_chain  # noqa: E402
from distillkit.errors import DistillkitError  # noqa: E402
from distillkit.kernels import Dataset, KernelSpec  # noqa: E402
from distillkit.presets import random_problem  # noqa: E402
from distillkit.regression import FitConfig  # noqa: E402

VARIANTS = (KERNEL_CUBIC_SPLINE_GREEN, KERNEL_GAUSSIAN)
DEFAULT_TOLERANCE = 1e-8


def refit_disagreement(
    trace: DistillationTrace,
    data: Dataset,
    kernel: KernelSpec,
    config: FitConfig,
    max_rounds: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> str | None:
    """Return a description of the first refit mismatch, or None.

    Args:
        trace: Chain from the spectral recurrence
        data: Original dataset
        kernel: Kernel the chain was run with
        config: Fit settings
        max_rounds: Round cap shared by both chains
        tolerance: Relative gap allowed for multipliers and predictions

    Returns:
        None when both chains agree, else a one-line message

    """
    refit = refit_chain(data, kernel, config, max_rounds)
    if len(refit.rounds) != trace.rounds or refit.collapsed_at != trace.collapsed_at:
        return f"rounds {len(refit.rounds)} vs {trace.rounds}"
    scale = max(1.0, float(np.max(np.abs(data.labels))))
    for fresh, state in zip(refit.rounds, trace.states, strict=True):
        if abs(fresh.c - state.c) > tolerance * abs(state.c):
            return f"c_{state.t} {fresh.c!r} vs {state.c!r}"
        gap = float(np.max(np.abs(fresh.predictions - trace.predictions(state.t))))
        if gap > tolerance * scale:
            return f"predictions at t={state.t} differ by {gap:.3g}"
    return None


def audit(count: int, seed: int, max_rounds: int, tolerance: float = DEFAULT_TOLERANCE) -> list[str]:
    """Run every check on ``count`` seeded problems and return the failures."""
    rng = np.random.Generator(np.random.Philox(seed))
    failures: list[str] = []
    for index in range(count):
        variant = VARIANTS[index % len(VARIANTS)]
        data, kernel, epsilon = random_problem(rng, int(rng.integers(2, 21)), variant)
        config = FitConfig(epsilon=epsilon)
        label = f"#{index} {variant} K={data.K}"
        try:
            trace = run_chain(data, kernel, config, max_rounds)
            violated = [check for check in compare_bounds(trace) if not check.satisfied]
            failures.extend(
                f"{label}: {check.quantity} at t={check.t} bound={check.bound:.6g} observed={check.observed:.6g}"
                for check in violated
            )
            mismatch = refit_disagreement(trace, data, kernel, config, max_rounds, tolerance)
            if mismatch is not None:
                failures.append(f"{label}: refit {mismatch}")
            theory_report(trace)
        except DistillkitError as err:
            failures.append(f"{label}: {type(err).__name__}: {err}")
    return failures


def main(argv: Sequence[str] | None = None) -> int:
    """Run the audit and print a summary."""
    parser = argparse.ArgumentParser(
        description="Audit bounds and the refit oracle on random problems",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Default audit
    python scripts/audit_bounds.py

    # Larger audit with another seed
    python scripts/audit_bounds.py --count 1000 --seed 42
        """,
    )
    parser.add_argument("--count", type=int, default=100, help="Number of random problems (default: 100)")
    parser.add_argument("--seed", type=int, default=0, help="Philox seed (default: 0)")
    parser.add_argument("--max-rounds", type=int, default=12, help="Round cap per chain (default: 12)")
    parser.add_argument(
        "--tolerance",
        type=float,
        default=DEFAULT_TOLERANCE,
        help="Allowed relative disagreement with the refit chain (default: 1e-8)",
    )
    args = parser.parse_args(argv)
    if args.count < 1 or args.max_rounds < 1:
        print("--count and --max-rounds must be positive")
        return 1

    print("[BOUND AUDIT]")
    print("=" * 60)
    failures = audit(args.count, args.seed, args.max_rounds, args.tolerance)
    for failure in failures:
        print(f"  FAIL {failure}")
    print("=" * 60)
    print(f"{args.count} problems, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
