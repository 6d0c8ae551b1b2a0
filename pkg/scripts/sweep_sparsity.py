#!/usr/bin/env python3
"""Print the sparsity index at the guaranteed horizon over a tolerance grid.

The sweep starts from the first round free of anchored targets, so the
recorded preset uses its round-1 labels and anchor-free data its originals.

Usage:
    python scripts/sweep_sparsity.py [--config FILE | --preset NAME] [--points N] [--csv FILE]

Arguments:
    --config        Experiment JSON file
    --preset        Built-in dataset (default: paper_sine)
    --points        Tolerances on a log grid below ||y||^2 / K (default: 20)
    --min-fraction  Smallest tolerance as a fraction of ||y||^2 / K (default: 1e-8)
    --csv           Also write the rows to this CSV file

Examples:
    # Sweep the recorded dataset
    python scripts/sweep_sparsity.py

    # Sweep a config and keep the table
    python scripts/sweep_sparsity.py --config tests/fixtures/configs/noiseless_sine.json --csv sweep.csv

"""

from __future__ import annotations

import argparse
from collections.abc import Sequence
import csv
import io
from pathlib import Path
import sys

import numpy as np

# Allow running from a source checkout
sys.path.insert(0, str(Path(__file__).parent.parent))

from distillkit.analysis import SweepRow, sparsity_sweep  # noqa: E402
from distillkit.config import apply_overrides, build_config, load_config  # noqa: E402
from distillkit.const import PRESET_RECORDED_SINE  # noqa: E402
from distillkit.distillation import run_chain  # noqa: E402
from distillkit.errors import DistillkitError  # noqa: E402
from distillkit.export import atomic_write_text  # noqa: E402

SWEEP_COLUMNS = ("epsilon", "guaranteed_rounds", "sparsity_index")


def tolerance_grid(norm_y: float, n_samples: int, points: int, min_fraction: float) -> list[float]:
    """Return a log grid strictly below the collapse threshold ||y||^2 / K."""
    ceiling = norm_y * norm_y / n_samples
    return [float(v) for v in np.geomspace(min_fraction, 0.99, points) * ceiling]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    """Format sweep rows with repr floats."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(row.epsilon), repr(row.guaranteed_rounds), repr(row.sparsity_index)])
    return buffer.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    """Run the sweep and print the table."""
    parser = argparse.ArgumentParser(
        description="Sparsity index at the guaranteed horizon over a tolerance grid",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Sweep the recorded dataset
    python scripts/sweep_sparsity.py

    # Sweep a config and keep the table
    python scripts/sweep_sparsity.py --config tests/fixtures/configs/noiseless_sine.json --csv sweep.csv
        """,
    )
    parser.add_argument("--config", type=Path, help="Experiment JSON file")
    parser.add_argument("--preset", help="Built-in dataset (default: paper_sine)")
    parser.add_argument("--points", type=int, default=20, help="Tolerances on the grid (default: 20)")
    parser.add_argument(
        "--min-fraction",
        type=float,
        default=1e-8,
        help="Smallest tolerance as a fraction of ||y||^2 / K (default: 1e-8)",
    )
    parser.add_argument("--csv", type=Path, help="Also write the rows to this CSV file")
    args = parser.parse_args(argv)
    if args.points < 1 or not 0.0 < args.min_fraction < 0.99:
        print("--points must be positive and --min-fraction in (0, 0.99)")
        return 1

    try:
        raw = load_config(args.config) if args.config else {}
        preset = args.preset or (None if args.config else PRESET_RECORDED_SINE)
        config = build_config(
            apply_overrides(raw, preset=preset),
            base_dir=args.config.parent if args.config else Path.cwd(),
        )
        trace = run_chain(config.dataset(), config.kernel, config.fit_config(), config.max_rounds)
        if not trace.origin_reached:
            print("No recorded round is free of anchored targets; raise --max-rounds")
            return 1
        origin = trace.states[trace.theory_origin]
        d = trace.spectrum.eigvals
        grid = tolerance_grid(origin.norm_z, trace.n_samples, args.points, args.min_fraction)
        rows = sparsity_sweep(origin.norm_z, trace.n_samples, d, grid)
    except (DistillkitError, OSError) as err:
        print(f"Error: {err}")
        return 1

    print("[SPARSITY SWEEP]")
    print("=" * 60)
    print(f"K={trace.n_samples} origin=t{trace.theory_origin} kappa={trace.spectrum.cond:.6g}")
    print(f"{'epsilon':>14} {'t_under':>12} {'S(t_under)':>14}")
    for row in rows:
        print(f"{row.epsilon:14.6g} {row.guaranteed_rounds:12.6g} {row.sparsity_index:14.6g}")
    if args.csv is not None:
        atomic_write_text(args.csv, rows_to_csv(rows))
        print(f"Wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
