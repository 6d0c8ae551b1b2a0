"""Dataset presets, the seeded generator and file loaders."""

from __future__ import annotations

from collections.abc import Sequence
import csv
from dataclasses import dataclass
import json
import logging
import math
from pathlib import Path
import re
from typing import Any

import numpy as np
from numpy.typing import NDArray

from .const import (
    GENERATOR_FUNCTIONS,
    GENERATOR_SINE,
    KERNEL_CUBIC_SPLINE_GREEN,
    KERNEL_GAUSSIAN,
    RECORDED_SINE_X,
    RECORDED_SINE_Y,
)
from .errors import BadConfig, InvalidDataset
from .kernels import Dataset, KernelSpec

_LOGGER = logging.getLogger(__name__)

_INPUT_COLUMN = re.compile(r"^x\d*$")


def sine_target(x: Any) -> NDArray[np.float64]:
    """Return sin(2 pi x)."""
    return np.sin(2.0 * math.pi * np.asarray(x, dtype=np.float64))


def generate_dataset(
    n_points: int,
    seed: int,
    noise_sigma: float = 0.0,
    function: str = GENERATOR_SINE,
) -> Dataset:
    """Sample y_k = sin(2 pi x_k) + eta_k on an even grid of [0, 1].

    The noise comes from numpy's Philox counter-based generator keyed by
    ``seed``, so a seed always reproduces the same dataset.
    """
    if function not in GENERATOR_FUNCTIONS:
        raise BadConfig(f"unknown generator function {function!r}")
    if n_points < 2:
        raise BadConfig(f"the generator needs K >= 2, got {n_points}")
    if not noise_sigma >= 0.0:
        raise BadConfig(f"noise_sigma must be non-negative, got {noise_sigma!r}")
    if seed < 0:
        raise BadConfig(f"seed must be non-negative, got {seed}")

    x = np.linspace(0.0, 1.0, n_points)
    labels = sine_target(x)
    if noise_sigma > 0.0:
        rng = np.random.Generator(np.random.Philox(seed))
        labels = labels + rng.normal(0.0, noise_sigma, size=n_points)
    _LOGGER.debug("Generated %s dataset: K=%d sigma=%g seed=%d", function, n_points, noise_sigma, seed)
    return Dataset(x, labels)


def preset_recorded_sine() -> Dataset:
    """Return the recorded 11-point noisy sine sample on the 0.1-step grid."""
    return Dataset(np.array(RECORDED_SINE_X), np.array(RECORDED_SINE_Y))


@dataclass(frozen=True, eq=False)
class LabelTable:
    """Shared inputs with one or more label columns."""

    data: Dataset
    names: tuple[str, ...]
    label_sets: tuple[NDArray[np.float64], ...]

    @property
    def multiclass(self) -> bool:
        """Whether there is more than one label column."""
        return len(self.label_sets) > 1


def _table(points: Any, columns: Sequence[Sequence[float]], names: Sequence[str]) -> LabelTable:
    if not columns:
        raise InvalidDataset("no label columns")
    if len(names) != len(columns):
        raise InvalidDataset(f"{len(names)} names for {len(columns)} label columns")
    label_sets = tuple(np.asarray(col, dtype=np.float64) for col in columns)
    data = Dataset(np.asarray(points, dtype=np.float64), label_sets[0])
    for name, labels in zip(names, label_sets, strict=True):
        if labels.shape != (data.K,):
            raise InvalidDataset(f"label column {name!r} has {labels.shape[0]} values for K={data.K}")
    return LabelTable(data=data, names=tuple(names), label_sets=label_sets)


def _read_csv(path: Path) -> LabelTable:
    with path.open(newline="", encoding="utf-8") as file:
        reader = csv.DictReader(file)
        header = reader.fieldnames or []
        inputs = [name for name in header if _INPUT_COLUMN.match(name)]
        outputs = [name for name in header if not _INPUT_COLUMN.match(name)]
        if not inputs or not outputs:
            raise InvalidDataset(f"{path}: need x column(s) and label column(s), got {header}")
        try:
            rows = [
                ([float(row[name]) for name in inputs], [float(row[name]) for name in outputs])
                for row in reader
            ]
        except (TypeError, ValueError) as err:
            raise InvalidDataset(f"{path}: non-numeric cell") from err
    if not rows:
        raise InvalidDataset(f"{path}: no data rows")
    points = np.array([p for p, _ in rows])
    columns = [[labels[q] for _, labels in rows] for q in range(len(outputs))]
    return _table(points, columns, outputs)


def _read_json(path: Path) -> LabelTable:
    with path.open(encoding="utf-8") as file:
        try:
            raw = json.load(file)
        except json.JSONDecodeError as err:
            raise InvalidDataset(f"{path}: invalid JSON") from err
    if not isinstance(raw, dict) or "points" not in raw:
        raise InvalidDataset(f"{path}: expected an object with 'points'")
    if "label_sets" in raw:
        columns = raw["label_sets"]
        names = raw.get("names") or [f"y{q}" for q in range(len(columns))]
    elif "labels" in raw:
        columns = [raw["labels"]]
        names = ["y"]
    else:
        raise InvalidDataset(f"{path}: expected 'labels' or 'label_sets'")
    return _table(raw["points"], columns, names)


def load_label_table(path: str | Path) -> LabelTable:
    """Load a CSV (x columns + label columns) or JSON dataset file."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        table = _read_csv(path)
    elif suffix == ".json":
        table = _read_json(path)
    else:
        raise InvalidDataset(f"unsupported dataset format {suffix!r} (use .csv or .json)")
    _LOGGER.info("Loaded %s: K=%d, %d label column(s)", path, table.data.K, len(table.label_sets))
    return table


def load_dataset(path: str | Path) -> Dataset:
    """Load a single-output dataset file."""
    table = load_label_table(path)
    if table.multiclass:
        raise InvalidDataset(f"{path} has {len(table.label_sets)} label columns; expected one")
    return table.data


def random_problem(
    rng: np.random.Generator, n_points: int, variant: str
) -> tuple[Dataset, KernelSpec, float]:
    """Draw a well-separated random problem for audits.

    Inputs are a jittered grid strictly inside (0, 1), so spline problems
    have no anchored points; Gaussian problems use one grid spacing as
    bandwidth. Labels are standard normal and eps is a random 2-30% of
    ||y||^2 / K.
    """
    spacing = 1.0 / n_points
    x = (np.arange(n_points) + 0.5 + rng.uniform(-0.3, 0.3, n_points)) * spacing
    y = rng.normal(0.0, 1.0, n_points)
    if variant == KERNEL_CUBIC_SPLINE_GREEN:
        kernel = KernelSpec.cubic_spline_green()
    elif variant == KERNEL_GAUSSIAN:
        kernel = KernelSpec.gaussian(spacing)
    else:
        raise BadConfig(f"unknown kernel variant {variant!r}")
    epsilon = float(rng.uniform(0.02, 0.3) * (y @ y) / n_points)
    return Dataset(x, y), kernel, epsilon
