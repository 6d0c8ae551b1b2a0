"""Experiment configuration: JSON file plus command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass
import json
import logging
from pathlib import Path
from typing import Any

import voluptuous as vol

from .const import (
    DEFAULT_BOUNDS_CSV,
    DEFAULT_CURVE_CSV,
    DEFAULT_CURVE_SAMPLES,
    DEFAULT_FIT_JSON,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_REPORT_JSON,
    DEFAULT_SURFACE_CSV,
    DEFAULT_TRACE_CSV,
    DEFAULT_TRACE_JSON,
    GENERATOR_FUNCTIONS,
    GENERATOR_SINE,
    KERNEL_CUBIC_SPLINE_GREEN,
    KERNEL_GAUSSIAN,
    PRESET_RECORDED_SINE,
    PRESETS,
    RECORDED_SINE_EPSILON,
)
from .errors import BadConfig
from .kernels import Dataset, KernelSpec
from .presets import LabelTable, generate_dataset, load_label_table, preset_recorded_sine
from .regression import FitConfig

_LOGGER = logging.getLogger(__name__)

SOURCE_PRESET = "preset"
SOURCE_CSV = "csv"
SOURCE_JSON = "json"
SOURCE_GENERATOR = "generator"
DATA_SOURCES = (SOURCE_PRESET, SOURCE_CSV, SOURCE_JSON, SOURCE_GENERATOR)

_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))


def _preset_name(value: Any) -> str:
    return str(value).replace("-", "_")


KERNEL_SCHEMA = vol.Any(
    vol.Schema({vol.Required("type"): KERNEL_CUBIC_SPLINE_GREEN}),
    vol.Schema({vol.Required("type"): KERNEL_GAUSSIAN, vol.Required("bandwidth"): _POSITIVE}),
)

GENERATOR_SCHEMA = vol.Schema(
    {
        vol.Optional("function", default=GENERATOR_SINE): vol.In(GENERATOR_FUNCTIONS),
        vol.Required("K"): vol.All(int, vol.Range(min=2)),
        vol.Optional("noise_sigma", default=0.0): vol.All(vol.Coerce(float), vol.Range(min=0.0)),
        vol.Required("seed"): vol.All(int, vol.Range(min=0)),
    }
)

OUTPUTS_SCHEMA = vol.Schema(
    {
        vol.Optional("trace_csv", default=DEFAULT_TRACE_CSV): str,
        vol.Optional("trace_json", default=DEFAULT_TRACE_JSON): str,
        vol.Optional("report_json", default=DEFAULT_REPORT_JSON): str,
        vol.Optional("curve_csv", default=DEFAULT_CURVE_CSV): str,
        vol.Optional("bounds_csv", default=DEFAULT_BOUNDS_CSV): str,
        vol.Optional("fit_json", default=DEFAULT_FIT_JSON): str,
        vol.Optional("surface_csv", default=DEFAULT_SURFACE_CSV): str,
        vol.Optional("curve_samples", default=DEFAULT_CURVE_SAMPLES): vol.All(int, vol.Range(min=2)),
    }
)

EXPERIMENT_SCHEMA = vol.Schema(
    {
        vol.Optional("kernel", default=lambda: {"type": KERNEL_CUBIC_SPLINE_GREEN}): KERNEL_SCHEMA,
        vol.Exclusive(SOURCE_PRESET, "data_source"): vol.All(_preset_name, vol.In(PRESETS)),
        vol.Exclusive(SOURCE_CSV, "data_source"): str,
        vol.Exclusive(SOURCE_JSON, "data_source"): str,
        vol.Exclusive(SOURCE_GENERATOR, "data_source"): GENERATOR_SCHEMA,
        vol.Optional("epsilon"): _POSITIVE,
        vol.Optional("max_rounds", default=DEFAULT_MAX_ROUNDS): vol.All(int, vol.Range(min=1)),
        vol.Optional("outputs", default=dict): OUTPUTS_SCHEMA,
    }
)


@dataclass(frozen=True)
class OutputPaths:
    """Output file names and curve resolution."""

    trace_csv: str
    trace_json: str
    report_json: str
    curve_csv: str
    bounds_csv: str
    fit_json: str
    surface_csv: str
    curve_samples: int


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment."""

    kernel: KernelSpec
    source_kind: str | None
    source: Any
    epsilon: float | None
    max_rounds: int
    outputs: OutputPaths
    base_dir: Path

    @property
    def has_data(self) -> bool:
        """Whether a data source is configured."""
        return self.source_kind is not None

    @property
    def sine_generated(self) -> bool:
        """Whether the labels come from the sine generator."""
        return self.source_kind == SOURCE_GENERATOR and self.source["function"] == GENERATOR_SINE

    def fit_config(self) -> FitConfig:
        """Return the regression settings."""
        if self.epsilon is None:
            raise BadConfig("epsilon is required for this data source")
        return FitConfig(epsilon=self.epsilon)

    def label_table(self) -> LabelTable:
        """Load the configured data with every label column."""
        if self.source_kind in (SOURCE_CSV, SOURCE_JSON):
            path = Path(self.source)
            return load_label_table(path if path.is_absolute() else self.base_dir / path)
        data = self.dataset()
        return LabelTable(data=data, names=("y",), label_sets=(data.labels,))

    def dataset(self) -> Dataset:
        """Load the configured single-output dataset."""
        if self.source_kind == SOURCE_PRESET:
            return preset_recorded_sine()
        if self.source_kind == SOURCE_GENERATOR:
            gen = self.source
            return generate_dataset(gen["K"], gen["seed"], gen["noise_sigma"], gen["function"])
        if self.source_kind in (SOURCE_CSV, SOURCE_JSON):
            table = self.label_table()
            if table.multiclass:
                raise BadConfig(f"{self.source} has several label columns; use the fit command")
            return table.data
        raise BadConfig(f"exactly one data source is required: one of {', '.join(DATA_SOURCES)}")


def apply_overrides(
    raw: dict[str, Any],
    *,
    preset: str | None = None,
    epsilon: float | None = None,
    max_rounds: int | None = None,
    curve_samples: int | None = None,
) -> dict[str, Any]:
    """Return ``raw`` with command-line flags applied; a preset replaces any data source."""
    merged = dict(raw)
    if preset is not None:
        for key in DATA_SOURCES:
            merged.pop(key, None)
        merged[SOURCE_PRESET] = preset
    if epsilon is not None:
        merged["epsilon"] = epsilon
    if max_rounds is not None:
        merged["max_rounds"] = max_rounds
    if curve_samples is not None:
        merged["outputs"] = {**merged.get("outputs", {}), "curve_samples": curve_samples}
    return merged


def build_config(raw: dict[str, Any], base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a raw config dict."""
    try:
        valid = EXPERIMENT_SCHEMA(raw)
        outputs = OUTPUTS_SCHEMA(valid["outputs"])
    except vol.Invalid as err:
        raise BadConfig(f"invalid configuration: {err}") from err

    sources = [key for key in DATA_SOURCES if key in valid]
    kind = sources[0] if sources else None
    epsilon = valid.get("epsilon")
    if epsilon is None and valid.get(SOURCE_PRESET) == PRESET_RECORDED_SINE:
        epsilon = RECORDED_SINE_EPSILON
    kernel = valid["kernel"]
    return ExperimentConfig(
        kernel=KernelSpec(kernel["type"], kernel.get("bandwidth")),
        source_kind=kind,
        source=valid.get(kind) if kind else None,
        epsilon=epsilon,
        max_rounds=valid["max_rounds"],
        outputs=OutputPaths(**outputs),
        base_dir=base_dir or Path.cwd(),
    )


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a raw JSON config file."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as file:
            raw = json.load(file)
    except json.JSONDecodeError as err:
        raise BadConfig(f"{path}: invalid JSON ({err})") from err
    if not isinstance(raw, dict):
        raise BadConfig(f"{path}: expected a JSON object")
    _LOGGER.debug("Loaded config %s", path)
    return raw
