"""Trace, report and curve files.

Floats are written with their shortest round-trip repr so files re-parse
bit-exactly, and every file is replaced atomically.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
import csv
import io
import json
import logging
import os
from pathlib import Path
import tempfile
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from .analysis import BoundCheck, TheoryReport
from .const import BOUNDS_CSV_COLUMNS, TRACE_CSV_COLUMNS, TRACE_FORMAT, TRACE_FORMAT_VERSION
from .distillation import DistillationState, DistillationTrace
from .errors import BadConfig
from .kernels import Dataset, KernelSpec
from .regression import FitConfig, prepare_system

_LOGGER = logging.getLogger(__name__)


def _fmt(value: Any) -> str:
    return repr(float(value))


def _jsonable(data: Any) -> Any:
    """Convert numpy containers and scalars to plain JSON types."""
    if isinstance(data, Mapping):
        return {str(key): _jsonable(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [_jsonable(item) for item in data]
    if isinstance(data, np.ndarray):
        return _jsonable(data.tolist())
    if isinstance(data, np.bool_):
        return bool(data)
    if isinstance(data, np.integer):
        return int(data)
    if isinstance(data, np.floating):
        return float(data)
    return data


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write ``text`` to a temporary sibling file, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    _LOGGER.info("Wrote %s", path)
    return path


def write_json(path: str | Path, data: Any) -> Path:
    """Write JSON with a trailing newline."""
    return atomic_write_text(path, json.dumps(_jsonable(data), indent=2) + "\n")


def _write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buffer.getvalue())


# -----------------------------------------------------------------------------
# Traces
# -----------------------------------------------------------------------------


def _state_dict(state: DistillationState) -> dict[str, Any]:
    return {
        "t": state.t,
        "c": state.c,
        "y": state.y,
        "z": state.z,
        "a_diag": state.a_diag,
        "b_diag": state.b_diag,
        "norm_z": state.norm_z,
        "train_error_vs_eps": state.train_error_vs_eps,
        "train_error_vs_y0": state.train_error_vs_y0,
    }


def trace_to_dict(trace: DistillationTrace) -> dict[str, Any]:
    """Return the self-contained JSON form of a trace."""
    return {
        "format": TRACE_FORMAT,
        "version": TRACE_FORMAT_VERSION,
        "kernel": trace.system.kernel.as_dict(),
        "dataset": trace.system.data.as_dict(),
        "epsilon": trace.config.epsilon,
        "c_tolerance": trace.config.c_tolerance,
        "max_bisection_iters": trace.config.max_bisection_iters,
        "collapsed_at": trace.collapsed_at,
        "spectrum": {"eigvals": trace.spectrum.eigvals, "cond": trace.spectrum.cond},
        "states": [_state_dict(state) for state in trace.states],
    }


def save_trace_json(trace: DistillationTrace, path: str | Path) -> Path:
    """Write the trace JSON."""
    return write_json(path, trace_to_dict(trace))


def _array(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def trace_from_dict(raw: dict[str, Any]) -> DistillationTrace:
    """Rebuild a trace; the spectrum is recomputed from the embedded dataset."""
    if raw.get("format") != TRACE_FORMAT or raw.get("version") != TRACE_FORMAT_VERSION:
        raise BadConfig(f"not a {TRACE_FORMAT} v{TRACE_FORMAT_VERSION} file")
    try:
        kernel = KernelSpec.from_dict(raw["kernel"])
        data = Dataset(np.array(raw["dataset"]["points"]), np.array(raw["dataset"]["labels"]))
        config = FitConfig(
            epsilon=float(raw["epsilon"]),
            c_tolerance=float(raw["c_tolerance"]),
            max_bisection_iters=int(raw["max_bisection_iters"]),
        )
        states = tuple(
            DistillationState(
                t=int(item["t"]),
                y=_array(item["y"]),
                z=_array(item["z"]),
                c=float(item["c"]),
                a_diag=_array(item["a_diag"]),
                b_diag=_array(item["b_diag"]),
                norm_z=float(item["norm_z"]),
                train_error_vs_eps=float(item["train_error_vs_eps"]),
                train_error_vs_y0=float(item["train_error_vs_y0"]),
            )
            for item in raw["states"]
        )
    except (KeyError, TypeError) as err:
        raise BadConfig(f"malformed trace: {err!r}") from err
    if not states or [state.t for state in states] != list(range(len(states))):
        raise BadConfig("trace states must be rounds 0, 1, 2, ... without gaps")
    system = prepare_system(data, kernel)
    width = system.spectrum.dim
    if any(state.b_diag.shape != (width,) or state.z.shape != (width,) for state in states):
        raise BadConfig(f"trace states do not match the {width} free modes of the dataset")
    return DistillationTrace(
        system=system, config=config, states=states, collapsed_at=raw.get("collapsed_at")
    )


def load_trace_json(path: str | Path) -> DistillationTrace:
    """Read a trace JSON written by ``save_trace_json``."""
    with Path(path).open(encoding="utf-8") as file:
        try:
            raw = json.load(file)
        except json.JSONDecodeError as err:
            raise BadConfig(f"{path}: invalid JSON") from err
    return trace_from_dict(raw)


def write_trace_csv(trace: DistillationTrace, path: str | Path) -> Path:
    """One row per round, then a collapse row if the chain collapsed."""
    width = trace.spectrum.dim
    header = [*TRACE_CSV_COLUMNS, *(f"b_{k}" for k in range(1, width + 1))]
    rows = [
        [
            str(state.t),
            _fmt(state.c),
            _fmt(state.norm_z),
            _fmt(state.train_error_vs_eps),
            _fmt(state.train_error_vs_y0),
            "false",
            *(_fmt(b) for b in state.b_diag),
        ]
        for state in trace.states
    ]
    if trace.collapsed_at is not None:
        rows.append([str(trace.collapsed_at), "", "", "", "", "true", *([""] * width)])
    return _write_csv(path, header, rows)


# -----------------------------------------------------------------------------
# Curves, reports and bounds
# -----------------------------------------------------------------------------


def write_curve_csv(path: str | Path, xs: ArrayLike, columns: Mapping[str, ArrayLike]) -> Path:
    """Write x followed by one column per curve."""
    grid = np.asarray(xs, dtype=np.float64)
    values = [np.asarray(col, dtype=np.float64) for col in columns.values()]
    rows = [[_fmt(x), *(_fmt(col[i]) for col in values)] for i, x in enumerate(grid)]
    return _write_csv(path, ["x", *columns], rows)


def write_surface_csv(path: str | Path, grid: ArrayLike, values: ArrayLike) -> Path:
    """Write g(x, x_dag) in long form: x, x_dag, g."""
    axis = np.asarray(grid, dtype=np.float64)
    table = np.asarray(values, dtype=np.float64)
    rows = [
        [_fmt(u), _fmt(v), _fmt(table[i, j])]
        for i, u in enumerate(axis)
        for j, v in enumerate(axis)
    ]
    return _write_csv(path, ["x", "x_dag", "g"], rows)


def write_report_json(report: TheoryReport, path: str | Path) -> Path:
    """Write a theory report."""
    return write_json(path, report.as_dict())


def write_bounds_csv(checks: Sequence[BoundCheck], path: str | Path) -> Path:
    """Write bound-vs-observed rows."""
    rows = [
        [
            check.quantity,
            str(check.t),
            _fmt(check.bound),
            _fmt(check.observed),
            "true" if check.satisfied else "false",
        ]
        for check in checks
    ]
    return _write_csv(path, BOUNDS_CSV_COLUMNS, rows)
