"""Self-distillation of kernel ridge regression in a Hilbert space.

The public API re-exports the pieces most callers need: build a dataset and
kernel, fit one round, run a distillation chain and compare it with the
closed-form bounds.
"""

from .analysis import compare_bounds, theory_report
from .distillation import DistillationTrace, model_at, run_chain
from .errors import CollapseCondition, DistillkitError
from .kernels import Dataset, KernelSpec
from .presets import generate_dataset, preset_recorded_sine
from .regression import FitConfig, RegressionModel, fit, predict

__all__ = [
    "CollapseCondition",
    "Dataset",
    "DistillationTrace",
    "DistillkitError",
    "FitConfig",
    "KernelSpec",
    "RegressionModel",
    "compare_bounds",
    "fit",
    "generate_dataset",
    "model_at",
    "predict",
    "preset_recorded_sine",
    "run_chain",
    "theory_report",
]

__version__ = "0.1.0"
