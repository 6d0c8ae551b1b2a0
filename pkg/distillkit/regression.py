"""One round of constrained regression in the Green's function basis.

The fitted function is f(x) = g_x^T (cI + G)^-1 y with the multiplier c
chosen so that the training mean squared error equals the tolerance eps.
The root of h(c) = training_error(c) - eps is found by bisection inside the
closed-form bracket on c; h is continuous and strictly increasing, so the
root is unique.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import (
    CERTIFICATION_ABS_TOL,
    COLLAPSE_SLACK,
    DEFAULT_C_TOLERANCE,
    DEFAULT_MAX_BISECTION_ITERS,
    INTERPOLATION_RELATIVE_RIDGE,
    MAX_BRACKET_EXPANSIONS,
    ROOT_ABS_TOL,
)
from .errors import (
    CollapseCondition,
    ConvergenceFailure,
    DistillkitError,
    InfeasibleTolerance,
    InvalidDataset,
    PreconditionViolation,
)
from .kernels import Dataset, KernelSpec, anchored_mask, build_gram, kernel_row
from .spectral import GramSpectrum, SymMatrix, as_vector, eigendecompose, solve_shifted

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    """Loss tolerance and root-finding controls."""

    epsilon: float
    c_tolerance: float = DEFAULT_C_TOLERANCE
    max_bisection_iters: int = DEFAULT_MAX_BISECTION_ITERS

    def __post_init__(self) -> None:
        """Reject eps <= 0; exact interpolation makes distillation a fixed point."""
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise PreconditionViolation(f"epsilon must be a positive number, got {self.epsilon!r}")
        if not self.c_tolerance > 0.0:
            raise PreconditionViolation(f"c_tolerance must be positive, got {self.c_tolerance!r}")
        if self.max_bisection_iters < 1:
            raise PreconditionViolation("max_bisection_iters must be at least 1")

    @property
    def certification_tol(self) -> float:
        """Allowed |achieved_error - eps|."""
        return max(CERTIFICATION_ABS_TOL, self.c_tolerance * self.epsilon)

    def with_epsilon(self, epsilon: float) -> FitConfig:
        """Return a copy with another tolerance."""
        return replace(self, epsilon=epsilon)


def is_collapsed(norm_sq: float, n_samples: int, epsilon: float) -> bool:
    """Return whether ||y||^2 <= K eps (ties count as collapsed)."""
    return norm_sq <= n_samples * epsilon * (1.0 + COLLAPSE_SLACK)


def _n_samples(spectrum: GramSpectrum, n_samples: int | None) -> int:
    return spectrum.dim if n_samples is None else n_samples


def training_error(
    spectrum: GramSpectrum, z: ArrayLike, c: float, n_samples: int | None = None
) -> float:
    """Return (1/K) sum_k (z_k c / (c + d_k))^2."""
    if not c > 0.0:
        raise PreconditionViolation(f"c must be positive, got {c!r}")
    zvec = as_vector(z, spectrum.dim, "z")
    residual = zvec * (c / (c + spectrum.eigvals))
    return float(residual @ residual) / _n_samples(spectrum, n_samples)


def multiplier_bounds(
    spectrum: GramSpectrum, z: ArrayLike, epsilon: float, n_samples: int | None = None
) -> tuple[float, float]:
    """Bracket the multiplier: d_min r / (||z|| - r) <= c <= d_max r / (||z|| - r), r = sqrt(K eps)."""
    if not epsilon > 0.0:
        raise PreconditionViolation(f"epsilon must be positive, got {epsilon!r}")
    zvec = as_vector(z, spectrum.dim, "z")
    n = _n_samples(spectrum, n_samples)
    norm_sq = float(zvec @ zvec)
    if is_collapsed(norm_sq, n, epsilon):
        raise CollapseCondition(norm_sq, n * epsilon)
    root = math.sqrt(n * epsilon)
    gap = math.sqrt(norm_sq) - root
    return spectrum.d_min * root / gap, spectrum.d_max * root / gap


def solve_multiplier(
    spectrum: GramSpectrum,
    z: ArrayLike,
    config: FitConfig,
    *,
    n_samples: int | None = None,
    offset: float = 0.0,
) -> float:
    """Find c > 0 with training_error(c) + offset == eps.

    ``offset`` is error no multiplier can change (labels at anchored points).
    """
    zvec = as_vector(z, spectrum.dim, "z")
    n = _n_samples(spectrum, n_samples)
    budget = config.epsilon - offset
    if budget <= 0.0:
        raise InfeasibleTolerance(offset, config.epsilon)
    lo, hi = multiplier_bounds(spectrum, zvec, budget, n_samples=n)

    def h(c: float) -> float:
        return training_error(spectrum, zvec, c, n_samples=n) - budget

    for _ in range(MAX_BRACKET_EXPANSIONS):
        if h(lo) <= 0.0:
            break
        _LOGGER.warning("Lower multiplier bound %.17g overshoots the root; expanding", lo)
        lo *= 0.5
    else:
        raise ConvergenceFailure("could not bracket the multiplier from below")
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if h(hi) >= 0.0:
            break
        _LOGGER.warning("Upper multiplier bound %.17g undershoots the root; expanding", hi)
        hi *= 2.0
    else:
        raise ConvergenceFailure("could not bracket the multiplier from above")

    for iteration in range(config.max_bisection_iters):
        mid = 0.5 * (lo + hi)
        value = h(mid)
        if abs(value) <= ROOT_ABS_TOL or hi - lo <= config.c_tolerance * mid:
            _LOGGER.debug("Multiplier c=%.17g after %d bisections", mid, iteration)
            return mid
        if value < 0.0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceFailure(
        f"bisection did not converge in {config.max_bisection_iters} iterations"
    )


@dataclass(frozen=True, eq=False)
class RegressionModel:
    """Fitted f(x) = g_x^T dual_coeffs, g_x scaled by 1/n_samples.

    ``data_points`` and ``dual_coeffs`` cover the free (non-anchored) points;
    ``train_predictions`` covers all K training points.
    """

    c: float
    dual_coeffs: NDArray[np.float64]
    kernel: KernelSpec
    data_points: NDArray[np.float64]
    n_samples: int
    achieved_error: float
    train_predictions: NDArray[np.float64]

    def __call__(self, x: ArrayLike) -> float:
        """Evaluate the model."""
        return predict(self, x)


@dataclass(frozen=True, eq=False)
class GramSystem:
    """A dataset, its kernel and the once-computed spectrum of its free block.

    Points where the kernel pins every function to zero are split off; their
    labels only add a constant residual to the training error.
    """

    kernel: KernelSpec
    data: Dataset
    free_index: NDArray[np.intp]
    anchored_index: NDArray[np.intp]
    gram: SymMatrix
    spectrum: GramSpectrum
    free_points: NDArray[np.float64] = field(init=False)

    def __post_init__(self) -> None:
        """Cache the free inputs."""
        object.__setattr__(self, "free_points", self.data.points[self.free_index])

    @property
    def n_samples(self) -> int:
        """Return K, the total number of training points."""
        return self.data.K

    @property
    def has_anchors(self) -> bool:
        """Whether some training points are anchored."""
        return bool(self.anchored_index.size)

    def labels(self, y: ArrayLike | None = None) -> NDArray[np.float64]:
        """Return ``y`` (default y_0) as a length-K vector."""
        return self.data.labels if y is None else as_vector(y, self.n_samples, "y")

    def anchored_error(self, y: ArrayLike) -> float:
        """Return ||y_anchored||^2 / K."""
        part = self.labels(y)[self.anchored_index]
        return float(part @ part) / self.n_samples

    def rotate(self, y: ArrayLike) -> NDArray[np.float64]:
        """Return z = V y_free."""
        return self.spectrum.eigvecs @ self.labels(y)[self.free_index]

    def embed(self, free_values: ArrayLike) -> NDArray[np.float64]:
        """Place free-point values into a length-K vector, zero at anchors."""
        full = np.zeros(self.n_samples)
        full[self.free_index] = np.asarray(free_values, dtype=np.float64)
        return full

    def model_from_rotated(self, c: float, z: ArrayLike, offset: float) -> RegressionModel:
        """Build the model for multiplier c and rotated labels z."""
        zvec = as_vector(z, self.spectrum.dim, "z")
        d = self.spectrum.eigvals
        dual = self.spectrum.eigvecs.T @ (zvec / (c + d))
        fitted = self.spectrum.eigvecs.T @ (d * zvec / (c + d))
        achieved = training_error(self.spectrum, zvec, c, n_samples=self.n_samples) + offset
        return RegressionModel(
            c=c,
            dual_coeffs=dual,
            kernel=self.kernel,
            data_points=self.free_points,
            n_samples=self.n_samples,
            achieved_error=achieved,
            train_predictions=self.embed(fitted),
        )

    def fit(self, y: ArrayLike, config: FitConfig) -> RegressionModel:
        """Solve the constrained problem for labels ``y`` on this system."""
        labels = self.labels(y)
        norm_sq = float(labels @ labels)
        if is_collapsed(norm_sq, self.n_samples, config.epsilon):
            raise CollapseCondition(norm_sq, self.n_samples * config.epsilon)
        offset = self.anchored_error(labels)
        z = self.rotate(labels)
        c = solve_multiplier(self.spectrum, z, config, n_samples=self.n_samples, offset=offset)
        return self.model_from_rotated(c, z, offset)


def prepare_system(data: Dataset, kernel: KernelSpec) -> GramSystem:
    """Split anchored points off, build the free Gram block and decompose it once."""
    mask = anchored_mask(kernel, data)
    free = np.flatnonzero(~mask)
    anchored = np.flatnonzero(mask)
    if not free.size:
        raise InvalidDataset("every training point is anchored by the kernel")
    gram = build_gram(kernel, data, subset=free)
    spectrum = eigendecompose(gram)
    if anchored.size:
        _LOGGER.info(
            "%d of %d points are anchored at the kernel boundary; fitting the free %d",
            anchored.size,
            data.K,
            free.size,
        )
    _LOGGER.debug(
        "Gram spectrum: d_min=%.6g d_max=%.6g kappa=%.6g",
        spectrum.d_min,
        spectrum.d_max,
        spectrum.cond,
    )
    return GramSystem(
        kernel=kernel,
        data=data,
        free_index=free,
        anchored_index=anchored,
        gram=gram,
        spectrum=spectrum,
    )


def fit(data: Dataset, kernel: KernelSpec, config: FitConfig) -> RegressionModel:
    """Fit the minimum-regularizer function with training error eps.

    Raises CollapseCondition when ||y||^2 <= K eps; the solution is then the
    zero function.
    """
    return prepare_system(data, kernel).fit(data.labels, config)


def predict(model: RegressionModel, x: ArrayLike) -> float:
    """Return f(x) = g_x^T (cI + G)^-1 y."""
    row = kernel_row(model.kernel, model.data_points, x, model.n_samples)
    return float(row @ model.dual_coeffs)


def direct_training_error(gram: SymMatrix, y: ArrayLike, c: float, n_samples: int | None = None) -> float:
    """Return (1/K) ||G (cI + G)^-1 y - y||^2 through a dense solve."""
    labels = as_vector(y, gram.dim, "y")
    fitted = gram.entries @ solve_shifted(gram, c, labels)
    residual = fitted - labels
    return float(residual @ residual) / (gram.dim if n_samples is None else n_samples)


def interpolate(data: Dataset, kernel: KernelSpec) -> RegressionModel:
    """Near-interpolating fit with a vanishing ridge (the overfit curve)."""
    system = prepare_system(data, kernel)
    c = INTERPOLATION_RELATIVE_RIDGE * system.spectrum.d_max
    y_free = data.labels[system.free_index]
    dual = solve_shifted(system.gram, c, y_free)
    fitted = system.gram.entries @ dual
    residual = data.labels - system.embed(fitted)
    return RegressionModel(
        c=c,
        dual_coeffs=dual,
        kernel=kernel,
        data_points=system.free_points,
        n_samples=data.K,
        achieved_error=float(residual @ residual) / data.K,
        train_predictions=system.embed(fitted),
    )


@dataclass(frozen=True)
class MulticlassFit:
    """Per-output models; failed outputs map to their error instead."""

    models: tuple[RegressionModel | None, ...]
    failures: dict[int, DistillkitError]

    @property
    def ok(self) -> bool:
        """Whether every output was fitted."""
        return not self.failures


def fit_multiclass(
    data: Dataset,
    label_sets: Sequence[ArrayLike],
    kernel: KernelSpec,
    config: FitConfig,
) -> MulticlassFit:
    """Fit one model per output over shared inputs, each with its own c_q.

    ``data`` provides the shared points; its own labels are ignored.
    """
    system = prepare_system(data, kernel)
    models: list[RegressionModel | None] = []
    failures: dict[int, DistillkitError] = {}
    for q, labels in enumerate(label_sets):
        try:
            models.append(system.fit(labels, config))
        except (CollapseCondition, InfeasibleTolerance) as err:
            _LOGGER.warning("Output %d not fitted: %s", q, err)
            models.append(None)
            failures[q] = err
    return MulticlassFit(models=tuple(models), failures=failures)
