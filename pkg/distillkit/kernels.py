"""Green's function catalog, datasets and Gram-matrix construction.

Every Gram matrix and kernel vector carries the 1/K factor of the
representer solution: ``G[j, k] = g(x_j, x_k) / K`` and
``g_x[k] = g(x, x_k) / K``.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import (
    ANCHOR_TOL,
    DUPLICATE_POINT_TOL,
    KERNEL_CUBIC_SPLINE_GREEN,
    KERNEL_GAUSSIAN,
    KERNEL_VARIANTS,
    SPLINE_DOMAIN,
)
from .errors import DimensionMismatch, DomainViolation, InvalidDataset
from .spectral import SymMatrix

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelSpec:
    """A positive definite kernel from the catalog."""

    variant: str
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        """Check the variant and its parameters."""
        if self.variant not in KERNEL_VARIANTS:
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == KERNEL_GAUSSIAN:
            if self.bandwidth is None or not self.bandwidth > 0.0:
                raise ValueError(f"gaussian bandwidth must be positive, got {self.bandwidth!r}")
            object.__setattr__(self, "bandwidth", float(self.bandwidth))
        elif self.bandwidth is not None:
            raise ValueError("the spline Green's function takes no bandwidth")

    @classmethod
    def cubic_spline_green(cls) -> KernelSpec:
        """Green's function of d^4/dx^4 on [0, 1] with f = f'' = 0 at both ends."""
        return cls(KERNEL_CUBIC_SPLINE_GREEN)

    @classmethod
    def gaussian(cls, bandwidth: float) -> KernelSpec:
        """Gaussian kernel exp(-|x - x'|^2 / (2 h^2))."""
        return cls(KERNEL_GAUSSIAN, bandwidth)

    @property
    def scalar_inputs(self) -> bool:
        """Whether the kernel only accepts scalar inputs."""
        return self.variant == KERNEL_CUBIC_SPLINE_GREEN

    def is_anchored(self, x: ArrayLike) -> bool:
        """Whether every function in the kernel's class vanishes at ``x``."""
        if self.variant != KERNEL_CUBIC_SPLINE_GREEN:
            return False
        value = _scalar(x)
        lo, hi = SPLINE_DOMAIN
        return abs(value - lo) <= ANCHOR_TOL or abs(value - hi) <= ANCHOR_TOL

    def as_dict(self) -> dict[str, Any]:
        """Return the JSON descriptor of this kernel."""
        if self.variant == KERNEL_GAUSSIAN:
            return {"type": self.variant, "bandwidth": self.bandwidth}
        return {"type": self.variant}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> KernelSpec:
        """Build a kernel from its JSON descriptor."""
        return cls(data["type"], data.get("bandwidth"))


def _scalar(x: ArrayLike) -> float:
    arr = np.asarray(x, dtype=np.float64)
    if arr.size != 1:
        raise DomainViolation(f"the spline Green's function takes scalar inputs, got shape {arr.shape}")
    return float(arr.reshape(()))


def _check_spline_domain(x: float) -> None:
    lo, hi = SPLINE_DOMAIN
    if not lo <= x <= hi:
        raise DomainViolation(f"input {x!r} is outside [{lo}, {hi}]")


def eval_kernel(spec: KernelSpec, x: ArrayLike, x_dag: ArrayLike) -> float:
    """Evaluate g(x, x_dag)."""
    if spec.variant == KERNEL_CUBIC_SPLINE_GREEN:
        u = _scalar(x)
        v = _scalar(x_dag)
        _check_spline_domain(u)
        _check_spline_domain(v)
        return max((u - v) ** 3, 0.0) / 6.0 - u * (1.0 - v) * (u * u - 2.0 * v + v * v) / 6.0

    a = np.atleast_1d(np.asarray(x, dtype=np.float64))
    b = np.atleast_1d(np.asarray(x_dag, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionMismatch(f"inputs have shapes {a.shape} and {b.shape}")
    sq = float(np.sum((a - b) ** 2))
    return math.exp(-sq / (2.0 * spec.bandwidth**2))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Training inputs (K x d, d = 1 for scalar inputs) and labels y_0."""

    points: NDArray[np.float64]
    labels: NDArray[np.float64]

    def __post_init__(self) -> None:
        """Validate sizes and pairwise distinctness."""
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        labels = np.array(self.labels, dtype=np.float64)
        if points.ndim != 2 or labels.ndim != 1:
            raise InvalidDataset(
                f"points must be (K,) or (K, d) and labels (K,), got {points.shape} and {labels.shape}"
            )
        if points.shape[0] < 1:
            raise InvalidDataset("a dataset needs at least one point")
        if points.shape[0] != labels.shape[0]:
            raise InvalidDataset(
                f"{points.shape[0]} points but {labels.shape[0]} labels"
            )
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(labels))):
            raise InvalidDataset("dataset has non-finite values")

        diffs = np.max(np.abs(points[:, None, :] - points[None, :, :]), axis=2)
        np.fill_diagonal(diffs, np.inf)
        if np.any(diffs <= DUPLICATE_POINT_TOL):
            j, k = np.argwhere(diffs <= DUPLICATE_POINT_TOL)[0]
            raise InvalidDataset(f"points {j} and {k} coincide; the Gram matrix would be singular")

        points.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def K(self) -> int:  # noqa: N802
        """Return the number of training points."""
        return int(self.points.shape[0])

    @property
    def input_dim(self) -> int:
        """Return the input dimension d."""
        return int(self.points.shape[1])

    def with_labels(self, labels: ArrayLike) -> Dataset:
        """Return the same inputs with new targets."""
        return Dataset(self.points, np.asarray(labels, dtype=np.float64))

    def as_dict(self) -> dict[str, Any]:
        """Return the JSON form (scalar points are flattened)."""
        points = self.points[:, 0] if self.input_dim == 1 else self.points
        return {"points": points.tolist(), "labels": self.labels.tolist()}


def _point(data_points: NDArray[np.float64], index: int) -> Any:
    row = data_points[index]
    return row[0] if row.shape[0] == 1 else row


def anchored_mask(spec: KernelSpec, data: Dataset) -> NDArray[np.bool_]:
    """Flag the training points where the kernel pins f to zero."""
    return np.array([spec.is_anchored(_point(data.points, k)) for k in range(data.K)], dtype=bool)


def _check_inputs(spec: KernelSpec, data: Dataset) -> None:
    if spec.scalar_inputs and data.input_dim != 1:
        raise DomainViolation(f"{spec.variant} needs scalar inputs, dataset has d={data.input_dim}")


def build_gram(spec: KernelSpec, data: Dataset, subset: ArrayLike | None = None) -> SymMatrix:
    """Build G[j, k] = g(x_j, x_k) / K.

    ``subset`` restricts rows and columns to the given indices while keeping
    the 1/K factor of the full dataset.
    """
    _check_inputs(spec, data)
    index = np.arange(data.K) if subset is None else np.asarray(subset, dtype=int)
    n = index.shape[0]
    gram = np.empty((n, n))
    for a, j in enumerate(index):
        for b, k in enumerate(index):
            gram[a, b] = eval_kernel(spec, _point(data.points, j), _point(data.points, k)) / data.K
    _LOGGER.debug("Built %dx%d Gram matrix for %s (K=%d)", n, n, spec.variant, data.K)
    return SymMatrix(gram)


def kernel_row(
    spec: KernelSpec, points: NDArray[np.float64], x: ArrayLike, n_samples: int
) -> NDArray[np.float64]:
    """Return g(x, p_k) / n_samples for every row p_k of ``points``."""
    return np.array(
        [eval_kernel(spec, x, _point(points, k)) / n_samples for k in range(points.shape[0])]
    )


def kernel_vector(
    spec: KernelSpec, data: Dataset, x: ArrayLike, subset: ArrayLike | None = None
) -> NDArray[np.float64]:
    """Return g_x[k] = g(x, x_k) / K."""
    _check_inputs(spec, data)
    points = data.points if subset is None else data.points[np.asarray(subset, dtype=int)]
    return kernel_row(spec, points, x, data.K)


def green_surface(spec: KernelSpec, samples: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Evaluate g on a samples x samples grid of [0, 1]^2."""
    grid = np.linspace(0.0, 1.0, samples)
    values = np.array([[eval_kernel(spec, u, v) for v in grid] for u in grid])
    return grid, values
