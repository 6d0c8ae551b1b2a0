"""Dense symmetric linear algebra backbone.

Gram matrices are small (a few hundred rows at most), so the eigensolver is a
plain cyclic Jacobi iteration with deterministic ordering and sign
conventions. Eigenvectors are stored as the ROWS of ``eigvecs`` so that
``G = V.T @ diag(d) @ V`` and the rotated labels are ``z = V @ y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import (
    JACOBI_FALLBACK_TOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_OFF_DIAGONAL_TOL,
    POSITIVITY_RELATIVE_TOL,
    SIGN_SIGNIFICANCE_TOL,
)
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotPositiveDefinite,
    PreconditionViolation,
)

_LOGGER = logging.getLogger(__name__)


def _frozen(values: NDArray[np.float64]) -> NDArray[np.float64]:
    values.flags.writeable = False
    return values


def as_vector(values: ArrayLike, dim: int, name: str = "vector") -> NDArray[np.float64]:
    """Return ``values`` as a float64 vector of length ``dim``."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatch(f"{name} has shape {vec.shape}, expected ({dim},)")
    return vec


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Symmetric K x K matrix, symmetrized by averaging on construction."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        """Validate shape and enforce exact symmetry."""
        raw = np.array(self.entries, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got {raw.shape}")
        if not np.all(np.isfinite(raw)):
            raise PreconditionViolation("matrix has non-finite entries")
        sym = 0.5 * (raw + raw.T)
        object.__setattr__(self, "entries", _frozen(sym))

    @property
    def dim(self) -> int:
        """Return K."""
        return int(self.entries.shape[0])


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    """Eigendecomposition G = V.T diag(eigvals) V with ascending eigenvalues."""

    eigvals: NDArray[np.float64]
    eigvecs: NDArray[np.float64]
    cond: float = field(init=False)

    def __post_init__(self) -> None:
        """Freeze arrays and derive the condition number."""
        object.__setattr__(self, "eigvals", _frozen(np.array(self.eigvals, dtype=np.float64)))
        object.__setattr__(self, "eigvecs", _frozen(np.array(self.eigvecs, dtype=np.float64)))
        object.__setattr__(self, "cond", float(self.eigvals[-1] / self.eigvals[0]))

    @property
    def dim(self) -> int:
        """Return K."""
        return int(self.eigvals.shape[0])

    @property
    def d_min(self) -> float:
        """Return the smallest eigenvalue."""
        return float(self.eigvals[0])

    @property
    def d_max(self) -> float:
        """Return the largest eigenvalue."""
        return float(self.eigvals[-1])

    def reconstruct(self) -> NDArray[np.float64]:
        """Return V.T diag(d) V."""
        return self.eigvecs.T @ (self.eigvals[:, None] * self.eigvecs)

    def unrotate(self, z: ArrayLike) -> NDArray[np.float64]:
        """Map rotated coordinates back: y = V.T z."""
        return self.eigvecs.T @ as_vector(z, self.dim, "z")

    def shifted_solve(self, c: float, y: ArrayLike) -> NDArray[np.float64]:
        """Return (cI + G)^-1 y through the spectral form V.T (cI + D)^-1 V y."""
        z = rotate(self, y)
        return self.eigvecs.T @ (z / (c + self.eigvals))


def _jacobi_sweeps(a: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Diagonalize ``a`` in place by cyclic Jacobi rotations.

    Returns the diagonal and the accumulated rotation whose COLUMNS are the
    eigenvectors.
    """
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    off = 0.0
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= JACOBI_OFF_DIAGONAL_TOL * scale:
            _LOGGER.debug("Jacobi converged after %d sweeps (off=%.3e)", sweep, off)
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    if off <= JACOBI_FALLBACK_TOL * scale:
        _LOGGER.warning(
            "Jacobi hit the %d sweep cap with off-diagonal norm %.3e; accepting",
            JACOBI_MAX_SWEEPS,
            off,
        )
        return np.diag(a).copy(), v
    raise ConvergenceFailure(
        f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off={off:.3e})"
    )


def eigendecompose(m: SymMatrix) -> GramSpectrum:
    """Eigendecompose a symmetric positive definite matrix.

    Eigenvalues are sorted ascending (stable, so ties keep Jacobi order) and
    each eigenvector's first significant component is made positive.
    """
    diag, cols = _jacobi_sweeps(m.entries.copy())
    order = np.argsort(diag, kind="stable")
    eigvals = diag[order]
    rows = cols[:, order].T.copy()

    for row in rows:
        significant = np.flatnonzero(np.abs(row) > SIGN_SIGNIFICANCE_TOL)
        if significant.size and row[significant[0]] < 0.0:
            row *= -1.0

    top = float(np.max(np.abs(eigvals)))
    if top == 0.0 or eigvals[0] <= POSITIVITY_RELATIVE_TOL * top:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {eigvals[0]!r} is not positive relative to {top!r}; "
            "duplicate points or a non positive definite kernel?"
        )
    return GramSpectrum(eigvals=eigvals, eigvecs=rows)


def rotate(spectrum: GramSpectrum, y: ArrayLike) -> NDArray[np.float64]:
    """Return z = V y."""
    return spectrum.eigvecs @ as_vector(y, spectrum.dim, "y")


def solve_shifted(m: SymMatrix, c: float, y: ArrayLike) -> NDArray[np.float64]:
    """Solve (cI + G) r = y with a dense Cholesky-checked solve."""
    if not c > 0.0:
        raise PreconditionViolation(f"shift c must be positive, got {c!r}")
    rhs = as_vector(y, m.dim, "y")
    shifted = m.entries + c * np.eye(m.dim)
    try:
        np.linalg.cholesky(shifted)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefinite(f"cI + G is not positive definite for c={c!r}") from err
    return np.linalg.solve(shifted, rhs)
