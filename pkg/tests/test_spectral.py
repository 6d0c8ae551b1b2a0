"""Tests for the symmetric eigensolver and solve primitives."""

import numpy as np
import pytest

from distillkit.errors import DimensionMismatch, NotPositiveDefinite, PreconditionViolation
from distillkit.spectral import (
    GramSpectrum,
    SymMatrix,
    eigendecompose,
    rotate,
    solve_shifted,
)


def _check_invariants(spectrum: GramSpectrum, matrix: np.ndarray) -> None:
    v = spectrum.eigvecs
    assert np.linalg.norm(v @ v.T - np.eye(spectrum.dim)) <= 1e-10
    assert np.linalg.norm(spectrum.reconstruct() - matrix) <= 1e-10 * np.linalg.norm(matrix)
    assert np.all(spectrum.eigvals > 0.0)
    assert np.all(np.diff(spectrum.eigvals) >= 0.0)
    assert spectrum.cond >= 1.0
    for row in v:
        first = row[np.flatnonzero(np.abs(row) > 1e-12)[0]]
        assert first > 0.0


class TestSymMatrix:
    """Tests for SymMatrix construction."""

    def test_symmetrizes_by_averaging(self):
        """Test asymmetric roundoff is averaged away exactly."""
        m = SymMatrix(np.array([[1.0, 0.5], [0.5 + 1e-15, 2.0]]))
        assert m.entries[0, 1] == m.entries[1, 0]
        assert m.dim == 2

    def test_entries_are_read_only(self):
        """Test stored entries cannot be mutated."""
        m = SymMatrix(np.eye(2))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0

    @pytest.mark.parametrize("shape", [(2, 3), (0, 0), (3,)])
    def test_rejects_non_square(self, shape):
        """Test non-square or empty input is rejected."""
        with pytest.raises(DimensionMismatch):
            SymMatrix(np.zeros(shape))

    def test_rejects_non_finite(self):
        """Test NaN entries are rejected."""
        with pytest.raises(PreconditionViolation):
            SymMatrix(np.array([[1.0, np.nan], [np.nan, 1.0]]))


class TestEigendecompose:
    """Tests for the Jacobi eigendecomposition."""

    def test_identity(self):
        """Test I2 has unit eigenvalues and an orthogonal basis."""
        spectrum = eigendecompose(SymMatrix(np.eye(2)))
        np.testing.assert_array_equal(spectrum.eigvals, [1.0, 1.0])
        _check_invariants(spectrum, np.eye(2))

    def test_diagonal_is_sorted_ascending(self):
        """Test diag(3, 1) yields eigenvalues [1, 3] and kappa 3."""
        spectrum = eigendecompose(SymMatrix(np.diag([3.0, 1.0])))
        np.testing.assert_allclose(spectrum.eigvals, [1.0, 3.0])
        assert spectrum.cond == pytest.approx(3.0)
        np.testing.assert_allclose(np.abs(spectrum.eigvecs), [[0.0, 1.0], [1.0, 0.0]])

    @pytest.mark.parametrize("seed", range(5))
    def test_random_spd_reconstruction(self, random_spd, seed):
        """Test V^T D V reconstructs a random SPD matrix to 1e-10."""
        matrix = random_spd(5, seed)
        spectrum = eigendecompose(SymMatrix(matrix))
        _check_invariants(spectrum, matrix)
        np.testing.assert_allclose(spectrum.eigvals, np.linalg.eigvalsh(matrix), rtol=1e-10)

    def test_larger_matrix(self, random_spd):
        """Test a 30 x 30 matrix converges with all invariants."""
        matrix = random_spd(30, 11)
        _check_invariants(eigendecompose(SymMatrix(matrix)), matrix)

    def test_singular_matrix_rejected(self):
        """Test a rank-deficient matrix raises NotPositiveDefinite."""
        with pytest.raises(NotPositiveDefinite):
            eigendecompose(SymMatrix(np.ones((3, 3))))

    def test_indefinite_matrix_rejected(self):
        """Test a negative eigenvalue raises NotPositiveDefinite."""
        with pytest.raises(NotPositiveDefinite):
            eigendecompose(SymMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])))

    def test_deterministic(self, random_spd):
        """Test identical inputs give bit-identical outputs."""
        matrix = random_spd(6, 3)
        first = eigendecompose(SymMatrix(matrix))
        second = eigendecompose(SymMatrix(matrix))
        np.testing.assert_array_equal(first.eigvals, second.eigvals)
        np.testing.assert_array_equal(first.eigvecs, second.eigvecs)

    def test_spectrum_arrays_are_read_only(self, random_spd):
        """Test eigenvalues and eigenvectors are frozen."""
        spectrum = eigendecompose(SymMatrix(random_spd(3)))
        with pytest.raises(ValueError):
            spectrum.eigvals[0] = 0.0


class TestRotate:
    """Tests for z = V y."""

    def test_identity_rotation(self):
        """Test V = I leaves y unchanged."""
        spectrum = GramSpectrum(eigvals=np.array([1.0, 2.0]), eigvecs=np.eye(2))
        np.testing.assert_array_equal(rotate(spectrum, [1.0, 2.0]), [1.0, 2.0])

    def test_zero_vector(self, random_spd):
        """Test rotating zero gives zero."""
        spectrum = eigendecompose(SymMatrix(random_spd(3)))
        np.testing.assert_array_equal(rotate(spectrum, np.zeros(3)), np.zeros(3))

    def test_norm_preserved(self, random_spd):
        """Test ||z|| equals ||y||."""
        spectrum = eigendecompose(SymMatrix(random_spd(3, 4)))
        y = np.array([0.3, -1.2, 2.5])
        assert np.linalg.norm(rotate(spectrum, y)) == pytest.approx(np.linalg.norm(y), rel=1e-12)

    def test_dimension_mismatch(self):
        """Test a wrong-length vector is rejected."""
        spectrum = GramSpectrum(eigvals=np.array([1.0, 2.0]), eigvecs=np.eye(2))
        with pytest.raises(DimensionMismatch):
            rotate(spectrum, [1.0, 2.0, 3.0])


class TestSolveShifted:
    """Tests for the dense (cI + G) r = y solve."""

    def test_scalar_shift(self):
        """Test G = I, c = 1, y = (2, 2) gives r = (1, 1)."""
        np.testing.assert_allclose(solve_shifted(SymMatrix(np.eye(2)), 1.0, [2.0, 2.0]), [1.0, 1.0])

    def test_diagonal(self):
        """Test G = diag(1, 3), c = 1, y = (2, 4) gives r = (1, 1)."""
        result = solve_shifted(SymMatrix(np.diag([1.0, 3.0])), 1.0, [2.0, 4.0])
        np.testing.assert_allclose(result, [1.0, 1.0])

    def test_matches_spectral_form(self, random_spd):
        """Test the dense solve agrees with V^T (cI + D)^-1 V y."""
        matrix = random_spd(6, 8)
        m = SymMatrix(matrix)
        y = np.linspace(-1.0, 2.0, 6)
        dense = solve_shifted(m, 0.7, y)
        spectral = eigendecompose(m).shifted_solve(0.7, y)
        np.testing.assert_allclose(dense, spectral, rtol=1e-10)
        residual = (matrix + 0.7 * np.eye(6)) @ dense - y
        assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(y)

    def test_non_positive_shift(self):
        """Test c <= 0 is rejected."""
        with pytest.raises(PreconditionViolation):
            solve_shifted(SymMatrix(np.eye(2)), 0.0, [1.0, 1.0])

    def test_not_positive_definite(self):
        """Test an indefinite shifted matrix raises NotPositiveDefinite."""
        with pytest.raises(NotPositiveDefinite):
            solve_shifted(SymMatrix(np.diag([-5.0, 1.0])), 1.0, [1.0, 1.0])
