"""Test configuration for distillkit tests.

This module provides pytest fixtures shared by the test modules: the
recorded sine dataset, kernels, seeded random instances and a fixture file
loader.
"""

# pylint: disable=redefined-outer-name
# Note: Redefining fixture names in test parameters is expected pytest pattern

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import json
from pathlib import Path
import sys
from typing import Any

import numpy as np
import pytest

# Add the project root to the Python path so tests can import distillkit
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from distillkit.const import RECORDED_SINE_EPSILON  # noqa: E402
from distillkit.kernels import Dataset, KernelSpec  # noqa: E402
from distillkit.presets import preset_recorded_sine, random_problem  # noqa: E402
from distillkit.regression import FitConfig  # noqa: E402

FIXTURES_DIR = Path(__file__).parent / "fixtures"


# ============================================================================
# Kernel and Dataset Fixtures
# ============================================================================


@pytest.fixture
def spline() -> KernelSpec:
    """Return the cubic spline Green's function."""
    return KernelSpec.cubic_spline_green()


@pytest.fixture
def sine_data() -> Dataset:
    """Return the recorded 11-point sine dataset."""
    return preset_recorded_sine()


@pytest.fixture
def sine_config() -> FitConfig:
    """Return the tolerance used with the recorded dataset."""
    return FitConfig(epsilon=RECORDED_SINE_EPSILON)


@pytest.fixture
def flat_data() -> Dataset:
    """Three far-apart points: under a narrow Gaussian the Gram matrix is I / 3."""
    return Dataset(np.array([0.0, 10.0, 20.0]), np.array([1.0, 2.0, 3.0]))


@pytest.fixture
def narrow_gaussian() -> KernelSpec:
    """Gaussian kernel much narrower than the flat_data spacing."""
    return KernelSpec.gaussian(0.1)


# ============================================================================
# Random Instances
# ============================================================================


@dataclass(frozen=True)
class Instance:
    """A random well-conditioned problem."""

    data: Dataset
    kernel: KernelSpec
    config: FitConfig


def make_instance(rng: np.random.Generator, n_points: int, variant: str) -> Instance:
    """Build a random instance with jittered, well-separated inputs."""
    data, kernel, epsilon = random_problem(rng, n_points, variant)
    return Instance(data, kernel, FitConfig(epsilon=epsilon))


@pytest.fixture
def random_instances() -> Callable[[int, int], list[Instance]]:
    """Return a factory of seeded random instances with K in 2..20."""

    def _instances(count: int, seed: int = 0) -> list[Instance]:
        rng = np.random.Generator(np.random.Philox(seed))
        return [
            make_instance(rng, int(rng.integers(2, 21)), "cubic_spline_green" if i % 2 == 0 else "gaussian")
            for i in range(count)
        ]

    return _instances


@pytest.fixture
def random_spd() -> Callable[[int, int], np.ndarray]:
    """Return a factory of random SPD matrices M^T M + I."""

    def _spd(dim: int, seed: int = 0) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(seed))
        m = rng.normal(size=(dim, dim))
        return m.T @ m + np.eye(dim)

    return _spd


# ============================================================================
# Fixture Data Fixtures
# ============================================================================


@pytest.fixture
def fixtures_dir() -> Path:
    """Return the path to the fixtures directory."""
    return FIXTURES_DIR


@pytest.fixture
def load_fixture() -> Callable[[str, str], dict[str, Any]]:
    """Return a function to load JSON fixture files."""

    def _load_fixture(folder: str, filename: str) -> dict[str, Any]:
        """Load a fixture file.

        Args:
            folder: Fixture folder name (e.g., "paper_sine")
            filename: File name (e.g., "dataset.json")

        Returns:
            Parsed JSON content

        """
        file_path = FIXTURES_DIR / folder / filename
        with file_path.open(encoding="utf-8") as f:
            return json.load(f)

    return _load_fixture
