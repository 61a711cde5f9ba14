"""Pytest configuration and fixtures."""

import logging
from pathlib import Path

import numpy as np
import pytest

from step2heat.config import QuadratureConfig
from step2heat.group.builtins import builtin_group, free_step_two, heisenberg, quaternionic
from step2heat.logging import setup_logging
from step2heat.models import GroupPoint, GroupSpec

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"


# Configure logging for tests
def pytest_configure(config: pytest.Config) -> None:
    """Configure pytest with enhanced logging for better visibility."""
    setup_logging(
        level=logging.DEBUG,
        format_string="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        use_color=True,
    )


@pytest.fixture
def heisenberg1() -> GroupSpec:
    """The first Heisenberg group: m = 2, k = 1."""
    return heisenberg(1)


@pytest.fixture
def heisenberg2() -> GroupSpec:
    """The second Heisenberg group: m = 4, k = 1."""
    return heisenberg(2)


@pytest.fixture
def quaternionic_group() -> GroupSpec:
    """The quaternionic H-type group: m = 4, k = 3."""
    return quaternionic()


@pytest.fixture
def free3() -> GroupSpec:
    """The free step-two group on three generators, which is not of Heisenberg type."""
    return free_step_two(3)


@pytest.fixture(params=["heisenberg1", "heisenberg2", "quaternionic", "free3"])
def builtin_spec(request: pytest.FixtureRequest) -> GroupSpec:
    """Each built-in group in turn."""
    return builtin_group(request.param)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so that random samples are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def qcfg() -> QuadratureConfig:
    """Default λ-quadrature settings."""
    return QuadratureConfig()


@pytest.fixture
def specs_dir() -> Path:
    """Directory holding the JSON specs of the built-in groups."""
    return SPECS_DIR


def random_point(spec: GroupSpec, rng: np.random.Generator, scale: float = 1.0) -> GroupPoint:
    """Point with coordinates uniform in [-scale, scale]."""
    return GroupPoint(
        rng.uniform(-scale, scale, spec.m),
        rng.uniform(-scale, scale, spec.k),
    )
