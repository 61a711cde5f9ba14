"""Unit tests for configuration."""

import math
import os

import pytest

from step2heat.config import (
    THREADS_ENV_VAR,
    McConfig,
    QuadratureConfig,
    RunConfig,
    StencilConfig,
    TimeQuadratureConfig,
    worker_count,
)


class TestQuadratureConfig:
    """Tests for QuadratureConfig dataclass."""

    def test_default_values(self) -> None:
        """Test that default configuration has expected values."""
        config = QuadratureConfig()

        assert config.rel_tol == 1e-8
        assert config.k0 is None
        assert config.truncation_radius is None
        assert config.nodes_per_dim == 12
        assert config.max_refinements == 4
        assert config.max_nodes_per_panel == 2048
        assert config.check_imag is True

    def test_resolved_method(self) -> None:
        """Test that tensor rules are used up to k = 3 and subdivision above."""
        config = QuadratureConfig()
        assert config.resolved_method(1) == "tensor-gauss"
        assert config.resolved_method(3) == "tensor-gauss"
        assert config.resolved_method(4) == "adaptive-subdivision"

        forced = QuadratureConfig(method="adaptive-subdivision")
        assert forced.resolved_method(1) == "adaptive-subdivision"

    def test_resolved_panel_width(self) -> None:
        """Test default panel widths."""
        config = QuadratureConfig()
        assert config.resolved_panel_width(1) == math.pi
        assert config.resolved_panel_width(3) == 2.0 * math.pi
        assert QuadratureConfig(panel_width=1.5).resolved_panel_width(1) == 1.5

    @pytest.mark.parametrize("rel_tol", [0.0, -1e-8, 0.5])
    def test_invalid_tolerance(self, rel_tol: float) -> None:
        """Test that tolerances outside (0, 0.1] are rejected."""
        with pytest.raises(ValueError, match="Relative tolerance"):
            QuadratureConfig(rel_tol=rel_tol)

    def test_invalid_values(self) -> None:
        """Test validation of the remaining fields."""
        with pytest.raises(ValueError, match="k0"):
            QuadratureConfig(k0=0.0)
        with pytest.raises(ValueError, match="Truncation radius"):
            QuadratureConfig(truncation_radius=-1.0)
        with pytest.raises(ValueError, match="Nodes per dimension"):
            QuadratureConfig(nodes_per_dim=4)
        with pytest.raises(ValueError, match="Unknown quadrature method"):
            QuadratureConfig(method="simpson")  # type: ignore[arg-type]
        with pytest.raises(ValueError, match="Maximum nodes per panel"):
            QuadratureConfig(max_nodes_per_panel=10)


class TestTimeQuadratureConfig:
    """Tests for TimeQuadratureConfig dataclass."""

    def test_default_values(self) -> None:
        """Test that default configuration has expected values."""
        config = TimeQuadratureConfig()
        assert config.rel_tol == 1e-6
        assert config.gaussian_cutoff == 37.0
        assert config.tail_factor == 1e3

    def test_invalid_values(self) -> None:
        """Test validation."""
        with pytest.raises(ValueError, match="Relative tolerance"):
            TimeQuadratureConfig(rel_tol=1.0)
        with pytest.raises(ValueError, match="Tail factor"):
            TimeQuadratureConfig(tail_factor=1.0)


class TestStencilConfig:
    """Tests for StencilConfig dataclass."""

    def test_defaults(self) -> None:
        """Test default steps."""
        config = StencilConfig()
        assert (config.h_z, config.h_sigma, config.h_t) == (0.05, 0.05, 0.05)
        assert config.richardson is True

    def test_non_positive_step(self) -> None:
        """Test that steps must be positive."""
        with pytest.raises(ValueError, match="h_sigma"):
            StencilConfig(h_sigma=0.0)


class TestMcConfig:
    """Tests for McConfig dataclass."""

    def test_dt(self) -> None:
        """Test the time step."""
        config = McConfig(n_paths=1000, n_steps=200, t=0.5)
        assert config.dt == pytest.approx(0.0025)

    def test_minimum_sizes(self) -> None:
        """Test the lower limits on paths and steps."""
        with pytest.raises(ValueError, match="paths"):
            McConfig(n_paths=999)
        with pytest.raises(ValueError, match="steps"):
            McConfig(n_steps=99)

    def test_seed_range(self) -> None:
        """Test that seeds must fit in 64 bits."""
        McConfig(seed=2**64 - 1)
        with pytest.raises(ValueError, match="Seed"):
            McConfig(seed=2**64)

    def test_antithetic_block_size(self) -> None:
        """Test that antithetic sampling needs even blocks."""
        with pytest.raises(ValueError, match="even block size"):
            McConfig(antithetic=True, block_size=1001)


class TestRunConfig:
    """Tests for RunConfig dataclass."""

    def test_valid(self) -> None:
        """Test a valid configuration."""
        config = RunConfig(command="eval", spec_path="builtin:heisenberg1")
        assert config.tolerance == 1e-8
        assert config.output is None

    def test_invalid(self) -> None:
        """Test unknown commands and tolerances."""
        with pytest.raises(ValueError, match="Unknown command"):
            RunConfig(command="plot")  # type: ignore[arg-type]
        with pytest.raises(ValueError, match="Tolerance"):
            RunConfig(command="eval", tolerance=0.2)


class TestWorkerCount:
    """Tests for the worker count helper."""

    def test_unset(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that all CPUs are used without the environment variable."""
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        assert worker_count() == (os.cpu_count() or 1)

    def test_capped(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that the environment variable caps the count."""
        monkeypatch.setenv(THREADS_ENV_VAR, "1")
        assert worker_count() == 1

    @pytest.mark.parametrize("raw", ["zero", "0", "-3"])
    def test_invalid(self, monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
        """Test that the environment variable must be a positive integer."""
        monkeypatch.setenv(THREADS_ENV_VAR, raw)
        with pytest.raises(ValueError, match=THREADS_ENV_VAR):
            worker_count()
