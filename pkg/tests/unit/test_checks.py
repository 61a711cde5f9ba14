"""Unit tests for the verification suites."""

import math

import pytest

from step2heat.models import GroupSpec
from step2heat.special.fractional import gauge
from step2heat.verification.checks import (
    MIN_GAUGE,
    PROFILE_POINTS,
    SUITES,
    _sample_points,
    mass_check,
    ou_suite,
    pde_suite,
    run_suite,
    run_suites,
    vertical_identity_check,
)


class TestSkipRows:
    """Tests for suites that do not apply to every group."""

    @pytest.mark.parametrize("suite", ["mass", "semigroup", "vertical", "green", "fractional"])
    def test_free_group_skips(self, free3: GroupSpec, suite: str) -> None:
        """Test that planar and H-type suites report a skip row on the free group."""
        rows = run_suite(free3, suite)  # type: ignore[arg-type]
        assert len(rows) == 1
        assert rows[0].status == "skip"
        assert math.isnan(rows[0].value)
        assert rows[0].detail

    def test_planar_checks_raise_when_called_directly(self, heisenberg2: GroupSpec) -> None:
        """Test that the planar helpers reject other groups."""
        with pytest.raises(ValueError, match="m = 2, k = 1"):
            mass_check(heisenberg2)
        with pytest.raises(ValueError, match="m = 2, k = 1"):
            vertical_identity_check(heisenberg2, [1.0, 0.0])


class TestSuites:
    """Tests for suites cheap enough to run on every commit."""

    def test_unknown_suite(self, heisenberg1: GroupSpec) -> None:
        """Test that an unknown suite name is rejected."""
        with pytest.raises(ValueError, match="Unknown suite"):
            run_suite(heisenberg1, "everything")  # type: ignore[arg-type]

    def test_suite_names(self) -> None:
        """Test the suites offered on the command line."""
        assert SUITES == ("pde", "mass", "semigroup", "mc", "vertical", "ou", "green", "fractional")

    def test_ou_suite(self, heisenberg1: GroupSpec) -> None:
        """Test that the Ornstein-Uhlenbeck identities hold."""
        rows = ou_suite(heisenberg1)
        assert [row.check for row in rows] == [
            "ou-kolmogorov",
            "ou-mehler-classical",
            "ou-mehler-via-ou",
            "ou-oscillator-residual",
            "ou-drift-elimination",
        ]
        assert all(row.passed for row in rows), [row for row in rows if not row.passed]

    def test_pde_suite(self, heisenberg1: GroupSpec) -> None:
        """Test the heat-equation residual and the Gaussian control."""
        rows = pde_suite(heisenberg1, n_points=2)
        assert [row.status for row in rows] == ["pass", "pass"]

    def test_invalid_direction(self, heisenberg1: GroupSpec) -> None:
        """Test that the vertical identity needs a unit vector in the plane."""
        with pytest.raises(ValueError, match="unit vector"):
            vertical_identity_check(heisenberg1, [1.0, 1.0])
        with pytest.raises(ValueError, match="unit vector"):
            vertical_identity_check(heisenberg1, [1.0, 0.0, 0.0])

    def test_run_suites_keeps_order(self, free3: GroupSpec) -> None:
        """Test that rows follow the order of the requested suites."""
        rows = run_suites(free3, ["green", "mass", "fractional", "vertical"], workers=4)
        assert [row.check for row in rows] == ["green", "mass", "fractional", "vertical"]


class TestProfilePoints:
    """Tests for the points of the gauge-profile checks."""

    def test_default_count(self, quaternionic_group: GroupSpec) -> None:
        """Test ten points, the first three fixed and all away from the pole."""
        points = _sample_points(quaternionic_group)
        assert len(points) == PROFILE_POINTS == 10
        assert points[0].z.tolist() == [1.0, 0.0, 0.0, 0.0]
        assert not points[0].sigma.any()
        assert not points[1].z.any()
        assert all(gauge(p.z, p.sigma).N >= MIN_GAUGE for p in points)

    def test_seeded(self, heisenberg1: GroupSpec) -> None:
        """Test that the random points depend only on the seed."""
        first = _sample_points(heisenberg1, 12, seed=3)
        second = _sample_points(heisenberg1, 12, seed=3)
        assert all(a.allclose(b) for a, b in zip(first, second, strict=True))
        assert not _sample_points(heisenberg1, 12, seed=4)[5].allclose(first[5])

    def test_too_few(self, heisenberg1: GroupSpec) -> None:
        """Test that a profile needs the three fixed points."""
        with pytest.raises(ValueError, match="at least 3"):
            _sample_points(heisenberg1, 2)
