"""Unit tests for the Baouendi-Grushin and fractional kernels."""

import math

import numpy as np
import pytest

from step2heat.errors import NotHeisenbergTypeError, PoleError
from step2heat.kernel.heisenberg import HeisenbergTypeKernel
from step2heat.models import FractionalParams, GroupPoint, GroupSpec
from step2heat.special.fractional import (
    ExtensionKernel,
    RieszKernel,
    c_constant,
    closed_form_E_s,
    endpoint_constant,
    extension_q_s,
    fractional_green,
    gauge,
    measure_constant,
    riesz_K_s,
)
from step2heat.special.grushin import GrushinKernel, bg_green, bg_heat


class TestGauge:
    """Tests for the homogeneous gauge and the closed-form constants."""

    def test_gauge(self) -> None:
        """Test N on horizontal and vertical unit points."""
        assert gauge([1.0, 0.0], [0.0]).N == pytest.approx(1.0)
        assert gauge([0.0, 0.0], [1.0]).N == pytest.approx(2.0)
        assert gauge([0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0]).N == 0.0

    def test_heisenberg_constants(self) -> None:
        """Test C_1(2, 1) = 1/(2π) and the endpoint constant 2/π."""
        assert c_constant(1.0, 2, 1) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)
        assert endpoint_constant(2, 1) == pytest.approx(2.0 / math.pi, rel=1e-14)

    @pytest.mark.parametrize(("m", "k"), [(2, 1), (4, 1), (4, 3), (8, 7)])
    def test_endpoint_constant_ratio(self, m: int, k: int) -> None:
        """Test that the endpoint constant is four times C_1."""
        assert endpoint_constant(m, k) == pytest.approx(4.0 * c_constant(1.0, m, k), rel=1e-13)

    def test_order_range(self) -> None:
        """Test that C_s needs 0 < s ≤ 1."""
        with pytest.raises(ValueError, match="Order"):
            c_constant(0.0, 2, 1)
        with pytest.raises(ValueError, match="Order"):
            c_constant(1.5, 2, 1)


class TestFractionalKernels:
    """Tests for the extension and fractional heat kernels."""

    def test_riesz_at_one_is_heat_kernel(self, heisenberg1: GroupSpec) -> None:
        """Test K_1 = p."""
        params = FractionalParams(1.0, 0.0, heisenberg1)
        heat = HeisenbergTypeKernel(heisenberg1)
        e = GroupPoint.identity(2, 1)
        for z, sigma in (([0.3, -0.4], [0.2]), ([1.0, 0.0], [0.0]), ([0.0, 0.0], [0.7])):
            expected = heat.evaluate(GroupPoint(z, sigma), e, 0.8).value
            assert riesz_K_s(params, z, sigma, 0.8) == pytest.approx(expected, rel=1e-10)

    def test_extension_absorbs_y(self, heisenberg1: GroupSpec) -> None:
        """Test that at s = 1 the variable y adds to |z|² in the Gaussian."""
        params = FractionalParams(1.0, 0.6, heisenberg1)
        heat = HeisenbergTypeKernel(heisenberg1)
        radius = math.sqrt(0.3**2 + 0.4**2 + 0.6**2)
        expected = heat.evaluate(
            GroupPoint([radius, 0.0], [0.2]), GroupPoint.identity(2, 1), 0.8
        ).value
        value = extension_q_s(params, [0.3, 0.4], [0.2], 0.8)
        assert value == pytest.approx(expected, rel=1e-10)

    def test_riesz_ignores_y(self, heisenberg1: GroupSpec) -> None:
        """Test that the fractional heat kernel is the extension kernel at y = 0."""
        with_y = FractionalParams(0.5, 2.0, heisenberg1)
        without_y = FractionalParams(0.5, 0.0, heisenberg1)
        assert riesz_K_s(with_y, [0.3, 0.1], [0.2], 1.0) == pytest.approx(
            riesz_K_s(without_y, [0.3, 0.1], [0.2], 1.0), rel=1e-14
        )
        kernel = RieszKernel(with_y)
        assert isinstance(kernel, ExtensionKernel)
        assert kernel.params.y == 0.0

    def test_extension_prefactor(self, heisenberg1: GroupSpec) -> None:
        """Test K_s = (4πt)^{1-s}·q_s at y = 0."""
        params = FractionalParams(0.5, 0.0, heisenberg1)
        t = 0.6
        q_value = extension_q_s(params, [0.3, 0.1], [0.2], t)
        k_value = riesz_K_s(params, [0.3, 0.1], [0.2], t)
        assert k_value == pytest.approx((4.0 * math.pi * t) ** 0.5 * q_value, rel=1e-12)

    def test_free_group_rejected(self, free3: GroupSpec) -> None:
        """Test that fractional kernels need an H-type group."""
        with pytest.raises(NotHeisenbergTypeError):
            FractionalParams(0.5, 0.0, free3)

    def test_wrong_dimensions(self, heisenberg1: GroupSpec) -> None:
        """Test that points must match the group."""
        params = FractionalParams(0.5, 0.0, heisenberg1)
        with pytest.raises(ValueError, match="does not belong"):
            riesz_K_s(params, [0.3, 0.1, 0.0], [0.2], 1.0)


class TestFractionalGreen:
    """Tests for the fundamental solution of the fractional operator."""

    def test_closed_form(self, heisenberg1: GroupSpec) -> None:
        """Test ℰ_1((1, 0), 0) from both constant sources."""
        params = FractionalParams(1.0, 0.0, heisenberg1)
        theorem = closed_form_E_s(params, [1.0, 0.0], [0.0])
        endpoint = closed_form_E_s(params, [1.0, 0.0], [0.0], source="endpoint-identity")
        assert theorem == pytest.approx(1.0 / (2.0 * math.pi))
        assert endpoint == pytest.approx(2.0 / math.pi)

    def test_closed_form_homogeneity(self, heisenberg1: GroupSpec) -> None:
        """Test that ℰ_s scales like N^{2s-Q}."""
        params = FractionalParams(0.5, 0.0, heisenberg1)
        near = closed_form_E_s(params, [1.0, 0.0], [0.0])
        far = closed_form_E_s(params, [2.0, 0.0], [0.0])
        assert far / near == pytest.approx(2.0 ** (1.0 - 4.0))

    def test_closed_form_errors(self, heisenberg1: GroupSpec) -> None:
        """Test the pole and the endpoint constant away from s = 1."""
        params = FractionalParams(0.5, 0.0, heisenberg1)
        with pytest.raises(PoleError):
            closed_form_E_s(params, [0.0, 0.0], [0.0])
        with pytest.raises(ValueError, match="s = 1 only"):
            closed_form_E_s(params, [1.0, 0.0], [0.0], source="endpoint-identity")
        with pytest.raises(PoleError):
            fractional_green(params, [0.0, 0.0], [0.0])

    @pytest.mark.parametrize("s", [0.5, 1.0])
    def test_numeric_matches_closed_form(self, heisenberg1: GroupSpec, s: float) -> None:
        """Test the numeric time integral against C_s·N^{2s-Q}."""
        params = FractionalParams(s, 0.0, heisenberg1)
        for z, sigma in (([1.0, 0.0], [0.0]), ([0.0, 0.0], [1.0]), ([0.6, 0.3], [-0.4])):
            numeric = fractional_green(params, z, sigma)
            assert numeric == pytest.approx(closed_form_E_s(params, z, sigma), rel=1e-4)

    def test_measure_constant(self, heisenberg1: GroupSpec) -> None:
        """Test the measured constant at s = 1 and its ratio to the endpoint constant."""
        params = FractionalParams(1.0, 0.0, heisenberg1)
        points = [GroupPoint([1.0, 0.0], [0.0]), GroupPoint([0.0, 0.0], [1.0])]
        report = measure_constant(params, points)
        assert report.n_points == 2
        assert report.theorem_ratio == pytest.approx(1.0, rel=1e-4)
        assert report.endpoint_ratio == pytest.approx(0.25, rel=1e-4)
        assert report.spread < 1e-3

    def test_measure_constant_needs_points(self, heisenberg1: GroupSpec) -> None:
        """Test that an empty sample is rejected."""
        with pytest.raises(ValueError, match="sample point"):
            measure_constant(FractionalParams(0.5, 0.0, heisenberg1), [])


class TestGrushin:
    """Tests for the Baouendi-Grushin kernel."""

    def test_matches_heisenberg_at_zero(self, heisenberg1: GroupSpec) -> None:
        """Test that at w = w' = 0 the kernel is the Heisenberg kernel on the σ axis."""
        heat = HeisenbergTypeKernel(heisenberg1)
        e = GroupPoint.identity(2, 1)
        for sigma in (0.0, 0.5, 2.0):
            expected = heat.evaluate(GroupPoint([0.0, 0.0], [sigma]), e, 0.7).value
            value = bg_heat(2, 1, [0.0, 0.0], [0.0, 0.0], [sigma], [0.0], 0.7)
            assert value == pytest.approx(expected, rel=1e-10)

    def test_symmetry(self) -> None:
        """Test that swapping the two points leaves the kernel unchanged."""
        kernel = GrushinKernel(1, 1)
        g = GroupPoint([0.4], [0.3])
        gp = GroupPoint([-0.7], [-0.2])
        assert kernel.evaluate(g, gp, 0.9).value == pytest.approx(
            kernel.evaluate(gp, g, 0.9).value, rel=1e-10
        )

    def test_translation_in_sigma(self) -> None:
        """Test invariance under σ-translations."""
        kernel = GrushinKernel(2, 1)
        g = GroupPoint([0.4, 0.1], [0.3])
        gp = GroupPoint([-0.2, 0.5], [-0.2])
        moved = kernel.evaluate(
            GroupPoint(g.z, g.sigma + 1.0), GroupPoint(gp.z, gp.sigma + 1.0), 1.0
        )
        assert moved.value == pytest.approx(kernel.evaluate(g, gp, 1.0).value, rel=1e-10)

    def test_positive_off_axis(self) -> None:
        """Test positivity for a pole away from w = 0."""
        assert bg_heat(1, 2, [0.5], [1.0], [0.1, -0.3], [0.0, 0.2], 0.5) > 0.0

    def test_green_on_sigma_axis(self) -> None:
        """Test the Green function at ((0, 0), 1) against the Heisenberg value 1/(8π)."""
        value = bg_green((np.zeros(2), [1.0]), (np.zeros(2), [0.0]))
        assert value == pytest.approx(1.0 / (8.0 * math.pi), rel=1e-4)

    def test_green_pole(self) -> None:
        """Test that the pole raises PoleError."""
        with pytest.raises(PoleError):
            bg_green(([0.5], [0.1]), ([0.5], [0.1]))

    def test_invalid_dimensions(self) -> None:
        """Test dimension checks."""
        with pytest.raises(ValueError, match="Dimension n"):
            GrushinKernel(0, 1)
        with pytest.raises(ValueError, match="Dimension k"):
            GrushinKernel(1, 0)
        kernel = GrushinKernel(2, 1)
        with pytest.raises(ValueError, match="does not match"):
            kernel.evaluate(GroupPoint([0.0], [0.0]), GroupPoint([0.0, 0.0], [0.0]), 1.0)

    def test_scale(self) -> None:
        """Test the squared size used to place the time integral."""
        kernel = GrushinKernel(1, 1)
        assert kernel.scale(GroupPoint([1.0], [0.0]), GroupPoint([0.0], [0.0])) == 1.0
        assert kernel.scale(GroupPoint([0.0], [4.0]), GroupPoint([0.0], [0.0])) == 4.0
