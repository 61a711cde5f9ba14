"""Unit tests for group specs, the group law and the horizontal operator."""

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from step2heat.errors import SpecParseError, SpecValidationError
from step2heat.group.builtins import builtin_group, free_step_two, heisenberg, quaternionic
from step2heat.group.law import bracket_term, dilate, horizontal_step, inverse, multiply
from step2heat.group.operator import HorizontalOperator
from step2heat.group.spec import (
    anticommutation_defect,
    check_point,
    dump_group_spec,
    is_heisenberg_type,
    j_of,
    load_group_spec,
    parse_group_spec,
)
from step2heat.models import GroupPoint, GroupSpec

coordinate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
GROUPS = {"heisenberg2": heisenberg(2), "quaternionic": quaternionic(), "free3": free_step_two(3)}


def _points(spec: GroupSpec) -> st.SearchStrategy[GroupPoint]:
    """Hypothesis strategy for points of ``spec``."""
    return st.builds(
        GroupPoint,
        st.lists(coordinate, min_size=spec.m, max_size=spec.m),
        st.lists(coordinate, min_size=spec.k, max_size=spec.k),
    )


class TestParseGroupSpec:
    """Tests for JSON group specs."""

    def test_valid_document(self) -> None:
        """Test parsing the first Heisenberg group."""
        spec = parse_group_spec('{"name": "h1", "m": 2, "k": 1, "J": [[[0, 1], [-1, 0]]]}')
        assert spec.name == "h1"
        assert (spec.m, spec.k) == (2, 1)
        assert spec.tolerance == 0.0
        np.testing.assert_array_equal(spec.J[0], [[0.0, 1.0], [-1.0, 0.0]])

    def test_rational_entries(self) -> None:
        """Test that rational strings are exact and floats are not."""
        exact = parse_group_spec('{"m": 2, "k": 1, "J": [[["0", "1/2"], ["-1/2", 0]]]}')
        assert exact.tolerance == 0.0
        assert exact.J[0, 0, 1] == 0.5
        assert exact.name == "unnamed"

        inexact = parse_group_spec('{"m": 2, "k": 1, "J": [[[0.0, 0.5], [-0.5, 0.0]]]}')
        assert inexact.tolerance > 0.0

    @pytest.mark.parametrize(
        "document",
        [
            "{not json",
            "[1, 2]",
            '{"m": 2, "J": [[[0, 1], [-1, 0]]]}',
            '{"m": "2", "k": 1, "J": [[[0, 1], [-1, 0]]]}',
            '{"m": 2, "k": 1, "J": [[[0, "x"], [-1, 0]]]}',
            '{"m": 2, "k": 1, "J": [[[0, true], [-1, 0]]]}',
        ],
    )
    def test_malformed(self, document: str) -> None:
        """Test that malformed documents raise SpecParseError."""
        with pytest.raises(SpecParseError):
            parse_group_spec(document)

    def test_skew_violation_is_reported(self) -> None:
        """Test that the violated invariant is named."""
        with pytest.raises(SpecValidationError) as info:
            parse_group_spec('{"m": 2, "k": 1, "J": [[[0, 1], [1, 0]]]}')
        assert info.value.invariant == "skew-symmetry"

    def test_matrix_count_mismatch(self) -> None:
        """Test that k must match the number of matrices."""
        with pytest.raises(SpecValidationError) as info:
            parse_group_spec('{"m": 2, "k": 2, "J": [[[0, 1], [-1, 0]]]}')
        assert info.value.invariant == "dimension"

    def test_dump_round_trip(self) -> None:
        """Test that a dumped spec parses back to the same matrices."""
        spec = quaternionic()
        document = dump_group_spec(spec)
        assert json.loads(document)["k"] == 3
        np.testing.assert_array_equal(parse_group_spec(document).J, spec.J)

    def test_spec_files_match_builtins(self, specs_dir: Path) -> None:
        """Test that the shipped spec files describe the built-in groups."""
        for name in ("heisenberg1", "heisenberg2", "quaternionic", "free3"):
            from_file = load_group_spec(specs_dir / f"{name}.json")
            np.testing.assert_array_equal(from_file.J, builtin_group(name).J)

    def test_load_builtin_reference(self) -> None:
        """Test the builtin: prefix."""
        assert load_group_spec("builtin:heisenberg3").m == 6
        with pytest.raises(SpecParseError, match="unknown builtin"):
            load_group_spec("builtin:octonionic")
        with pytest.raises(SpecParseError):
            load_group_spec("builtin:heisenberg0")

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that unreadable files raise SpecParseError."""
        with pytest.raises(SpecParseError, match="cannot read"):
            load_group_spec(tmp_path / "missing.json")


class TestHeisenbergType:
    """Tests for the Heisenberg-type check."""

    def test_builtins(self) -> None:
        """Test which built-in groups are of Heisenberg type."""
        assert is_heisenberg_type(heisenberg(1))
        assert is_heisenberg_type(heisenberg(3))
        assert is_heisenberg_type(quaternionic())
        assert not is_heisenberg_type(free_step_two(3))

    def test_scaled_group_is_not_h_type(self) -> None:
        """Test that J(λ)² = -|λ|² fails after rescaling."""
        spec = GroupSpec(name="scaled", m=2, k=1, J=2.0 * heisenberg(1).J)
        assert anticommutation_defect(spec) == pytest.approx(6.0)
        assert not is_heisenberg_type(spec)

    def test_j_of_square(self) -> None:
        """Test J(λ)² = -|λ|² I on the quaternionic group."""
        lam = np.array([0.3, -1.2, 0.7])
        matrix = j_of(quaternionic(), lam)
        np.testing.assert_allclose(matrix @ matrix, -np.dot(lam, lam) * np.eye(4), atol=1e-14)

    def test_j_of_batched(self) -> None:
        """Test leading batch dimensions."""
        lam = np.ones((5, 7, 3))
        assert j_of(free_step_two(3), lam).shape == (5, 7, 3, 3)

    def test_j_of_wrong_size(self) -> None:
        """Test that λ must have k components."""
        with pytest.raises(ValueError, match="components"):
            j_of(quaternionic(), [1.0, 0.0])


class TestGroupLaw:
    """Tests for the group law in logarithmic coordinates."""

    def test_heisenberg_product(self, heisenberg1: GroupSpec) -> None:
        """Test a product by hand: σ picks up ½(z_2ζ_1 - z_1ζ_2)."""
        g = GroupPoint([1.0, 0.0], [0.0])
        h = GroupPoint([0.0, 1.0], [0.0])
        product = multiply(heisenberg1, g, h)
        np.testing.assert_allclose(product.z, [1.0, 1.0])
        np.testing.assert_allclose(product.sigma, [-0.5])
        np.testing.assert_allclose(multiply(heisenberg1, h, g).sigma, [0.5])

    @pytest.mark.parametrize("name", sorted(GROUPS))
    def test_associative(self, name: str) -> None:
        """Test associativity on each group."""
        spec = GROUPS[name]

        @settings(max_examples=30, deadline=None)
        @given(_points(spec), _points(spec), _points(spec))
        def check(a: GroupPoint, b: GroupPoint, c: GroupPoint) -> None:
            left = multiply(spec, multiply(spec, a, b), c)
            right = multiply(spec, a, multiply(spec, b, c))
            assert left.allclose(right, atol=1e-9)

        check()

    @pytest.mark.parametrize("name", sorted(GROUPS))
    def test_identity_and_inverse(self, name: str) -> None:
        """Test g∘e = g and g∘g⁻¹ = e."""
        spec = GROUPS[name]
        e = GroupPoint.identity(spec.m, spec.k)

        @settings(max_examples=30, deadline=None)
        @given(_points(spec))
        def check(g: GroupPoint) -> None:
            assert multiply(spec, g, e).allclose(g)
            assert multiply(spec, e, g).allclose(g)
            assert multiply(spec, g, inverse(spec, g)).allclose(e, atol=1e-12)

        check()

    @given(st.floats(min_value=0.1, max_value=5.0), _points(heisenberg(2)), _points(heisenberg(2)))
    @settings(max_examples=30, deadline=None)
    def test_dilation_is_automorphism(self, r: float, g: GroupPoint, h: GroupPoint) -> None:
        """Test δ_r(g∘h) = δ_r(g)∘δ_r(h)."""
        spec = heisenberg(2)
        left = dilate(spec, r, multiply(spec, g, h))
        right = multiply(spec, dilate(spec, r, g), dilate(spec, r, h))
        assert left.allclose(right, atol=1e-9)

    def test_dilation_factor(self, heisenberg1: GroupSpec) -> None:
        """Test the anisotropic scaling and the positivity check."""
        g = dilate(heisenberg1, 2.0, GroupPoint([1.0, -1.0], [0.5]))
        np.testing.assert_allclose(g.z, [2.0, -2.0])
        np.testing.assert_allclose(g.sigma, [2.0])
        with pytest.raises(ValueError, match="positive"):
            dilate(heisenberg1, 0.0, g)

    def test_wrong_dimensions(self, heisenberg1: GroupSpec) -> None:
        """Test that points of another group are rejected."""
        with pytest.raises(ValueError, match="does not belong"):
            check_point(heisenberg1, GroupPoint([0.0, 0.0, 0.0], [0.0]))
        with pytest.raises(ValueError):
            multiply(heisenberg1, GroupPoint([0.0, 0.0], [0.0, 1.0]), GroupPoint([0, 0], [0]))

    def test_horizontal_step(self, heisenberg1: GroupSpec) -> None:
        """Test the flow of X_1 from (0, 1)."""
        start = GroupPoint([0.0, 1.0], [0.0])
        moved = horizontal_step(heisenberg1, start, 0, 0.2)
        np.testing.assert_allclose(moved.z, [0.2, 1.0])
        np.testing.assert_allclose(moved.sigma, [0.1])

    def test_bracket_term(self, free3: GroupSpec) -> None:
        """Test the components <J(ε_ℓ)z, ζ> on the free group."""
        z = np.array([1.0, 2.0, 3.0])
        zeta = np.array([0.5, -1.0, 2.0])
        expected = [
            z[0] * zeta[1] - z[1] * zeta[0],
            z[0] * zeta[2] - z[2] * zeta[0],
            z[1] * zeta[2] - z[2] * zeta[1],
        ]
        np.testing.assert_allclose(bracket_term(free3, zeta, z), expected)


class TestHorizontalOperator:
    """Tests for the coefficients of the horizontal Laplacian."""

    def test_quadratic_on_heisenberg(self, heisenberg1: GroupSpec) -> None:
        """Test 𝓛(z_1σ_1) = z_2 on the first Heisenberg group."""
        operator = HorizontalOperator(heisenberg1)
        hessian = np.zeros((3, 3))
        hessian[0, 2] = hessian[2, 0] = 1.0
        z = np.array([0.7, -1.3])
        assert operator.apply_quadratic(hessian, z) == pytest.approx(z[1])

    def test_euclidean_quadratic(self, quaternionic_group: GroupSpec) -> None:
        """Test 𝓛|z|² = 2m."""
        operator = HorizontalOperator(quaternionic_group)
        hessian = np.zeros((7, 7))
        hessian[:4, :4] = 2.0 * np.eye(4)
        assert operator.apply_quadratic(hessian, np.ones(4)) == pytest.approx(8.0)

    def test_sigma_block_h_type(self, quaternionic_group: GroupSpec) -> None:
        """Test that the σσ block is ¼|z|² I on an H-type group."""
        operator = HorizontalOperator(quaternionic_group)
        z = np.array([0.3, -0.2, 1.1, 0.4])
        np.testing.assert_allclose(
            operator.sigma_block(z), 0.25 * np.dot(z, z) * np.eye(3), atol=1e-14
        )

    def test_symbol_is_psd(self, free3: GroupSpec, rng: np.random.Generator) -> None:
        """Test that the symbol is symmetric positive semidefinite with rank m."""
        operator = HorizontalOperator(free3)
        symbol = operator.symbol(rng.normal(size=3))
        np.testing.assert_allclose(symbol, symbol.T)
        eigenvalues = np.linalg.eigvalsh(symbol)
        assert eigenvalues[0] > -1e-12
        assert int(np.sum(eigenvalues > 1e-10)) == 3
