"""
Tests for the Semigroup abstraction and the matrix exponential semigroup.
"""

import math

import numpy as np
import pytest

from src.dynamics.semigroup import (
    MatrixSemigroup,
    inverse_operator_norm_estimate,
    operator_norm_estimate,
    semigroup_apply,
)
from src.dynamics.systems import make_transport
from src.dynamics.vectors import random_unit_vectors
from src.exceptions import (
    DimensionMismatchError,
    EigFailureError,
    NegativeTimeError,
    NotInvertibleError,
    OffGridError,
)

ALGEBRA_TOL = 1e-8


@pytest.mark.unit
class TestMatrixSemigroupConstruction:
    """Test generator validation and the decomposition choice."""

    def test_non_square_generator(self):
        """Test a rectangular generator is rejected."""
        with pytest.raises(DimensionMismatchError):
            MatrixSemigroup(np.ones((2, 3)))

    def test_non_finite_generator(self):
        """Test NaN entries surface as an eigen failure."""
        with pytest.raises(EigFailureError):
            MatrixSemigroup(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_hermitian_uses_eigh(self):
        """Test Hermitian generators take the eigh path."""
        assert MatrixSemigroup(np.diag([-1.0, 2.0])).method == "eigh"

    def test_defective_uses_schur(self):
        """Test a Jordan block falls back to the Schur form."""
        T = MatrixSemigroup(np.array([[-1.0, 1.0], [0.0, -1.0]]))
        assert T.method == "schur"

    def test_defective_exponential(self):
        """Test e^{tA}e_2 = (t e^{-t}, e^{-t}) for the Jordan block."""
        T = MatrixSemigroup(np.array([[-1.0, 1.0], [0.0, -1.0]]))
        t = 1.7
        expected = np.array([t * math.exp(-t), math.exp(-t)])
        assert np.allclose(T.apply(t, [0.0, 1.0]), expected, atol=1e-13)


@pytest.mark.unit
class TestSemigroupLaws:
    """Test identity, semigroup law, linearity and inversion."""

    def test_identity_at_zero(self, saddle, rng):
        """Test T(0)x = x."""
        x = random_unit_vectors(rng, 1, 2)[0]
        assert np.array_equal(saddle.apply(0.0, x), x)

    def test_semigroup_law(self, random_hyperbolic_models, rng):
        """Test T(s + t)x = T(s)T(t)x on random generators."""
        for T in random_hyperbolic_models[:10]:
            x = random_unit_vectors(rng, 1, T.dim)[0]
            s, t = 0.7, 1.3
            lhs = T.apply(s + t, x)
            rhs = T.apply(s, T.apply(t, x))
            assert np.linalg.norm(lhs - rhs) <= ALGEBRA_TOL * max(1.0, np.linalg.norm(lhs))

    def test_linearity(self, random_hyperbolic_models, rng):
        """Test T(t)(ax + by) = aT(t)x + bT(t)y."""
        T = random_hyperbolic_models[0]
        x, y = random_unit_vectors(rng, 2, T.dim)
        a, b = 2.0 - 1.0j, 0.5j
        lhs = T.apply(1.5, a * x + b * y)
        rhs = a * T.apply(1.5, x) + b * T.apply(1.5, y)
        assert np.linalg.norm(lhs - rhs) <= ALGEBRA_TOL * max(1.0, np.linalg.norm(lhs))

    def test_inverse_round_trip(self, random_hyperbolic_models, rng):
        """Test T(t)^{-1}T(t)x = x."""
        T = random_hyperbolic_models[1]
        x = random_unit_vectors(rng, 1, T.dim)[0]
        assert np.allclose(T.apply_inverse(2.0, T.apply(2.0, x)), x, atol=1e-10)

    def test_apply_many_matches_apply(self, random_hyperbolic_models, rng):
        """Test the batched path agrees row by row."""
        T = random_hyperbolic_models[2]
        x = random_unit_vectors(rng, 1, T.dim)[0]
        times = [0.0, 0.25, 1.0, 3.0]
        rows = T.apply_many(times, x)
        for t, row in zip(times, rows):
            assert np.allclose(row, T.apply(t, x), atol=1e-12)

    def test_matrix_matches_apply(self, saddle):
        """Test the explicit matrix of T(t)."""
        assert np.allclose(saddle.matrix(1.0), np.diag([math.exp(-1.0), math.exp(2.0)]))

    def test_semigroup_apply_helper(self, scalar_decay):
        """Test the free-function form."""
        assert semigroup_apply(scalar_decay, 1.0, [1.0])[0] == pytest.approx(math.exp(-1.0))


@pytest.mark.unit
class TestTimeValidation:
    """Test negative times and the time grid."""

    def test_negative_time(self, scalar_decay):
        """Test t < 0 is rejected."""
        with pytest.raises(NegativeTimeError):
            scalar_decay.apply(-1.0, [1.0])

    def test_negative_rounding_is_zero(self, scalar_decay):
        """Test t = -1e-12 is treated as 0."""
        assert scalar_decay.apply(-1e-12, [2.0])[0] == 2.0

    def test_off_grid_time(self):
        """Test lattice models refuse times off hZ."""
        T = make_transport(1.0, 8, 0.25)
        assert T.is_on_grid(0.5)
        assert not T.is_on_grid(0.3)
        with pytest.raises(OffGridError):
            T.apply(0.3, np.ones(8))

    def test_snap_up(self):
        """Test snapping to the next lattice time."""
        T = make_transport(1.0, 8, 0.25)
        assert T.snap_up(0.3) == pytest.approx(0.5)
        assert T.snap_up(0.5) == pytest.approx(0.5)
        assert T.snap_up(0.5 + 1e-12) == pytest.approx(0.5)

    def test_snap_up_without_grid(self, scalar_decay):
        """Test continuous-time models keep t."""
        assert scalar_decay.snap_up(0.3) == 0.3


@pytest.mark.unit
class TestNormEstimates:
    """Test operator norm estimates from explicit matrices."""

    def test_forward_norm(self, saddle):
        """Test ‖T(1)‖ = e² for diag(-1, 2)."""
        assert operator_norm_estimate(saddle, 1.0) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_inverse_norm(self, saddle):
        """Test ‖T(1)^{-1}‖ = e for diag(-1, 2)."""
        assert inverse_operator_norm_estimate(saddle, 1.0) == pytest.approx(math.e, rel=1e-12)

    def test_inverse_needs_invertible(self, forward_only):
        """Test a forward-only semigroup has no inverse matrix."""
        with pytest.raises(NotInvertibleError):
            inverse_operator_norm_estimate(forward_only, 1.0)
