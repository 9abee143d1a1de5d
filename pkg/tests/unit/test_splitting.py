"""
Tests for hyperbolicity checks, the resolvent sweep, the stable/unstable
splitting and rate-bound certification.
"""

import math

import numpy as np
import pytest

from src.dynamics.splitting import (
    certify_rate_bound,
    check_hyperbolic,
    check_spectral_condition,
    compute_splitting,
    resolvent_bound,
    splitting_residuals,
)
from src.dynamics.systems import make_heat, make_matrix, make_rotation, make_transport, make_trivial
from src.exceptions import (
    BoundNotCertifiedError,
    DimensionMismatchError,
    InvalidParameterError,
    NotHyperbolicError,
    NotInvertibleError,
    SingularResolventError,
)
from src.models.bounds import BoundDirection, RateBound

ALGEBRA_TOL = 1e-8
SADDLE_GAP = 1.0 - math.exp(-1.0)


@pytest.mark.unit
class TestCheckHyperbolic:
    """Test the distance of σ(T(1)) to the unit circle."""

    def test_saddle_gap(self, saddle):
        """Test diag(-1, 2) has gap 1 - e^{-1}."""
        report = check_hyperbolic(saddle)
        assert report.hyperbolic
        assert report.gap == pytest.approx(SADDLE_GAP, abs=1e-5)
        assert report.source == "generator"

    def test_rotation_not_hyperbolic(self):
        """Test the rotation has spectrum on the circle."""
        report = check_hyperbolic(make_rotation(1.0))
        assert not report.hyperbolic
        assert report.gap < 1e-12

    def test_trivial_not_hyperbolic(self):
        """Test T(t) = I has gap zero."""
        assert check_hyperbolic(make_trivial(2)).gap == 0.0

    def test_lattice_model_uses_one_step_map(self):
        """Test the damped transport is hyperbolic through T(h)."""
        report = check_hyperbolic(make_transport(1.0, 8, 0.25))
        assert report.source == "one_step_map"
        assert report.hyperbolic
        assert report.gap == pytest.approx(SADDLE_GAP, rel=1e-9)


@pytest.mark.unit
class TestSpectralCondition:
    """Test the imaginary-axis test and the resolvent sweep."""

    def test_saddle_resolvent(self):
        """Test sup ‖(iω - A)^{-1}‖ = 1 at ω = 0 for diag(-1, 2)."""
        report = check_spectral_condition(np.diag([-1.0, 2.0]), 100.0, 201)
        assert report.no_imaginary_spectrum
        assert report.resolvent_sup == pytest.approx(1.0, rel=1e-12)
        assert report.argmax_omega == 0.0
        assert report.min_abs_real_part == pytest.approx(1.0)

    def test_imaginary_eigenvalue(self):
        """Test σ(A) ∩ iR ≠ ∅ gives an infinite sup."""
        report = check_spectral_condition(np.array([[0.0, -1.0], [1.0, 0.0]]), 100.0, 201)
        assert not report.no_imaginary_spectrum
        assert math.isinf(report.resolvent_sup)

    def test_singular_sample(self):
        """Test a sampled iω numerically in σ(A) is reported."""
        with pytest.raises(SingularResolventError):
            check_spectral_condition(np.array([[-2e-10 + 100j]]), 100.0, 201)

    def test_invalid_sweep(self):
        """Test too few samples or a non-positive range are rejected."""
        with pytest.raises(InvalidParameterError):
            check_spectral_condition(np.eye(2), 100.0, 2)
        with pytest.raises(InvalidParameterError):
            check_spectral_condition(np.eye(2), 0.0, 11)

    def test_resolvent_bound(self):
        """Test the pointwise resolvent norm."""
        assert resolvent_bound(np.diag([-1.0, 2.0]), 0.0) == pytest.approx(1.0)
        assert math.isinf(resolvent_bound(np.zeros((1, 1)), 0.0))

    def test_scaling_does_not_shrink_gap(self, random_hyperbolic_models):
        """Test min |Re σ| of 2A is at least that of A."""
        for T in random_hyperbolic_models[:5]:
            A = T.generator
            base = check_spectral_condition(A, 100.0, 21).min_abs_real_part
            scaled = check_spectral_condition(2.0 * A, 100.0, 21).min_abs_real_part
            assert scaled >= base * (1 - 1e-9)


@pytest.mark.unit
class TestComputeSplitting:
    """Test the stable/unstable splitting and its constants."""

    def test_saddle_projections(self, saddle):
        """Test P_M, P_N are the coordinate projections with K = 1."""
        split = compute_splitting(saddle, margin=0.9)
        assert np.allclose(split.P_M, np.diag([1.0, 0.0]), atol=1e-12)
        assert np.allclose(split.P_N, np.diag([0.0, 1.0]), atol=1e-12)
        assert split.lam_M == pytest.approx(0.9)
        assert split.lam_N == pytest.approx(1.8)
        assert split.K_M == pytest.approx(1.0, abs=1e-12)
        assert split.K_N == pytest.approx(1.0, abs=1e-12)
        assert split.stable_dim == 1
        assert split.unstable_dim == 1

    def test_defective_stable_block(self):
        """Test the Jordan block has K_M = 1 in the 2-norm at margin 0.5."""
        T = make_matrix(np.array([[-1.0, 1.0], [0.0, -1.0]]))
        split = compute_splitting(T, margin=0.5)
        assert split.stable_dim == 2
        assert split.unstable_dim == 0
        assert split.lam_M == pytest.approx(0.5)
        assert split.K_M == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(split.P_M, np.eye(2), atol=1e-12)
        assert any("placeholder" in note for note in split.notes)

    def test_defective_bound_holds(self):
        """Test ‖e^{tA}‖ ≤ K_M e^{-λ_M t} on a fine grid."""
        A = np.array([[-1.0, 1.0], [0.0, -1.0]])
        split = compute_splitting(make_matrix(A), margin=0.5)
        for t in np.linspace(0.0, 20.0, 401):
            # ‖e^{tA}‖₂ = e^{-t}(t/2 + sqrt(1 + t²/4))
            exact = math.exp(-t) * (t / 2 + math.sqrt(1 + t * t / 4))
            assert exact <= split.stable_bound().value(t) * (1 + 1e-9)

    def test_rotation_not_hyperbolic(self):
        """Test splitting a rotation fails."""
        with pytest.raises(NotHyperbolicError):
            compute_splitting(make_rotation(1.0))

    def test_lattice_model_rejected(self):
        """Test models without a generator have no computed split."""
        with pytest.raises(InvalidParameterError):
            compute_splitting(make_transport(1.0, 8, 0.25))

    def test_margin_out_of_range(self, saddle):
        """Test the margin must lie in (0, 1)."""
        with pytest.raises(InvalidParameterError):
            compute_splitting(saddle, margin=1.5)

    def test_random_projection_algebra(self, random_hyperbolic_models):
        """Test projection identities and decay ratios on random generators."""
        for T in random_hyperbolic_models[:10]:
            split = compute_splitting(T)
            residuals = splitting_residuals(split, T)
            for key in ("idempotent_M", "idempotent_N", "complementary", "annihilating", "commutation"):
                assert residuals[key] <= ALGEBRA_TOL, (T.name, key, residuals[key])
            assert residuals["decay_ratio_M"] <= 1.0 + 1e-9
            assert residuals["decay_ratio_N"] <= 1.0 + 1e-9

    def test_residuals_dimension_mismatch(self, saddle):
        """Test a split is only checked against a model of its dimension."""
        split = compute_splitting(saddle)
        with pytest.raises(DimensionMismatchError):
            splitting_residuals(split, make_heat(3))


@pytest.mark.unit
class TestCertifyRateBound:
    """Test sampled certification of K e^{-λt} bounds."""

    def test_exact_bound(self, scalar_decay, unit_forward_bound):
        """Test ‖e^{-t}‖ ≤ e^{-t} is certified with ratio 1."""
        assert certify_rate_bound(scalar_decay, unit_forward_bound) == pytest.approx(1.0, rel=1e-12)

    def test_inverse_bound(self, scalar_growth, unit_inverse_bound):
        """Test the inverse direction."""
        assert certify_rate_bound(scalar_growth, unit_inverse_bound) <= 1.0 + 1e-9

    def test_violated_bound(self, scalar_decay):
        """Test a rate faster than the semigroup is caught."""
        bound = RateBound(K=1.0, rate=2.0, direction=BoundDirection.FORWARD_CONTRACTION)
        with pytest.raises(BoundNotCertifiedError):
            certify_rate_bound(scalar_decay, bound)

    def test_lattice_bound(self):
        """Test transport bounds are sampled on the time grid."""
        T = make_transport(1.0, 8, 0.25)
        assert certify_rate_bound(T, T.known_bound) == pytest.approx(1.0, rel=1e-12)

    def test_inverse_needs_invertible(self, forward_only, unit_inverse_bound):
        """Test inverse bounds need an inverse action."""
        with pytest.raises(NotInvertibleError):
            certify_rate_bound(forward_only, unit_inverse_bound)
