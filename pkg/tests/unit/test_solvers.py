"""
Tests for the constructive shadowing solvers and the contraction iteration.
"""

import math

import numpy as np
import pytest

from src.dynamics.splitting import compute_splitting
from src.dynamics.systems import make_heat, make_matrix, make_rotation
from src.dynamics.vectors import coupled_norm
from src.exceptions import (
    BoundNotCertifiedError,
    DimensionMismatchError,
    InvalidParameterError,
    InvalidPseudoOrbitError,
    NotHyperbolicError,
    NotInvertibleError,
)
from src.models.bounds import BoundDirection, RateBound
from src.models.certificate import ShadowMethod
from src.models.orbit import JumpKind, JumpRule, PseudoOrbit
from src.shadowing.bounds import delta_for_epsilon_stable, delta_for_epsilon_unstable
from src.shadowing.pseudo_orbit import from_perturbed_orbit
from src.shadowing.solvers import (
    contraction_iterate,
    series_truncation,
    shadow_hyperbolic,
    shadow_stable,
    shadow_unstable,
)
from src.shadowing.verifier import verify_shadowing

EPSILON = 0.1


def scalar_orbit(T, delta, n, kind=JumpKind.CONSTANT, seed=0, fixed=False):
    rule = JumpRule(kind=kind, delta=delta, direction=[1.0] if fixed else None)
    return from_perturbed_orbit(T, [0.5], n, 1.0, rule, seed=seed, R=1.0)


@pytest.mark.unit
class TestShadowStable:
    """Test the stable solver on T(t) = e^{-t}."""

    def test_random_seeds_within_epsilon(self, scalar_decay, unit_forward_bound):
        """Test sup error ≤ ε for constant jumps of size δ(ε) on ten seeds."""
        delta = delta_for_epsilon_stable(unit_forward_bound, EPSILON).delta
        for seed in range(10):
            p = scalar_orbit(scalar_decay, delta, 100, seed=seed)
            certificate = shadow_stable(p, scalar_decay, unit_forward_bound, EPSILON)
            assert certificate.pass_eps
            assert certificate.sup_error <= EPSILON * (1 + 1e-12)
            assert np.array_equal(certificate.shadow_point, p.x0)

    def test_worst_case_reaches_epsilon(self, scalar_decay, unit_forward_bound):
        """Test aligned jumps push the error to the closed-form worst case ε."""
        delta = delta_for_epsilon_stable(unit_forward_bound, EPSILON).delta
        p = scalar_orbit(scalar_decay, delta, 100, fixed=True)
        certificate = shadow_stable(p, scalar_decay, unit_forward_bound, EPSILON)
        assert certificate.error_bound == pytest.approx(EPSILON, rel=1e-9)
        assert certificate.sup_error == pytest.approx(EPSILON, rel=1e-9)
        assert certificate.method == ShadowMethod.STABLE

    def test_decaying_jumps_limit_shadow(self, scalar_decay, unit_forward_bound):
        """Test decaying jumps drive the tail error below the limit bound."""
        delta = delta_for_epsilon_stable(unit_forward_bound, EPSILON).delta
        p = scalar_orbit(scalar_decay, delta, 40, kind=JumpKind.DECAYING)
        certificate = shadow_stable(p, scalar_decay, unit_forward_bound, EPSILON)
        assert certificate.pass_eps
        assert certificate.pass_limit
        assert certificate.limit_bound is not None
        assert certificate.tail_sup <= certificate.limit_bound

    def test_heat_known_bound(self):
        """Test the heat model with its analytic bound."""
        T = make_heat(16)
        choice = delta_for_epsilon_stable(T.known_bound, 1e-2)
        rule = JumpRule(kind=JumpKind.DECAYING, delta=choice.delta)
        p = from_perturbed_orbit(T, np.ones(16) / 4, 32, choice.R, rule, seed=5)
        certificate = shadow_stable(p, T, T.known_bound, 1e-2)
        assert certificate.pass_eps and certificate.pass_limit

    def test_jumps_too_large(self, scalar_decay, unit_forward_bound):
        """Test δ above δ(ε) gives an error bound above ε."""
        p = scalar_orbit(scalar_decay, 0.2, 10)
        with pytest.raises(InvalidPseudoOrbitError):
            shadow_stable(p, scalar_decay, unit_forward_bound, EPSILON)

    def test_invalid_orbit(self, scalar_decay, unit_forward_bound):
        """Test a jump above the declared δ is refused."""
        p = PseudoOrbit(points=[[1.0], [1.0]], durations=[1.0], delta=0.01, R=1.0)
        with pytest.raises(InvalidPseudoOrbitError):
            shadow_stable(p, scalar_decay, unit_forward_bound, EPSILON)

    def test_uncertified_bound(self, scalar_decay):
        """Test a bound the semigroup violates is caught."""
        bound = RateBound(K=1.0, rate=2.0, direction=BoundDirection.FORWARD_CONTRACTION)
        p = scalar_orbit(scalar_decay, 0.01, 5)
        with pytest.raises(BoundNotCertifiedError):
            shadow_stable(p, scalar_decay, bound, EPSILON)

    def test_no_contraction(self, scalar_decay):
        """Test K e^{-λR} ≥ 1 is refused."""
        bound = RateBound(K=3.0, rate=0.1, direction=BoundDirection.FORWARD_CONTRACTION)
        p = scalar_orbit(scalar_decay, 0.001, 5)
        with pytest.raises(InvalidPseudoOrbitError):
            shadow_stable(p, scalar_decay, bound, EPSILON)

    def test_wrong_direction(self, scalar_decay, unit_inverse_bound):
        """Test an inverse bound is refused."""
        p = scalar_orbit(scalar_decay, 0.01, 5)
        with pytest.raises(InvalidParameterError):
            shadow_stable(p, scalar_decay, unit_inverse_bound, EPSILON)


@pytest.mark.unit
class TestContractionIterate:
    """Test the shift map Γ on finite sequences."""

    def test_reaches_true_orbit(self, scalar_decay, unit_forward_bound):
        """Test n + 1 iterations land on (T(t̂_i)x₀)."""
        delta = delta_for_epsilon_stable(unit_forward_bound, EPSILON).delta
        p = scalar_orbit(scalar_decay, delta, 10, fixed=True)
        trace = contraction_iterate(p, scalar_decay, unit_forward_bound, EPSILON, m=11)
        assert trace.converged
        assert trace.fixed_point_residual <= 1e-12
        assert trace.contraction_factor == pytest.approx(math.exp(-1.0))
        assert trace.stays_in_ball
        assert np.all(trace.ratios <= trace.contraction_factor * (1 + 1e-6))
        expected = 0.5 * np.exp(-np.arange(11))
        assert np.allclose(trace.limit_sequence[:, 0], expected)

    def test_needs_one_iteration(self, scalar_decay, unit_forward_bound):
        """Test m < 1 is rejected."""
        p = scalar_orbit(scalar_decay, 0.01, 3)
        with pytest.raises(InvalidParameterError):
            contraction_iterate(p, scalar_decay, unit_forward_bound, EPSILON, m=0)


@pytest.mark.unit
class TestShadowUnstable:
    """Test the inverse-series solver on T(t) = e^{t}."""

    def test_per_index_error(self, scalar_growth, unit_inverse_bound):
        """Test the error at t̂_i is δ/(e - 1) away from the end of the orbit."""
        delta = delta_for_epsilon_unstable(unit_inverse_bound, EPSILON)
        p = scalar_orbit(scalar_growth, delta, 100, fixed=True)
        certificate = shadow_unstable(p, scalar_growth, unit_inverse_bound, EPSILON)
        expected = delta / (math.e - 1.0)
        for i in range(0, 50, 7):
            at_start = certificate.errors[np.isclose(certificate.sample_times, float(i), rtol=0, atol=1e-12)]
            assert at_start.size == 1
            assert at_start[0] == pytest.approx(expected, rel=1e-9)
        assert certificate.pass_eps

    def test_series_truncation(self, scalar_growth, unit_inverse_bound):
        """Test the series stops once the remainder falls below the tail tolerance."""
        delta = delta_for_epsilon_unstable(unit_inverse_bound, EPSILON)
        p = scalar_orbit(scalar_growth, delta, 100, fixed=True)
        certificate = shadow_unstable(p, scalar_growth, unit_inverse_bound, EPSILON)
        assert certificate.tail_cut == 24
        assert certificate.series_terms == 100
        assert certificate.truncation_bound < 1e-12
        assert certificate.notes

    def test_shadow_point_verifies(self, scalar_growth, unit_inverse_bound):
        """Test forward verification of the series point reproduces the certificate."""
        delta = delta_for_epsilon_unstable(unit_inverse_bound, EPSILON)
        p = scalar_orbit(scalar_growth, delta, 5, seed=3)
        certificate = shadow_unstable(p, scalar_growth, unit_inverse_bound, EPSILON)
        verified = verify_shadowing(certificate.shadow_point, p, scalar_growth, EPSILON)
        assert verified.sup_error == pytest.approx(certificate.sup_error, abs=1e-12)
        assert verified.pass_eps

    def test_long_orbit_point_verifies(self, scalar_growth, unit_inverse_bound):
        """Test the returned point keeps its certificate past the analytic cut."""
        delta = delta_for_epsilon_unstable(unit_inverse_bound, EPSILON)
        rule = JumpRule(kind=JumpKind.CONSTANT, delta=delta)
        p = from_perturbed_orbit(scalar_growth, [0.0], 30, 1.0, rule, seed=3, R=1.0)
        certificate = shadow_unstable(p, scalar_growth, unit_inverse_bound, EPSILON)
        assert certificate.tail_cut < p.n_legs
        assert certificate.series_terms == p.n_legs
        verified = verify_shadowing(certificate.shadow_point, p, scalar_growth, EPSILON)
        assert verified.sup_error == pytest.approx(certificate.sup_error, abs=1e-3)
        assert verified.pass_eps

    def test_decaying_jumps(self, scalar_growth, unit_inverse_bound):
        """Test decaying jumps pass the limit check."""
        delta = delta_for_epsilon_unstable(unit_inverse_bound, EPSILON)
        p = scalar_orbit(scalar_growth, delta, 40, kind=JumpKind.DECAYING)
        certificate = shadow_unstable(p, scalar_growth, unit_inverse_bound, EPSILON)
        assert certificate.pass_limit

    def test_not_invertible(self, forward_only, unit_inverse_bound):
        """Test semigroups without an inverse are refused."""
        p = PseudoOrbit(points=np.zeros((2, 1)), durations=[1.0], delta=0.1, R=1.0)
        with pytest.raises(NotInvertibleError):
            shadow_unstable(p, forward_only, unit_inverse_bound, EPSILON)

    def test_truncation_rule(self):
        """Test the least k with a remainder below tolerance."""
        terms, remainder = series_truncation(np.arange(11.0), 1.0, 1.0, 1.0, 1e-3)
        assert terms == 7
        assert remainder == pytest.approx(math.exp(-8.0) / (1 - math.exp(-1.0)))
        assert series_truncation(np.arange(11.0), 1.0, 1.0, 1.0, 1e-20) == (10, 0.0)


@pytest.mark.unit
class TestShadowHyperbolic:
    """Test the combined solver on diag(-1, 2)."""

    def _orbit(self, saddle, split, kind=JumpKind.CONSTANT, n=30):
        epsilon = 1e-2
        stable = delta_for_epsilon_stable(split.stable_bound(), epsilon, R_min=1.0)
        delta = min(stable.delta, delta_for_epsilon_unstable(split.unstable_bound(), epsilon))
        rule = JumpRule(kind=kind, delta=delta)
        return from_perturbed_orbit(
            saddle, [0.3, 0.2], n, stable.R, rule, seed=11, jump_norm=lambda v: coupled_norm(v, split)
        )

    def test_coupled_errors(self, saddle):
        """Test the coupled sup error stays below the bound and ε."""
        split = compute_splitting(saddle)
        p = self._orbit(saddle, split)
        certificate = shadow_hyperbolic(p, saddle, split, 1e-2)
        assert certificate.norm == "coupled"
        assert certificate.method == ShadowMethod.HYPERBOLIC_COMBINED
        assert certificate.error_bound <= 1e-2 * (1 + 1e-9)
        assert certificate.sup_error <= certificate.error_bound * (1 + 1e-9)
        assert certificate.pass_eps
        assert certificate.ambient_sup_error is not None
        assert certificate.ambient_sup_error <= 2.0 * certificate.sup_error * (1 + 1e-9)

    def test_decaying_limit(self, saddle):
        """Test decaying jumps pass the limit check in the coupled norm."""
        split = compute_splitting(saddle)
        p = self._orbit(saddle, split, kind=JumpKind.DECAYING, n=40)
        certificate = shadow_hyperbolic(p, saddle, split, 1e-2)
        assert certificate.pass_eps and certificate.pass_limit

    def test_dimension_mismatch(self, saddle):
        """Test a split of another dimension is refused."""
        split = compute_splitting(saddle)
        p = PseudoOrbit(points=np.zeros((2, 3)), durations=[1.0], delta=0.1, R=1.0)
        with pytest.raises(DimensionMismatchError):
            shadow_hyperbolic(p, make_heat(3), split, 1e-2)

    def test_not_hyperbolic(self, saddle):
        """Test a rotation is refused whatever split is supplied."""
        split = compute_splitting(saddle)
        p = PseudoOrbit(points=np.zeros((2, 2)), durations=[1.0], delta=0.1, R=1.0)
        with pytest.raises(NotHyperbolicError):
            shadow_hyperbolic(p, make_rotation(1.0), split, 1e-2)

    def test_long_orbit_point_verifies(self):
        """Test forward verification of the glued point matches the ambient trace past the cut."""
        T = make_matrix(np.diag([-1.0, 1.0]), name="saddle")
        split = compute_splitting(T)
        epsilon = 1e-2
        stable = delta_for_epsilon_stable(split.stable_bound(), epsilon, R_min=1.0)
        delta = min(stable.delta, delta_for_epsilon_unstable(split.unstable_bound(), epsilon))
        rule = JumpRule(kind=JumpKind.CONSTANT, delta=delta)
        p = from_perturbed_orbit(
            T, np.zeros(2), 30, stable.R, rule, seed=3, jump_norm=lambda v: coupled_norm(v, split)
        )
        certificate = shadow_hyperbolic(p, T, split, epsilon)
        assert certificate.pass_eps
        assert certificate.tail_cut < p.n_legs
        verified = verify_shadowing(certificate.shadow_point, p, T, epsilon)
        assert verified.sup_error == pytest.approx(certificate.ambient_sup_error, abs=1e-4)
        assert verified.sup_error <= 2.0 * certificate.sup_error + 1e-4
