"""
Tests for the brute-force oracle.
"""

import numpy as np
import pytest

from src.dynamics.splitting import compute_splitting
from src.dynamics.systems import make_gh_shift
from src.dynamics.vectors import coupled_norm
from src.exceptions import RankDeficientError
from src.models.certificate import ShadowMethod
from src.models.orbit import JumpKind, JumpRule
from src.shadowing.bounds import delta_for_epsilon_stable, delta_for_epsilon_unstable
from src.shadowing.oracle import brute_force_shadow
from src.shadowing.pseudo_orbit import from_perturbed_orbit
from src.shadowing.solvers import shadow_hyperbolic, shadow_stable

DOMINANCE_TOL = 1e-9


@pytest.mark.unit
class TestBruteForceShadow:
    """Test the least-squares oracle and its minimax refinement."""

    def test_dominates_constructive_point(self, scalar_decay, unit_forward_bound):
        """Test the oracle's sup error is no worse than the orbit of x₀."""
        delta = delta_for_epsilon_stable(unit_forward_bound, 0.1).delta
        for seed in range(3):
            p = from_perturbed_orbit(
                scalar_decay, [1.0], 8, 1.0, JumpRule(kind=JumpKind.CONSTANT, delta=delta), seed=seed
            )
            constructive = shadow_stable(p, scalar_decay, unit_forward_bound, 0.1)
            oracle = brute_force_shadow(p, scalar_decay, epsilon=0.1)
            assert oracle.method == ShadowMethod.ORACLE
            assert oracle.sup_error <= constructive.sup_error + DOMINANCE_TOL
            assert oracle.sup_error <= oracle.lsq_sup_error + DOMINANCE_TOL
            assert not oracle.rank_deficient

    def test_exact_orbit(self, saddle):
        """Test a true orbit has oracle error zero."""
        p = from_perturbed_orbit(saddle, [1.0, 0.5], 3, 1.0, JumpRule(kind=JumpKind.ZERO))
        oracle = brute_force_shadow(p, saddle)
        assert oracle.sup_error == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(oracle.shadow_point, p.x0, atol=1e-12)

    def test_explicit_sample_times(self, scalar_decay):
        """Test caller-supplied times are used in sorted order."""
        p = from_perturbed_orbit(scalar_decay, [1.0], 4, 1.0, JumpRule(kind=JumpKind.CONSTANT, delta=0.01), seed=1)
        oracle = brute_force_shadow(p, scalar_decay, sample_times=[3.5, 0.0, 1.25])
        assert np.allclose(oracle.sample_times, [0.0, 1.25, 3.5])

    def test_rank_deficient(self):
        """Test samples that all annihilate a direction are detected."""
        model = make_gh_shift(4, 0.5)
        T = model.semigroup
        p = from_perturbed_orbit(T, model.basis(0), 2, 1.0, JumpRule(kind=JumpKind.ZERO))
        oracle = brute_force_shadow(p, T, sample_times=[0.5, 1.0, 1.5])
        assert oracle.rank_deficient
        with pytest.raises(RankDeficientError):
            brute_force_shadow(p, T, sample_times=[0.5, 1.0, 1.5], strict=True)

    def test_warm_start_dominates_hyperbolic(self, saddle):
        """Test seeding with the combined solver's point keeps the oracle below it."""
        split = compute_splitting(saddle)
        stable = delta_for_epsilon_stable(split.stable_bound(), 1e-2, R_min=1.0)
        delta = min(stable.delta, delta_for_epsilon_unstable(split.unstable_bound(), 1e-2))
        p = from_perturbed_orbit(
            saddle,
            [0.3, 0.2],
            2,
            stable.R,
            JumpRule(kind=JumpKind.CONSTANT, delta=delta),
            seed=4,
            jump_norm=lambda v: coupled_norm(v, split),
        )
        constructive = shadow_hyperbolic(p, saddle, split, 1e-2)
        oracle = brute_force_shadow(p, saddle, warm_starts=[constructive.shadow_point])
        assert oracle.sup_error <= constructive.ambient_sup_error + DOMINANCE_TOL
