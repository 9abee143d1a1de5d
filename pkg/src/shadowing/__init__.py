"""Pseudo-orbits, constructive shadowing solvers, the verifier and the oracle."""

from .bounds import delta_for_epsilon_stable, delta_for_epsilon_unstable
from .oracle import brute_force_shadow
from .pseudo_orbit import (
    dump_pseudo_orbit,
    evaluate_star,
    from_perturbed_orbit,
    left_limit,
    load_pseudo_orbit,
    periodic_chain,
    project_pseudo_orbit,
    validate,
)
from .solvers import contraction_iterate, shadow_hyperbolic, shadow_stable, shadow_unstable
from .verifier import verify_shadowing

__all__ = [
    "delta_for_epsilon_stable",
    "delta_for_epsilon_unstable",
    "brute_force_shadow",
    "dump_pseudo_orbit",
    "evaluate_star",
    "from_perturbed_orbit",
    "left_limit",
    "load_pseudo_orbit",
    "periodic_chain",
    "project_pseudo_orbit",
    "validate",
    "contraction_iterate",
    "shadow_hyperbolic",
    "shadow_stable",
    "shadow_unstable",
    "verify_shadowing",
]
