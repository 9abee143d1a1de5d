"""Linear semigroups, model constructors and the hyperbolic splitting."""

# Vector space helpers
from .vectors import as_vector, coupled_norm, norm, norm_equivalence_constant

# Semigroup abstraction
from .semigroup import (
    MatrixSemigroup,
    Semigroup,
    inverse_operator_norm_estimate,
    operator_norm_estimate,
    semigroup_apply,
)
from .integrators import crosscheck_exponential, step_doubling_propagate

# Concrete models
from .systems import (
    GHShiftModel,
    TransportSemigroup,
    WeightConvention,
    WeightedShiftSemigroup,
    check_generalized_hyperbolic,
    make_gh_shift,
    make_heat,
    make_matrix,
    make_rotation,
    make_scalar,
    make_transport,
    make_trivial,
    support_monitor,
    verify_gh_convention,
)

# Spectral tests and the splitting
from .splitting import (
    certify_rate_bound,
    check_hyperbolic,
    check_spectral_condition,
    compute_splitting,
    resolvent_bound,
    splitting_residuals,
)

__all__ = [
    "as_vector",
    "coupled_norm",
    "norm",
    "norm_equivalence_constant",
    "MatrixSemigroup",
    "Semigroup",
    "inverse_operator_norm_estimate",
    "operator_norm_estimate",
    "semigroup_apply",
    "crosscheck_exponential",
    "step_doubling_propagate",
    "GHShiftModel",
    "TransportSemigroup",
    "WeightConvention",
    "WeightedShiftSemigroup",
    "check_generalized_hyperbolic",
    "make_gh_shift",
    "make_heat",
    "make_matrix",
    "make_rotation",
    "make_scalar",
    "make_transport",
    "make_trivial",
    "support_monitor",
    "verify_gh_convention",
    "certify_rate_bound",
    "check_hyperbolic",
    "check_spectral_condition",
    "compute_splitting",
    "resolvent_bound",
    "splitting_residuals",
]
