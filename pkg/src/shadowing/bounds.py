"""
Choice of the jump bound δ (and minimum duration R) that guarantees
shadowing at level ε, plus the limit constants used for decaying jumps.
"""

import math
from typing import NamedTuple

from ..exceptions import InvalidParameterError
from ..models.bounds import BoundDirection, RateBound
from ..utils.constants import DEFAULT_R_MIN


class StableChoice(NamedTuple):
    delta: float
    R: float


def _require(bound: RateBound, direction: BoundDirection, epsilon: float) -> None:
    if bound.direction != direction:
        raise InvalidParameterError(f"Expected a {direction.value} bound, got {bound.direction.value}")
    if epsilon < 0:
        raise InvalidParameterError(f"epsilon must be non-negative, got {epsilon}")


def contraction_factor(bound: RateBound, R: float) -> float:
    """K e^{-λR}."""
    return bound.value(R)


def delta_for_epsilon_stable(
    bound: RateBound, epsilon: float, R_min: float = DEFAULT_R_MIN
) -> StableChoice:
    """R = max(R_min, ln(2K)/λ) so that K e^{-λR} ≤ 1/2, and δ = (1 - K e^{-λR})ε/K."""
    _require(bound, BoundDirection.FORWARD_CONTRACTION, epsilon)
    R = max(float(R_min), math.log(2.0 * bound.K) / bound.rate)
    delta = (1.0 - contraction_factor(bound, R)) * epsilon / bound.K
    return StableChoice(delta=delta, R=R)


def delta_for_epsilon_unstable(bound: RateBound, epsilon: float) -> float:
    """δ = ε(1 - e^{-λ})/(2K); assumes every duration is at least 1."""
    _require(bound, BoundDirection.INVERSE_CONTRACTION, epsilon)
    return epsilon * (1.0 - math.exp(-bound.rate)) / (2.0 * bound.K)


def stable_limit_constant(bound: RateBound, R: float) -> float:
    """K / (1 - K e^{-λR})."""
    q = contraction_factor(bound, R)
    if q >= 1.0:
        raise InvalidParameterError(f"K e^(-λR) = {q:.6g} is not a contraction")
    return bound.K / (1.0 - q)


def unstable_limit_constant(bound: RateBound, R: float = 1.0) -> float:
    """K / (1 - e^{-λR}); R = 1 gives the constant behind the unstable δ."""
    return bound.K / (1.0 - math.exp(-bound.rate * R))
