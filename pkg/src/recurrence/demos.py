"""
End-to-end counterexamples.

* Drift demos: on the rotation and on T(t) = I every true orbit keeps its
  modulus, so a pseudo-orbit whose radius drifts by mδ' cannot be followed
  closer than mδ'/2.
* Weighted shift: a nonzero point that decays forward and backward closes a
  (δ, R)-chain through 0, so the model is chain recurrent away from 0 and
  cannot be hyperbolic although it is generalized hyperbolic.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from loguru import logger
from scipy import optimize

from ..dynamics.semigroup import Semigroup
from ..dynamics.splitting import check_hyperbolic
from ..dynamics.systems import (
    GHShiftModel,
    check_generalized_hyperbolic,
    make_rotation,
    make_trivial,
    support_monitor,
)
from ..exceptions import InvalidParameterError, ParameterTooSmallError, WindowExitError
from ..models.orbit import JumpKind, JumpRule, PseudoOrbit
from ..models.splitting import HyperbolicityReport
from ..shadowing.oracle import brute_force_shadow
from ..shadowing.pseudo_orbit import dump_pseudo_orbit, from_perturbed_orbit, validate
from ..shadowing.verifier import forward_offsets, leg_errors
from ..utils.constants import DEFAULT_SAMPLES_PER_LEG
from ..utils.serialization import json_float

# Drift must exceed 3ε so that the half-drift clears ε with margin
DRIFT_FACTOR = 3.0
# Analytic and numeric lower bounds must agree to this relative tolerance
AGREEMENT_RTOL = 0.01


@dataclass
class DriftReport:
    """Outcome of a drifting pseudo-orbit experiment."""

    model: str
    epsilon: float
    delta_prime: float
    m: int
    pseudo_orbit: PseudoOrbit
    lower_bound: float
    numeric_bound: float
    best_radius: float
    oracle_sup_error: float
    certified: bool
    notes: List[str] = field(default_factory=list)

    def to_report(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "epsilon": self.epsilon,
            "delta_prime": self.delta_prime,
            "m": self.m,
            "lower_bound": self.lower_bound,
            "numeric_bound": json_float(self.numeric_bound),
            "best_radius": self.best_radius,
            "oracle_sup_error": json_float(self.oracle_sup_error),
            "certified": self.certified,
            "notes": list(self.notes),
        }


def _drift_demo(
    T: Semigroup,
    duration: float,
    epsilon: float,
    delta_prime: float,
    m: int,
    n_samples_per_leg: int,
) -> DriftReport:
    if epsilon <= 0 or delta_prime < 0 or m < 1:
        raise InvalidParameterError(f"Need epsilon > 0, delta' >= 0, m >= 1; got {epsilon}, {delta_prime}, {m}")
    drift = m * delta_prime
    if delta_prime > 0 and drift < DRIFT_FACTOR * epsilon * (1.0 - 1e-12):
        raise ParameterTooSmallError(
            f"Drift m·δ' = {drift:.6g} is below {DRIFT_FACTOR:g}ε = {DRIFT_FACTOR * epsilon:.6g}"
        )

    unit = np.zeros(T.dim)
    unit[0] = 1.0
    rule = JumpRule(
        kind=JumpKind.CONSTANT if delta_prime > 0 else JumpKind.ZERO,
        delta=delta_prime,
        direction=unit.tolist(),
        real=True,
    )
    # m + 1 legs so that every radius 1, 1 + δ', ..., 1 + mδ' starts a sampled leg
    p = from_perturbed_orbit(T, unit, m + 1, duration, rule, seed=0)
    jumps = np.array(p.jumps)

    def sup_error(r: float) -> float:
        offsets = forward_offsets(p.durations, jumps, (r - 1.0) * unit.astype(complex), T.apply)
        return float(leg_errors(p, T, offsets, n_samples_per_leg)[1].max())

    radii = np.linalg.norm(p.points, axis=1)
    search = optimize.minimize_scalar(
        sup_error,
        bounds=(float(radii.min()) - 1.0, float(radii.max()) + 1.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    lower_bound = drift / 2.0
    numeric_bound = float(search.fun)
    oracle = brute_force_shadow(p, T, epsilon=epsilon, n_samples_per_leg=n_samples_per_leg)

    notes = []
    agree = abs(numeric_bound - lower_bound) <= AGREEMENT_RTOL * max(lower_bound, np.finfo(float).tiny)
    if delta_prime == 0:
        notes.append("zero drift: the pseudo-orbit is a true orbit and is shadowable")
    elif not agree:
        notes.append(f"numeric bound {numeric_bound:.6g} disagrees with analytic {lower_bound:.6g}")
    certified = bool(delta_prime > 0 and agree and lower_bound > epsilon and numeric_bound > epsilon)

    report = DriftReport(
        model=T.name,
        epsilon=epsilon,
        delta_prime=delta_prime,
        m=m,
        pseudo_orbit=p,
        lower_bound=lower_bound,
        numeric_bound=numeric_bound,
        best_radius=float(search.x),
        oracle_sup_error=oracle.sup_error,
        certified=certified,
        notes=notes,
    )
    logger.info(
        f"{T.name} drift demo: lower bound {lower_bound:.4g}, numeric {numeric_bound:.4g}, "
        f"oracle {oracle.sup_error:.4g}, certified={certified}"
    )
    return report


def rotation_no_shadowing_demo(
    theta: float,
    epsilon: float,
    delta_prime: float,
    m: int,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
) -> DriftReport:
    """Radius r_i = 1 + iδ' sampled once per full turn 2π/|θ|."""
    T = make_rotation(theta)
    return _drift_demo(T, 2.0 * math.pi / abs(theta), epsilon, delta_prime, m, n_samples_per_leg)


def trivial_no_shadowing_demo(
    epsilon: float,
    delta_prime: float,
    m: int,
    dim: int = 2,
    duration: float = 1.0,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
) -> DriftReport:
    """The same drift for T(t) = I, whose true orbits are constant."""
    return _drift_demo(make_trivial(dim), duration, epsilon, delta_prime, m, n_samples_per_leg)


@dataclass
class GHRecurrenceReport:
    """Chain u → 0 → v → u on the weighted shift and the spectral cross-checks."""

    u: np.ndarray
    forward_norms: np.ndarray
    backward_norms: np.ndarray
    forward_decays: bool
    backward_decays: bool
    forward_steps: int
    backward_steps: int
    chain: Optional[PseudoOrbit]
    chain_valid: bool
    chain_delta_actual: float
    generalized_hyperbolic: bool
    ring_check: HyperbolicityReport
    window_check: HyperbolicityReport
    notes: List[str] = field(default_factory=list)

    @property
    def concludes_not_hyperbolic(self) -> bool:
        return self.chain_valid and not self.ring_check.hyperbolic

    def to_report(self) -> Dict[str, Any]:
        return {
            "forward_norms": [float(v) for v in self.forward_norms],
            "backward_norms": [float(v) for v in self.backward_norms],
            "forward_decays": self.forward_decays,
            "backward_decays": self.backward_decays,
            "forward_steps": self.forward_steps,
            "backward_steps": self.backward_steps,
            "chain": dump_pseudo_orbit(self.chain) if self.chain is not None else None,
            "chain_valid": self.chain_valid,
            "chain_delta_actual": self.chain_delta_actual,
            "generalized_hyperbolic": self.generalized_hyperbolic,
            "ring_check": self.ring_check.to_report(),
            "window_check": self.window_check.to_report(),
            "concludes_not_hyperbolic": self.concludes_not_hyperbolic,
            "notes": list(self.notes),
        }


def _norm_trace(
    step: Callable[[np.ndarray], np.ndarray], u: np.ndarray, model: GHShiftModel
) -> np.ndarray:
    """‖u_k‖ for u_{k+1} = step(u_k) while the support stays inside the window margin."""
    norms = [float(np.linalg.norm(u))]
    current = u
    while True:
        current = step(current)
        if not np.any(current) or not support_monitor(model, current):
            break
        norms.append(float(np.linalg.norm(current)))
    return np.array(norms)


def gh_recurrence_demo(
    model: GHShiftModel, support_j: Optional[int] = 4, delta: float = 0.05, R: float = 1.0
) -> GHRecurrenceReport:
    """
    With u = e_j: T(kh)u → 0 forward once the mass crosses into M, and
    T(kh)^{-1}u → 0 backward on N. Then u →(k_f h) 0 →(≥R) v →(k_b h) u with
    v = T(k_b h)^{-1}u is a (δ, R)-chain.
    """
    if delta <= 0 or R <= 0:
        raise InvalidParameterError(f"Need delta > 0 and R > 0, got {delta}, {R}")
    T, h = model.semigroup, model.h
    ring_check = check_hyperbolic(model.periodic_closure())
    window_check = check_hyperbolic(T)
    gh = check_generalized_hyperbolic(model)
    notes = []
    if window_check.hyperbolic:
        notes.append("the truncated window is nilpotent; its spectral test is an artifact of the cut-off")

    if support_j is None:
        u = np.zeros(model.dim, dtype=complex)
        chain = PseudoOrbit(points=np.zeros((2, model.dim)), durations=[T.snap_up(R)], delta=delta, R=R)
        notes.append("u = 0 is a fixed point and trivially chain recurrent")
        return GHRecurrenceReport(
            u=u,
            forward_norms=np.zeros(1),
            backward_norms=np.zeros(1),
            forward_decays=True,
            backward_decays=True,
            forward_steps=0,
            backward_steps=0,
            chain=chain,
            chain_valid=validate(chain, T).valid,
            chain_delta_actual=0.0,
            generalized_hyperbolic=gh.holds,
            ring_check=ring_check,
            window_check=window_check,
            notes=notes,
        )

    try:
        u = model.basis(support_j)
    except InvalidParameterError as e:
        raise WindowExitError(f"Support index {support_j} is outside the window; enlarge m") from e
    if not support_monitor(model, u):
        raise WindowExitError(f"Support index {support_j} is not interior to the window of size m={model.m}")

    forward = _norm_trace(lambda v: T.apply(h, v), u, model)
    backward = _norm_trace(lambda v: T.apply_inverse(h, v), u, model)
    # Norms grow until the mass crosses the M/N boundary, then decay
    cross_f, cross_b = max(support_j, 0), max(-support_j, 0)
    forward_decays = forward.size > cross_f + 1 and bool(np.all(np.diff(forward[cross_f:]) < 0))
    backward_decays = backward.size > cross_b + 1 and bool(np.all(np.diff(backward[cross_b:]) < 0))

    min_steps = int(round(T.snap_up(R) / h))
    k_f = next((k for k in range(max(min_steps, 1), forward.size) if forward[k] < delta), None)
    k_b = next((k for k in range(max(min_steps, 1), backward.size) if backward[k] < delta), None)
    if k_f is None or k_b is None:
        raise WindowExitError(
            f"Norms do not fall below delta={delta} before the support leaves the window; enlarge m"
        )

    v = T.apply_inverse(k_b * h, u)
    points = np.stack((u, np.zeros(model.dim, dtype=complex), v, u))
    durations = np.array([k_f * h, T.snap_up(R), k_b * h])
    chain = PseudoOrbit(points=points, durations=durations, delta=delta, R=R)
    check = validate(chain, T)

    logger.info(
        f"Weighted shift chain e_{support_j} → 0 → e_{support_j + k_b} → e_{support_j}: "
        f"valid={check.valid}, max jump {check.delta_actual:.3g}"
    )
    return GHRecurrenceReport(
        u=u,
        forward_norms=forward,
        backward_norms=backward,
        forward_decays=forward_decays,
        backward_decays=backward_decays,
        forward_steps=k_f,
        backward_steps=k_b,
        chain=chain,
        chain_valid=check.valid,
        chain_delta_actual=check.delta_actual,
        generalized_hyperbolic=gh.holds,
        ring_check=ring_check,
        window_check=window_check,
        notes=notes,
    )
