"""
Constructive shadowing.

* ``shadow_stable``: for eventually contracting T the orbit of x₀ itself
  shadows; the contraction Γ on finite sequences is materialised by
  ``contraction_iterate``.
* ``shadow_unstable``: for T with contracting inverses the shadow point is
  x₀ + Σ_k T(t̂_k)^{-1}h_{k-1}.
* ``shadow_hyperbolic``: both constructions on M and N, glued as x^M + x^N.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger

from ..dynamics.semigroup import Semigroup
from ..dynamics.splitting import certify_rate_bound, check_hyperbolic
from ..dynamics.vectors import coupled_norm, norm
from ..exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidPseudoOrbitError,
    NotHyperbolicError,
    NotInvertibleError,
)
from ..models.bounds import BoundDirection, RateBound
from ..models.certificate import ContractionTrace, ShadowCertificate, ShadowMethod
from ..models.orbit import PseudoOrbit
from ..models.splitting import HyperbolicSplitting
from ..utils.constants import DEFAULT_SAMPLES_PER_LEG, DEFAULT_TAIL_TOL
from .bounds import contraction_factor, stable_limit_constant, unstable_limit_constant
from .pseudo_orbit import jump_norms, project_pseudo_orbit, require_valid, resolve_jumps, tail_start
from .verifier import (
    PropagatorCache,
    backward_offsets,
    forward_offsets,
    leg_errors,
    leg_sample_offsets,
)

# Relative slack when comparing a proof bound with ε
_BOUND_SLACK = 1e-9


def _tail_jump_sup(norms: np.ndarray) -> float:
    tail = norms[tail_start(norms.size):]
    return float(tail.max()) if tail.size else 0.0


def _require_direction(bound: RateBound, direction: BoundDirection) -> None:
    if bound.direction != direction:
        raise InvalidParameterError(f"Expected a {direction.value} bound, got {bound.direction.value}")


def _check_error_bound(error_bound: float, epsilon: float, what: str) -> None:
    if error_bound > epsilon * (1.0 + _BOUND_SLACK):
        raise InvalidPseudoOrbitError(
            f"{what}: jumps allow an error of {error_bound:.6g}, above epsilon={epsilon:.6g}"
        )


def series_truncation(
    start_times: np.ndarray, K: float, rate: float, jump_sup: float, tail_tol: float
) -> Tuple[int, float]:
    """
    Least k with K·sup‖h‖·e^{-λ t̂_{k+1}}/(1 - e^{-λ}) < tail_tol, capped at n.

    Returns the cut index and the analytic bound on the terms past it (0 when
    no cut comes before the end of the orbit). The solvers sum every term of a
    finite orbit and report the cut as a diagnostic.
    """
    n = start_times.size - 1
    scale = K * jump_sup / (1.0 - math.exp(-rate))
    for k in range(n):
        remainder = scale * math.exp(-rate * start_times[k + 1])
        if remainder < tail_tol:
            return k, remainder
    return n, 0.0


def _series_partial_sum(
    durations: np.ndarray, jumps: np.ndarray, terms: int, inverse_step: Callable[[float, np.ndarray], np.ndarray]
) -> np.ndarray:
    """Σ_{k=1}^{terms} T(t̂_k)^{-1}h_{k-1} by Horner's rule."""
    s = np.zeros(jumps.shape[1], dtype=complex)
    for i in range(terms - 1, -1, -1):
        s = inverse_step(durations[i], s + jumps[i])
    return s


def shadow_stable(
    p: PseudoOrbit,
    T: Semigroup,
    bound: RateBound,
    epsilon: float,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
    tail_tol: float = DEFAULT_TAIL_TOL,
    certify: bool = True,
) -> ShadowCertificate:
    """The orbit of x₀ shadows p when ‖T(t)‖ ≤ K e^{-λt} and K e^{-λR} < 1."""
    _require_direction(bound, BoundDirection.FORWARD_CONTRACTION)
    require_valid(p, T, tail_tol=tail_tol)
    if certify:
        certify_rate_bound(T, bound)

    R_eff = float(p.durations.min())
    q = contraction_factor(bound, R_eff)
    if q >= 1.0:
        raise InvalidPseudoOrbitError(f"Durations >= {R_eff:.4g} give K e^(-λR) = {q:.4g}, not a contraction")
    C = stable_limit_constant(bound, R_eff)

    jumps = resolve_jumps(p, T)
    norms = jump_norms(jumps)
    error_bound = C * float(norms.max())
    _check_error_bound(error_bound, epsilon, "stable solver")

    offsets = forward_offsets(p.durations, jumps, np.zeros(p.dim, dtype=complex), T.apply)
    times, errors = leg_errors(p, T, offsets, n_samples_per_leg)
    certificate = ShadowCertificate.from_trace(
        ShadowMethod.STABLE,
        epsilon,
        p.x0.copy(),
        times,
        errors,
        decaying_input=p.decaying,
        limit_bound=C * _tail_jump_sup(norms) if p.decaying else None,
        tail_tol=tail_tol,
        error_bound=error_bound,
    )
    logger.info(
        f"Stable shadow over {p.n_legs} legs: sup_error={certificate.sup_error:.3g} "
        f"(bound {error_bound:.3g}), pass_eps={certificate.pass_eps}, pass_limit={certificate.pass_limit}"
    )
    return certificate


def contraction_iterate(
    p: PseudoOrbit,
    T: Semigroup,
    bound: RateBound,
    epsilon: float,
    m: int,
    tol: float = 1e-9,
    certify: bool = True,
) -> ContractionTrace:
    """
    Iterate Γ(y)_0 = x₀, Γ(y)_i = T(t_{i-1})y_{i-1} from y⁰ = (x_i).

    Γ shifts information one index per application, so m ≥ n iterations reach
    the fixed point (T(t̂_i)x₀) exactly.
    """
    _require_direction(bound, BoundDirection.FORWARD_CONTRACTION)
    if m < 1:
        raise InvalidParameterError(f"Need at least one iteration, got m={m}")
    require_valid(p, T)
    if certify:
        certify_rate_bound(T, bound)

    q = contraction_factor(bound, float(p.durations.min()))
    fixed = np.empty_like(p.points)
    fixed[0] = p.x0
    for i in range(p.n_legs):
        fixed[i + 1] = T.apply(p.durations[i], fixed[i])

    def sup_distance(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.max(np.linalg.norm(a - b, axis=1)))

    radius = epsilon / bound.K
    y = np.array(p.points)
    stays_in_ball = True
    distances = []
    for _ in range(m):
        nxt = np.empty_like(y)
        nxt[0] = p.x0
        for i in range(p.n_legs):
            nxt[i + 1] = T.apply(p.durations[i], y[i])
        distances.append(sup_distance(nxt, y))
        stays_in_ball = stays_in_ball and sup_distance(nxt, p.points) <= radius * (1.0 + _BOUND_SLACK)
        y = nxt

    distances = np.array(distances)
    ratios = np.zeros(max(distances.size - 1, 0))
    for k in range(1, distances.size):
        if distances[k - 1] > 0:
            ratios[k - 1] = distances[k] / distances[k - 1]

    residual = sup_distance(y, fixed)
    scale = max(1.0, float(np.max(np.linalg.norm(fixed, axis=1))))
    trace = ContractionTrace(
        distances=distances,
        ratios=ratios,
        limit_sequence=y,
        contraction_factor=q,
        fixed_point_residual=residual,
        stays_in_ball=stays_in_ball,
        converged=residual <= tol * scale,
    )
    logger.debug(f"Contraction: {m} iterations, factor {q:.4g}, residual {residual:.3g}")
    return trace


def shadow_unstable(
    p: PseudoOrbit,
    T: Semigroup,
    bound: RateBound,
    epsilon: float,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
    tail_tol: float = DEFAULT_TAIL_TOL,
    certify: bool = True,
) -> ShadowCertificate:
    """x = x₀ + Σ_k T(t̂_k)^{-1}h_{k-1} when ‖T(t)^{-1}‖ ≤ K e^{-λt}."""
    _require_direction(bound, BoundDirection.INVERSE_CONTRACTION)
    if not T.invertible:
        raise NotInvertibleError(f"{T.name} has no inverse action")
    require_valid(p, T, tail_tol=tail_tol)
    if certify:
        certify_rate_bound(T, bound)

    R_eff = float(p.durations.min())
    C = unstable_limit_constant(bound, R_eff)
    jumps = resolve_jumps(p, T)
    norms = jump_norms(jumps)
    jump_sup = float(norms.max())
    error_bound = C * jump_sup
    _check_error_bound(error_bound, epsilon, "unstable solver")

    cut, truncation = series_truncation(p.start_times, bound.K, bound.rate, jump_sup, tail_tol)
    shadow_point = p.x0 + _series_partial_sum(p.durations, jumps, p.n_legs, T.apply_inverse)

    offsets = backward_offsets(p.durations, jumps, T.apply_inverse)
    times, errors = leg_errors(p, T, offsets, n_samples_per_leg)
    notes = []
    if cut < p.n_legs:
        notes.append(
            f"analytic remainder below tail_tol after {cut} of {p.n_legs} terms; all terms summed"
        )
    certificate = ShadowCertificate.from_trace(
        ShadowMethod.UNSTABLE_SERIES,
        epsilon,
        shadow_point,
        times,
        errors,
        decaying_input=p.decaying,
        limit_bound=C * _tail_jump_sup(norms) if p.decaying else None,
        tail_tol=tail_tol,
        error_bound=error_bound,
        series_terms=p.n_legs,
        tail_cut=cut,
        truncation_bound=truncation,
        notes=notes,
    )
    logger.info(
        f"Unstable shadow over {p.n_legs} legs: sup_error={certificate.sup_error:.3g}, "
        f"pass_eps={certificate.pass_eps}, pass_limit={certificate.pass_limit}"
    )
    return certificate


def shadow_hyperbolic(
    p: PseudoOrbit,
    T: Semigroup,
    split: HyperbolicSplitting,
    epsilon: float,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ShadowCertificate:
    """x = x^M + x^N with errors in the coupled norm (ambient norm reported alongside)."""
    if split.dim != T.dim or p.dim != T.dim:
        raise DimensionMismatchError(f"Splitting dim {split.dim}, model dim {T.dim}, orbit dim {p.dim}")
    if T.generator is not None:
        report = check_hyperbolic(T)
        if not report.hyperbolic:
            raise NotHyperbolicError(f"{T.name} is not hyperbolic (gap {report.gap:.3g})")

    def jump_norm(v: np.ndarray) -> float:
        return coupled_norm(v, split)

    require_valid(p, T, jump_norm=jump_norm, tail_tol=tail_tol)
    jumps = resolve_jumps(p, T)
    stable_part = project_pseudo_orbit(p, split.P_M)
    unstable_part = project_pseudo_orbit(p, split.P_N)
    jumps_M = jumps @ split.P_M.T
    jumps_N = jumps @ split.P_N.T

    R_eff = float(p.durations.min())
    bound_M, bound_N = split.stable_bound(), split.unstable_bound()
    norms_M, norms_N = jump_norms(jumps_M), jump_norms(jumps_N)
    C_M = stable_limit_constant(bound_M, R_eff) if split.stable_dim else 0.0
    C_N = unstable_limit_constant(bound_N, R_eff) if split.unstable_dim else 0.0
    error_bound = max(C_M * float(norms_M.max()), C_N * float(norms_N.max()))
    _check_error_bound(error_bound, epsilon, "hyperbolic solver")

    stable_step = PropagatorCache(split.stable_propagator)
    unstable_step = PropagatorCache(split.unstable_propagator)
    unstable_inverse = PropagatorCache(split.unstable_inverse_propagator)

    offsets_M = forward_offsets(p.durations, jumps_M, np.zeros(p.dim, dtype=complex), stable_step)
    offsets_N = backward_offsets(p.durations, jumps_N, unstable_inverse)

    cut, truncation = series_truncation(
        p.start_times, bound_N.K, bound_N.rate, float(norms_N.max()), tail_tol
    )
    x_M = stable_part.x0
    x_N = unstable_part.x0 + _series_partial_sum(p.durations, jumps_N, p.n_legs, unstable_inverse)

    times, coupled_errors, ambient_errors = [], [], []
    for i in range(p.n_legs):
        for s in leg_sample_offsets(T, p.durations[i], n_samples_per_leg):
            err_M = stable_step(s, offsets_M[i])
            err_N = unstable_step(s, offsets_N[i])
            times.append(p.start_times[i] + s)
            coupled_errors.append(max(norm(err_M), norm(err_N)))
            ambient_errors.append(norm(err_M + err_N))

    tail_sup = max(C_M * _tail_jump_sup(norms_M), C_N * _tail_jump_sup(norms_N))
    notes = [f"K_M={split.K_M:.4g}, K_N={split.K_N:.4g} ({split.certification})"]
    if cut < p.n_legs:
        notes.append(f"N remainder below tail_tol after {cut} of {p.n_legs} terms; all summed")
    certificate = ShadowCertificate.from_trace(
        ShadowMethod.HYPERBOLIC_COMBINED,
        epsilon,
        x_M + x_N,
        np.array(times),
        np.array(coupled_errors),
        decaying_input=p.decaying,
        limit_bound=tail_sup if p.decaying else None,
        tail_tol=tail_tol,
        error_bound=error_bound,
        series_terms=p.n_legs,
        tail_cut=cut,
        truncation_bound=truncation,
        ambient_errors=np.array(ambient_errors),
        notes=notes,
    )
    certificate.norm = "coupled"
    logger.info(
        f"Hyperbolic shadow over {p.n_legs} legs: coupled sup_error={certificate.sup_error:.3g}, "
        f"ambient sup_error={certificate.ambient_sup_error:.3g}, pass_eps={certificate.pass_eps}"
    )
    return certificate
