"""
Construction, validation and evaluation of (δ, R)-pseudo-orbits.

Generated pseudo-orbits keep the jumps they were built with. Re-deriving
h_i = x_{i+1} - T(t_i)x_i from the points cancels catastrophically once the
unstable part of x_i is large, so ``validate`` compares recorded and
recomputed jumps relative to ‖x_{i+1}‖ and tests δ on the recorded ones.
"""

import json
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..dynamics.semigroup import Semigroup
from ..dynamics.vectors import VectorLike, as_vector, norm, random_unit_vectors
from ..exceptions import InvalidParameterError, InvalidPseudoOrbitError, OffGridError
from ..models.orbit import JumpRule, PseudoOrbit, PseudoOrbitRecord, ValidationReport
from ..utils.constants import DEFAULT_TAIL_TOL, JUMP_CONSISTENCY_TOL
from ..utils.serialization import vector_from_json, vector_to_json

JumpNorm = Callable[[np.ndarray], float]

# Relative slack on the δ and R comparisons
_COMPARE_SLACK = 1e-12


def tail_start(n_legs: int) -> int:
    """First index i with i ≥ n/2."""
    return (n_legs + 1) // 2


def recompute_jumps(p: PseudoOrbit, T: Semigroup) -> np.ndarray:
    """h_i = x_{i+1} - T(t_i)x_i from the stored points."""
    jumps = np.empty((p.n_legs, p.dim), dtype=complex)
    for i in range(p.n_legs):
        jumps[i] = p.points[i + 1] - T.apply(p.durations[i], p.points[i])
    return jumps


def resolve_jumps(p: PseudoOrbit, T: Semigroup) -> np.ndarray:
    """Recorded jumps when present, recomputed otherwise."""
    return np.array(p.jumps) if p.jumps is not None else recompute_jumps(p, T)


def jump_norms(jumps: np.ndarray, jump_norm: JumpNorm = norm) -> np.ndarray:
    return np.array([jump_norm(h) for h in jumps], dtype=float)


def decay_proxy_holds(norms: np.ndarray, tail_tol: float = DEFAULT_TAIL_TOL) -> bool:
    """max_{i ≥ n/2} ‖h_i‖ ≤ max(tail_tol, max_i ‖h_i‖ / 10)."""
    if norms.size == 0:
        return True
    tail = norms[tail_start(norms.size):]
    tail_max = float(tail.max()) if tail.size else 0.0
    return tail_max <= max(tail_tol, float(norms.max()) / 10.0)


def validate(
    p: PseudoOrbit,
    T: Semigroup,
    jump_norm: JumpNorm = norm,
    tail_tol: float = DEFAULT_TAIL_TOL,
    consistency_tol: float = JUMP_CONSISTENCY_TOL,
) -> ValidationReport:
    """Check every (δ, R) invariant; failures are reported, never raised."""
    messages: List[str] = []
    off_grid = [i for i, t in enumerate(p.durations) if not T.is_on_grid(t)]
    if off_grid:
        messages.append(f"{len(off_grid)} duration(s) off the time grid h={T.time_grid}")

    duration_violations = [
        i for i, t in enumerate(p.durations) if t < p.R * (1.0 - _COMPARE_SLACK)
    ]
    if duration_violations:
        messages.append(f"{len(duration_violations)} duration(s) shorter than R={p.R}")

    # Legs with an off-grid duration have no defined jump.
    on_grid = [i for i in range(p.n_legs) if i not in set(off_grid)]
    recomputed = np.zeros((p.n_legs, p.dim), dtype=complex)
    for i in on_grid:
        recomputed[i] = p.points[i + 1] - T.apply(p.durations[i], p.points[i])

    consistency = 0.0
    if p.jumps is not None:
        jumps = np.array(p.jumps)
        for i in on_grid:
            scale = 1.0 + float(np.linalg.norm(p.points[i + 1]))
            consistency = max(consistency, float(np.linalg.norm(recomputed[i] - jumps[i])) / scale)
        if consistency > consistency_tol:
            messages.append(f"Recorded jumps disagree with the points (relative gap {consistency:.3g})")
    else:
        jumps = recomputed

    norms = np.zeros(p.n_legs)
    for i in on_grid:
        norms[i] = jump_norm(jumps[i])
    jump_violations = [
        i for i in on_grid if norms[i] > p.delta * (1.0 + _COMPARE_SLACK) + np.finfo(float).tiny
    ]
    if jump_violations:
        messages.append(f"{len(jump_violations)} jump(s) exceed delta={p.delta:.6g}")

    decaying_ok = decay_proxy_holds(norms, tail_tol) if p.decaying else None
    if decaying_ok is False:
        messages.append("Jumps are declared decaying but the late jumps do not shrink")

    valid = not (off_grid or duration_violations or jump_violations) and consistency <= consistency_tol
    valid = valid and decaying_ok is not False
    report = ValidationReport(
        valid=valid,
        delta=p.delta,
        R=p.R,
        delta_actual=float(norms.max()) if norms.size else 0.0,
        min_duration=float(p.durations.min()),
        worst_jump_index=int(np.argmax(norms)) if on_grid else None,
        jump_violations=jump_violations,
        duration_violations=duration_violations,
        off_grid=off_grid,
        consistency_residual=consistency,
        decaying_declared=p.decaying,
        decaying_ok=decaying_ok,
        messages=messages,
    )
    logger.debug(f"Validated {p.n_legs}-leg pseudo-orbit: valid={valid}, delta_actual={report.delta_actual:.3g}")
    return report


def require_valid(p: PseudoOrbit, T: Semigroup, jump_norm: JumpNorm = norm, **kwargs: Any) -> ValidationReport:
    """``validate`` that raises InvalidPseudoOrbitError on failure."""
    report = validate(p, T, jump_norm=jump_norm, **kwargs)
    if not report.valid:
        raise InvalidPseudoOrbitError("; ".join(report.messages) or "pseudo-orbit failed validation")
    return report


def _durations(T: Semigroup, t_rule: Union[float, Sequence[float]], n: int) -> np.ndarray:
    if np.isscalar(t_rule):
        durations = np.full(n, float(t_rule))
    else:
        durations = np.asarray(t_rule, dtype=float).ravel()
        if durations.shape[0] != n:
            raise InvalidParameterError(f"t_rule lists {durations.shape[0]} durations for {n} legs")
    if np.any(durations <= 0):
        raise InvalidParameterError("Durations must be positive")
    for t in durations:
        if not T.is_on_grid(t):
            raise OffGridError(f"Duration {t} is not a multiple of the time grid h={T.time_grid}")
    return durations


def from_perturbed_orbit(
    T: Semigroup,
    x0: VectorLike,
    n: int,
    t_rule: Union[float, Sequence[float]],
    jump_rule: JumpRule,
    seed: Optional[int] = None,
    delta: Optional[float] = None,
    R: Optional[float] = None,
    jump_norm: JumpNorm = norm,
) -> PseudoOrbit:
    """
    x_{i+1} = T(t_i)x_i + h_i with ‖h_i‖ = jump_rule.radius(i).

    Directions are the rule's fixed direction or uniform on the unit sphere
    (deterministic per seed), rescaled to unit ``jump_norm``.
    """
    if n < 1:
        raise InvalidParameterError(f"A pseudo-orbit needs at least one leg, got n={n}")
    x = as_vector(x0, dim=T.dim)
    durations = _durations(T, t_rule, n)
    delta = jump_rule.delta if delta is None else float(delta)
    if jump_rule.delta > delta * (1.0 + _COMPARE_SLACK):
        raise InvalidParameterError(f"Jump radius {jump_rule.delta} exceeds delta={delta}")
    R = float(durations.min()) if R is None else float(R)
    if durations.min() < R * (1.0 - _COMPARE_SLACK):
        raise InvalidParameterError(f"Shortest duration {durations.min()} is below R={R}")

    if jump_rule.direction is not None:
        fixed = vector_from_json(jump_rule.direction)
        if fixed.shape[0] != T.dim:
            raise InvalidParameterError(f"Jump direction has dimension {fixed.shape[0]}, expected {T.dim}")
        directions = np.tile(fixed, (n, 1))
    else:
        rng = np.random.default_rng(seed)
        directions = random_unit_vectors(rng, n, T.dim, real=jump_rule.real)

    points = np.empty((n + 1, T.dim), dtype=complex)
    jumps = np.zeros((n, T.dim), dtype=complex)
    points[0] = x
    for i in range(n):
        radius = jump_rule.radius(i)
        if radius > 0:
            scale = jump_norm(directions[i])
            if scale == 0:
                raise InvalidParameterError("Jump direction has zero norm")
            jumps[i] = directions[i] * (radius / scale)
        points[i + 1] = T.apply(durations[i], points[i]) + jumps[i]

    logger.debug(f"Generated {n}-leg pseudo-orbit ({jump_rule.kind.value}, delta={delta:.3g}, seed={seed})")
    return PseudoOrbit(
        points=points,
        durations=durations,
        delta=delta,
        R=R,
        decaying=jump_rule.declares_decay,
        jumps=jumps,
        seed=seed,
    )


def periodic_chain(
    x0: VectorLike,
    t_star: float,
    n: int,
    delta: float = 0.0,
    R: Optional[float] = None,
) -> PseudoOrbit:
    """The constant sequence (x_i, t_i) = (x₀, t_star)."""
    x = as_vector(x0)
    R = float(t_star) if R is None else float(R)
    if t_star < R:
        raise InvalidParameterError(f"t_star={t_star} is below R={R}")
    return PseudoOrbit(points=np.tile(x, (n + 1, 1)), durations=np.full(n, float(t_star)), delta=delta, R=R)


def evaluate_star(p: PseudoOrbit, T: Semigroup, t: float) -> np.ndarray:
    """x₀*t = T(t - t̂_i)x_i on the leg containing t."""
    i = p.leg_index(t)
    return T.apply(t - p.start_times[i], p.points[i])


def left_limit(p: PseudoOrbit, T: Semigroup, i: int) -> np.ndarray:
    """lim_{t ↑ t̂_i} x₀*t = T(t_{i-1})x_{i-1}, for 1 ≤ i ≤ n."""
    if not 1 <= i <= p.n_legs:
        raise InvalidParameterError(f"Leg boundary {i} outside 1..{p.n_legs}")
    return T.apply(p.durations[i - 1], p.points[i - 1])


def project_pseudo_orbit(p: PseudoOrbit, projection: np.ndarray) -> PseudoOrbit:
    """Component pseudo-orbit (P x_i, t_i) with projected jumps."""
    P = np.asarray(projection, dtype=complex)
    return PseudoOrbit(
        points=p.points @ P.T,
        durations=p.durations,
        delta=p.delta,
        R=p.R,
        decaying=p.decaying,
        jumps=p.jumps @ P.T if p.jumps is not None else None,
        seed=p.seed,
    )


def dump_pseudo_orbit(p: PseudoOrbit) -> Dict[str, Any]:
    record = PseudoOrbitRecord(
        points=[vector_to_json(x) for x in p.points],
        durations=[float(t) for t in p.durations],
        delta=p.delta,
        R=p.R,
        decaying=p.decaying,
        seed=p.seed,
        jumps=[vector_to_json(h) for h in p.jumps] if p.jumps is not None else None,
    )
    return record.to_json_dict()


def load_pseudo_orbit(doc: Union[str, Dict[str, Any]]) -> PseudoOrbit:
    """Parse the JSON layout (a document string or an already-decoded dict)."""
    try:
        data = json.loads(doc) if isinstance(doc, str) else doc
        record = PseudoOrbitRecord.model_validate(data)
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidPseudoOrbitError(f"Malformed pseudo-orbit document: {e}") from e
    return PseudoOrbit(
        points=np.array([vector_from_json(x) for x in record.points]),
        durations=np.array(record.durations),
        delta=record.delta,
        R=record.R,
        decaying=record.decaying,
        jumps=np.array([vector_from_json(h) for h in record.jumps]) if record.jumps is not None else None,
        seed=record.seed,
    )
