"""
Independent oracle: the best shadow point over a finite sample set.

Writing x = x₀ + z, the error at t on leg i is T(t)z + T(s)e_i with
e_i = T(t̂_i)x₀ - x_i, which is affine in z. The least-squares minimiser is
refined by the convex minimax problem
    minimise τ  subject to  τ² ≥ ‖T(t)z - b(t)‖²  at every sample,
and the smaller of the two sup errors is reported.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import linalg, optimize

from ..dynamics.semigroup import Semigroup
from ..dynamics.vectors import VectorLike, as_vector
from ..exceptions import RankDeficientError
from ..models.certificate import ShadowCertificate, ShadowMethod
from ..models.orbit import PseudoOrbit
from ..utils.constants import DEFAULT_SAMPLES_PER_LEG, DEFAULT_TAIL_TOL
from .pseudo_orbit import resolve_jumps
from .verifier import forward_offsets, leg_sample_offsets


def _sample_plan(
    p: PseudoOrbit, T: Semigroup, sample_times: Optional[Sequence[float]], n_per_leg: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Absolute times, leg indices and elapsed times of every sample."""
    if sample_times is None:
        legs, elapsed = [], []
        for i in range(p.n_legs):
            s = leg_sample_offsets(T, p.durations[i], n_per_leg)
            legs.append(np.full(s.size, i))
            elapsed.append(s)
        legs_arr, elapsed_arr = np.concatenate(legs), np.concatenate(elapsed)
        return p.start_times[legs_arr] + elapsed_arr, legs_arr, elapsed_arr
    times = np.sort(np.asarray(sample_times, dtype=float))
    legs_arr = np.array([p.leg_index(t) for t in times])
    return times, legs_arr, times - p.start_times[legs_arr]


def _minimax_refine(
    blocks: np.ndarray, rhs: np.ndarray, z0: np.ndarray, tau0: float, max_iter: int
) -> Optional[np.ndarray]:
    """SLSQP on the epigraph form; None when the solver fails."""
    dim = z0.size

    def unpack(w: np.ndarray) -> np.ndarray:
        return w[:dim] + 1j * w[dim : 2 * dim]

    def residuals(w: np.ndarray) -> np.ndarray:
        return np.einsum("kij,j->ki", blocks, unpack(w)) - rhs

    def constraint(w: np.ndarray) -> np.ndarray:
        r = residuals(w)
        return w[-1] ** 2 - np.sum(np.abs(r) ** 2, axis=1)

    def constraint_jac(w: np.ndarray) -> np.ndarray:
        r = residuals(w)
        g = np.einsum("kij,ki->kj", blocks.conj(), r)
        jac = np.empty((rhs.shape[0], w.size))
        jac[:, :dim] = -2.0 * g.real
        jac[:, dim : 2 * dim] = -2.0 * g.imag
        jac[:, -1] = 2.0 * w[-1]
        return jac

    w0 = np.concatenate((z0.real, z0.imag, [tau0]))
    objective_grad = np.zeros(w0.size)
    objective_grad[-1] = 1.0
    result = optimize.minimize(
        lambda w: w[-1],
        w0,
        jac=lambda w: objective_grad,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": constraint, "jac": constraint_jac}],
        bounds=[(None, None)] * (2 * dim) + [(0.0, None)],
        options={"maxiter": max_iter, "ftol": 1e-14},
    )
    if not np.all(np.isfinite(result.x)):
        return None
    if not result.success:
        logger.debug(f"Minimax refinement stopped early: {result.message}")
    return unpack(result.x)


def brute_force_shadow(
    p: PseudoOrbit,
    T: Semigroup,
    sample_times: Optional[Sequence[float]] = None,
    epsilon: float = math.inf,
    n_samples_per_leg: int = DEFAULT_SAMPLES_PER_LEG,
    refine: bool = True,
    strict: bool = False,
    max_iter: int = 200,
    tail_tol: float = DEFAULT_TAIL_TOL,
    warm_starts: Sequence[VectorLike] = (),
) -> ShadowCertificate:
    """
    Least-squares shadow point over the samples, optionally minimax-refined.

    ``warm_starts`` are candidate shadow points; the refinement starts from
    whichever of them and the least-squares point has the smallest sup error.
    """
    times, legs, elapsed = _sample_plan(p, T, sample_times, n_samples_per_leg)
    jumps = resolve_jumps(p, T)
    offsets = forward_offsets(p.durations, jumps, np.zeros(p.dim, dtype=complex), T.apply)

    blocks = np.array([T.matrix(t) for t in times])
    rhs = np.array([-T.apply(s, offsets[i]) for i, s in zip(legs, elapsed)])
    z, _, rank, _ = linalg.lstsq(blocks.reshape(-1, p.dim), rhs.reshape(-1))
    rank_deficient = bool(rank < p.dim)
    if rank_deficient:
        message = f"Sample operators have rank {rank} < {p.dim}; reporting the minimum-norm solution"
        if strict:
            raise RankDeficientError(message)
        logger.warning(message)

    def sup_errors(candidate: np.ndarray) -> np.ndarray:
        return np.linalg.norm(np.einsum("kij,j->ki", blocks, candidate) - rhs, axis=1)

    lsq_errors = sup_errors(z)
    lsq_sup = float(lsq_errors.max())
    best, best_errors = z, lsq_errors
    for start in warm_starts:
        candidate = as_vector(start, dim=p.dim) - p.x0
        errors = sup_errors(candidate)
        if errors.max() < best_errors.max():
            best, best_errors = candidate, errors
    best_sup = float(best_errors.max())
    if refine and best_sup > 0:
        refined = _minimax_refine(blocks, rhs, best, best_sup, max_iter)
        if refined is not None:
            refined_errors = sup_errors(refined)
            if refined_errors.max() < best_sup:
                best, best_errors = refined, refined_errors

    certificate = ShadowCertificate.from_trace(
        ShadowMethod.ORACLE,
        epsilon,
        p.x0 + best,
        times,
        best_errors,
        decaying_input=p.decaying,
        tail_tol=tail_tol,
        lsq_sup_error=lsq_sup,
        rank_deficient=rank_deficient,
    )
    logger.info(
        f"Oracle over {times.size} samples: lsq sup {lsq_sup:.3g}, refined sup {certificate.sup_error:.3g}"
    )
    return certificate
