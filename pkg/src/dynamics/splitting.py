"""
Hyperbolicity tests and the stable/unstable splitting.

The splitting is assembled from two ordered complex Schur forms of the
generator: the leading block of the ``lhp``-sorted form spans M and the
leading block of the ``rhp``-sorted form spans N. Decay rates come from the
real parts of σ(A) scaled by a margin < 1; overshoot constants K are the
sampled supremum of ‖T(t)P‖e^{λt} over a finite horizon.
"""

from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from .semigroup import (
    MatrixSemigroup,
    Semigroup,
    inverse_operator_norm_estimate,
    operator_norm_estimate,
)
from ..exceptions import (
    BoundNotCertifiedError,
    DimensionMismatchError,
    EigFailureError,
    InvalidParameterError,
    NotHyperbolicError,
    NotInvertibleError,
    SingularResolventError,
)
from ..models.bounds import RateBound
from ..models.splitting import HyperbolicityReport, HyperbolicSplitting, SpectralReport
from ..utils.constants import (
    DEFAULT_GAP_TOL,
    DEFAULT_HORIZON_FACTOR,
    DEFAULT_K_ROUNDUP,
    DEFAULT_SPECTRAL_TOL,
    DEFAULT_SPLIT_MARGIN,
    DEFAULT_SPLIT_SAMPLES,
)


def _eigvals(A: np.ndarray) -> np.ndarray:
    try:
        w = linalg.eigvals(A)
    except (linalg.LinAlgError, ValueError) as e:
        raise EigFailureError(f"Eigenvalue computation failed: {e}") from e
    if not np.all(np.isfinite(w)):
        raise EigFailureError("Eigenvalue computation returned non-finite values")
    return w


def check_hyperbolic(T: Semigroup, gap_tol: float = DEFAULT_GAP_TOL) -> HyperbolicityReport:
    """
    Distance of σ(T(1)) to the unit circle.

    With a generator, σ(T(1)) = exp(σ(A)). Lattice models without a generator
    use the one-step map T(h): |μ|^{1/h} are the moduli of σ(T(1)).
    """
    if T.generator is not None:
        eig = T.eigenvalues if isinstance(T, MatrixSemigroup) else _eigvals(T.generator)
        spectrum = np.exp(eig)
        moduli = np.exp(eig.real)
        source = "generator"
    elif T.time_grid is not None:
        h = T.time_grid
        mu = _eigvals(T.matrix(h))
        moduli = np.abs(mu) ** (1.0 / h)
        spectrum = moduli * np.exp(1j * np.angle(mu) / h)
        source = "one_step_map"
    else:
        raise InvalidParameterError(f"{T.name} has neither a generator nor a time grid")

    gap = float(np.min(np.abs(moduli - 1.0)))
    return HyperbolicityReport(hyperbolic=gap > gap_tol, gap=gap, time_one_spectrum=spectrum, source=source)


def resolvent_bound(A: np.ndarray, omega: float) -> float:
    """‖(iωI - A)^{-1}‖₂; inf when iω is an eigenvalue."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    smallest = float(linalg.svdvals(1j * omega * np.eye(A.shape[0]) - A)[-1])
    return np.inf if smallest == 0.0 else 1.0 / smallest


def _omega_samples(omega_max: float, n_samples: int) -> np.ndarray:
    k = (n_samples - 1) // 2
    positive = np.logspace(np.log10(omega_max) - 4.0, np.log10(omega_max), k)
    return np.concatenate((-positive[::-1], [0.0], positive))


def check_spectral_condition(
    A: np.ndarray,
    omega_max: float,
    n_samples: int,
    tol: float = DEFAULT_SPECTRAL_TOL,
) -> SpectralReport:
    """σ(A) ∩ iR = ∅ and a sampled sup of the resolvent norm along iR."""
    if n_samples < 3:
        raise InvalidParameterError(f"Need at least 3 frequency samples, got {n_samples}")
    if omega_max <= 0:
        raise InvalidParameterError(f"omega_max must be positive, got {omega_max}")
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    eig = _eigvals(A)
    min_abs_re = float(np.min(np.abs(eig.real)))
    no_imaginary = min_abs_re > tol

    omegas = _omega_samples(omega_max, n_samples)
    norms = np.empty_like(omegas)
    singular_floor = tol * max(1.0, float(linalg.norm(A, 2)))
    for idx, omega in enumerate(omegas):
        smallest = float(linalg.svdvals(1j * omega * np.eye(A.shape[0]) - A)[-1])
        if smallest <= singular_floor:
            if no_imaginary:
                raise SingularResolventError(f"iω with ω={omega:.6g} lies within {tol} of σ(A)")
            norms[idx] = np.inf
        else:
            norms[idx] = 1.0 / smallest

    best = int(np.argmax(norms))
    resolvent_sup = float(norms[best]) if no_imaginary else np.inf
    return SpectralReport(
        no_imaginary_spectrum=no_imaginary,
        resolvent_sup=resolvent_sup,
        min_abs_real_part=min_abs_re,
        omegas=omegas,
        resolvent_norms=norms,
        argmax_omega=float(omegas[best]),
    )


def _invariant_basis(A: np.ndarray, sort: str) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the invariant subspace selected by ``sort`` and A restricted to it."""
    try:
        T, Z, sdim = linalg.schur(A, output="complex", sort=sort)
    except (linalg.LinAlgError, ValueError) as e:
        raise EigFailureError(f"Ordered Schur decomposition failed: {e}") from e
    return Z[:, :sdim], T[:sdim, :sdim]


def _certified_overshoot(values: np.ndarray, roundup: float) -> float:
    """Sampled sup of ‖T(t)P‖e^{λt}; rounded up unless attained at t = 0."""
    peak = int(np.argmax(values))
    sup = float(values[peak])
    if peak > 0:
        sup *= roundup
    return max(sup, 1.0)


def compute_splitting(
    T: MatrixSemigroup,
    horizon: Optional[float] = None,
    margin: float = DEFAULT_SPLIT_MARGIN,
    n_samples: int = DEFAULT_SPLIT_SAMPLES,
    k_roundup: float = DEFAULT_K_ROUNDUP,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> HyperbolicSplitting:
    """M ⊕ N splitting with empirically certified K_M, λ_M, K_N, λ_N."""
    if not 0 < margin < 1:
        raise InvalidParameterError(f"margin must lie in (0, 1), got {margin}")
    A = T.generator
    if A is None:
        raise InvalidParameterError(f"{T.name} has no generator; its split must be declared structurally")

    report = check_hyperbolic(T, gap_tol)
    if not report.hyperbolic:
        raise NotHyperbolicError(f"{T.name}: σ(T(1)) is within {report.gap:.3g} of the unit circle")

    n = A.shape[0]
    basis_M, gen_M = _invariant_basis(A, "lhp")
    basis_N, gen_N = _invariant_basis(A, "rhp")
    if basis_M.shape[1] + basis_N.shape[1] != n:
        raise EigFailureError(
            f"Invariant subspaces of dimension {basis_M.shape[1]} + {basis_N.shape[1]} do not span C^{n}"
        )
    try:
        coefs = linalg.inv(np.hstack((basis_M, basis_N)))
    except linalg.LinAlgError as e:
        raise EigFailureError(f"Stable and unstable subspaces are not complementary: {e}") from e
    k = basis_M.shape[1]
    coef_M, coef_N = coefs[:k], coefs[k:]

    eig = T.eigenvalues
    stable_re = -eig.real[eig.real < 0]
    unstable_re = eig.real[eig.real > 0]
    notes = []
    lam_M = margin * float(stable_re.min()) if stable_re.size else None
    lam_N = margin * float(unstable_re.min()) if unstable_re.size else None
    rates = [r for r in (lam_M, lam_N) if r is not None]
    if horizon is None:
        horizon = DEFAULT_HORIZON_FACTOR / min(rates)

    times = np.linspace(0.0, horizon, n_samples)

    if lam_M is None:
        lam_M, K_M = 1.0, 1.0
        notes.append("M = {0}; K_M, λ_M are placeholders")
    else:
        values = np.array(
            [linalg.svdvals(basis_M @ linalg.expm(t * gen_M) @ coef_M)[0] * np.exp(lam_M * t) for t in times]
        )
        K_M = _certified_overshoot(values, k_roundup)
    if lam_N is None:
        lam_N, K_N = 1.0, 1.0
        notes.append("N = {0}; K_N, λ_N are placeholders")
    else:
        values = np.array(
            [linalg.svdvals(basis_N @ linalg.expm(-t * gen_N) @ coef_N)[0] * np.exp(lam_N * t) for t in times]
        )
        K_N = _certified_overshoot(values, k_roundup)
    notes.append(f"K sampled at {n_samples} times on [0, {horizon:.6g}]")

    split = HyperbolicSplitting(
        P_M=basis_M @ coef_M,
        P_N=basis_N @ coef_N,
        K_M=K_M,
        lam_M=lam_M,
        K_N=K_N,
        lam_N=lam_N,
        gap=report.gap,
        margin=margin,
        horizon=float(horizon),
        basis_M=basis_M,
        coef_M=coef_M,
        gen_M=gen_M,
        basis_N=basis_N,
        coef_N=coef_N,
        gen_N=gen_N,
        notes=notes,
    )
    logger.info(
        f"{T.name}: split dim M={split.stable_dim}, N={split.unstable_dim}, "
        f"K_M={K_M:.4g}, λ_M={lam_M:.4g}, K_N={K_N:.4g}, λ_N={lam_N:.4g}"
    )
    return split


def certify_rate_bound(
    T: Semigroup,
    bound: RateBound,
    horizon: Optional[float] = None,
    n_samples: int = 64,
    rtol: float = 1e-9,
) -> float:
    """
    Check ‖T(t)‖ ≤ K e^{-λt} (or ‖T(t)^{-1}‖ ≤ K e^{-λt}) on sampled times in
    [0, horizon]; returns the largest observed ratio to the bound.
    """
    if horizon is None:
        horizon = max(10.0 / bound.rate, 1.0)
    if T.time_grid is not None:
        h = T.time_grid
        steps = np.unique(np.round(np.linspace(0, int(np.floor(horizon / h + T.grid_tol)), n_samples)))
        times = steps * h
    else:
        times = np.linspace(0.0, horizon, n_samples)

    if not bound.is_forward and not T.invertible:
        raise NotInvertibleError(f"{T.name} has no inverse to bound")
    estimate = operator_norm_estimate if bound.is_forward else inverse_operator_norm_estimate

    worst = 0.0
    for t in times:
        limit = bound.value(float(t))
        observed = estimate(T, float(t))
        worst = max(worst, observed / limit)
        if observed > limit * (1.0 + rtol) + 1e-14:
            raise BoundNotCertifiedError(
                f"{T.name}: norm {observed:.6g} exceeds K e^(-λt) = {limit:.6g} at t={t:.6g} "
                f"({bound.direction.value})"
            )
    logger.debug(f"{T.name}: {bound.direction.value} bound certified, worst ratio {worst:.6f}")
    return worst


def splitting_residuals(
    split: HyperbolicSplitting,
    T: MatrixSemigroup,
    n_samples: int = DEFAULT_SPLIT_SAMPLES,
    commutation_times: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0),
) -> Dict[str, float]:
    """
    Projection algebra and decay residuals of a computed splitting.

    Commutation is measured relative to max(1, ‖T(t)‖); the decay entries are
    the largest ratios of ‖T(t)P_M‖ and ‖(T(t)|_N)^{-1}P_N‖ to their bounds
    over [0, horizon].
    """
    if split.dim != T.dim:
        raise DimensionMismatchError(f"Splitting has dimension {split.dim}, model has {T.dim}")
    eye = np.eye(split.dim)
    P_M, P_N = split.P_M, split.P_N
    commutation = 0.0
    for t in commutation_times:
        E = T.matrix(t)
        scale = max(1.0, float(linalg.norm(E, 2)))
        commutation = max(commutation, float(linalg.norm(P_M @ E - E @ P_M, 2)) / scale)

    times = np.linspace(0.0, split.horizon, n_samples)
    decay_M = max(
        float(linalg.norm(split.stable_propagator(t), 2)) / split.stable_bound().value(t) for t in times
    )
    decay_N = max(
        float(linalg.norm(split.unstable_inverse_propagator(t), 2)) / split.unstable_bound().value(t)
        for t in times
    )
    return {
        "idempotent_M": float(linalg.norm(P_M @ P_M - P_M, 2)),
        "idempotent_N": float(linalg.norm(P_N @ P_N - P_N, 2)),
        "complementary": float(linalg.norm(P_M + P_N - eye, 2)),
        "annihilating": float(linalg.norm(P_M @ P_N, 2)),
        "commutation": commutation,
        "decay_ratio_M": decay_M,
        "decay_ratio_N": decay_N,
    }
