"""
Reference integration of u' = Au by classical RK4 with step doubling.

Each step is taken once with size h and twice with size h/2; the difference
estimates the local error, drives the step-size controller and, through
Richardson extrapolation, lifts the accepted value to fifth order. Used as an
independent cross-check of ``MatrixSemigroup`` exponentials.
"""

import numpy as np
from scipy import linalg

from .semigroup import MatrixSemigroup
from .vectors import VectorLike, as_vector
from ..exceptions import DimensionMismatchError, NegativeTimeError


def _rk4_step(A: np.ndarray, y: np.ndarray, h: float) -> np.ndarray:
    k1 = A @ y
    k2 = A @ (y + 0.5 * h * k1)
    k3 = A @ (y + 0.5 * h * k2)
    k4 = A @ (y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_doubling_propagate(
    A: np.ndarray,
    x: VectorLike,
    t: float,
    rtol: float = 1e-13,
    atol: float = 1e-15,
    max_steps: int = 1_000_000,
) -> np.ndarray:
    """Approximate e^{tA}x for t ≥ 0."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    y = as_vector(x)
    if A.shape != (y.shape[0], y.shape[0]):
        raise DimensionMismatchError(f"Generator {A.shape} does not act on dimension {y.shape[0]}")
    if t < 0:
        raise NegativeTimeError(f"Integration needs t >= 0, got {t}")
    if t == 0:
        return y.copy()

    scale = max(float(linalg.norm(A, 1)), 1e-12)
    h = min(t, 0.05 / scale)
    elapsed = 0.0
    for _ in range(max_steps):
        if elapsed >= t:
            break
        h = min(h, t - elapsed)
        full = _rk4_step(A, y, h)
        half = _rk4_step(A, _rk4_step(A, y, 0.5 * h), 0.5 * h)
        err = float(linalg.norm(half - full)) / 15.0
        tol = atol + rtol * float(linalg.norm(half))
        if err <= tol:
            y = half + (half - full) / 15.0
            elapsed += h
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        h *= factor
    return y


def crosscheck_exponential(T: MatrixSemigroup, t: float, x: VectorLike) -> float:
    """Relative gap between T.apply(t, x) and the step-doubling reference."""
    reference = step_doubling_propagate(T.generator, x, t)
    gap = float(linalg.norm(T.apply(t, x) - reference))
    return gap / max(float(linalg.norm(reference)), np.finfo(float).tiny)
