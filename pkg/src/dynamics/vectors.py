"""
Vector helpers: complex embedding, the Hermitian norm and the max-coupled norm
across a splitting.
"""

from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from ..exceptions import DimensionMismatchError
from ..models.splitting import HyperbolicSplitting

VectorLike = Union[np.ndarray, Sequence[complex], Sequence[float], complex, float]


def as_vector(x: VectorLike, dim: Optional[int] = None) -> np.ndarray:
    """Embed real or complex input as a 1-D complex128 array."""
    v = np.atleast_1d(np.asarray(x, dtype=complex))
    if v.ndim != 1:
        raise DimensionMismatchError(f"Expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"Expected dimension {dim}, got {v.shape[0]}")
    return v


def norm(x: VectorLike) -> float:
    """Euclidean (Hermitian) norm."""
    return float(linalg.norm(as_vector(x)))


def coupled_norm(x: VectorLike, split: HyperbolicSplitting) -> float:
    """max(‖P_M x‖, ‖P_N x‖)."""
    v = as_vector(x, dim=split.dim)
    return max(float(linalg.norm(split.P_M @ v)), float(linalg.norm(split.P_N @ v)))


def norm_equivalence_constant(split: HyperbolicSplitting) -> float:
    """c with c⁻¹·coupled_norm ≤ norm ≤ c·coupled_norm."""
    return max(1.0, float(linalg.norm(split.P_M, 2) + linalg.norm(split.P_N, 2)))


def random_unit_vectors(
    rng: np.random.Generator, count: int, dim: int, real: bool = False
) -> np.ndarray:
    """Rows uniformly distributed on the unit sphere of R^dim or C^dim."""
    samples = rng.standard_normal((count, dim)).astype(complex)
    if not real:
        samples = samples + 1j * rng.standard_normal((count, dim))
    norms = np.linalg.norm(samples, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return samples / norms
