"""
Semigroup abstraction.

A ``Semigroup`` evaluates t ↦ T(t)x for t ≥ 0, optionally with an inverse
action and an optional time grid (lattice models are only defined at integer
multiples of the step h). ``MatrixSemigroup`` realises T(t) = e^{tA} for a
dense complex generator, caching an eigendecomposition or, for
ill-conditioned or defective generators, a complex Schur form.
"""

import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from .vectors import VectorLike, as_vector
from ..exceptions import (
    DimensionMismatchError,
    EigFailureError,
    NegativeTimeError,
    NotInvertibleError,
    OffGridError,
)
from ..models.bounds import RateBound
from ..utils.constants import DEFAULT_GRID_TOL, EIG_CONDITION_LIMIT


class Semigroup(ABC):
    """A strongly continuous family of bounded linear maps T(t), t ≥ 0."""

    def __init__(
        self,
        dim: int,
        name: str,
        time_grid: Optional[float] = None,
        known_bound: Optional[RateBound] = None,
        grid_tol: float = DEFAULT_GRID_TOL,
    ):
        if dim < 1:
            raise DimensionMismatchError(f"Dimension must be positive, got {dim}")
        self.dim = int(dim)
        self.name = name
        self.time_grid = float(time_grid) if time_grid is not None else None
        self.known_bound = known_bound
        self.grid_tol = grid_tol

    @property
    def generator(self) -> Optional[np.ndarray]:
        return None

    @property
    def invertible(self) -> bool:
        return False

    def resolve_time(self, t: float) -> Tuple[float, Optional[int]]:
        """Validate t and return it with its lattice step count (None off-lattice)."""
        t = float(t)
        if t < 0:
            if t < -self.grid_tol:
                raise NegativeTimeError(f"T(t) needs t >= 0, got {t}")
            t = 0.0
        if self.time_grid is None:
            return t, None
        k = t / self.time_grid
        steps = int(round(k))
        if abs(k - steps) > self.grid_tol * max(1.0, abs(k)):
            raise OffGridError(f"t={t} is not a multiple of the time grid h={self.time_grid}")
        return steps * self.time_grid, steps

    def is_on_grid(self, t: float) -> bool:
        try:
            self.resolve_time(t)
        except OffGridError:
            return False
        return True

    def snap_up(self, t: float) -> float:
        """Smallest lattice time ≥ t (t itself without a grid)."""
        if self.time_grid is None:
            return float(t)
        k = t / self.time_grid
        steps = int(math.ceil(k - self.grid_tol * max(1.0, abs(k))))
        return max(steps, 0) * self.time_grid

    def apply(self, t: float, x: VectorLike) -> np.ndarray:
        t, steps = self.resolve_time(t)
        return self._apply(t, steps, as_vector(x, dim=self.dim))

    def apply_inverse(self, t: float, x: VectorLike) -> np.ndarray:
        if not self.invertible:
            raise NotInvertibleError(f"{self.name} has no inverse action")
        t, steps = self.resolve_time(t)
        return self._apply_inverse(t, steps, as_vector(x, dim=self.dim))

    def apply_many(self, times: Sequence[float], x: VectorLike) -> np.ndarray:
        """Rows T(t_j)x for every t_j in times."""
        v = as_vector(x, dim=self.dim)
        return np.array([self.apply(t, v) for t in times], dtype=complex).reshape(-1, self.dim)

    def matrix(self, t: float) -> np.ndarray:
        """Explicit matrix of T(t)."""
        t, steps = self.resolve_time(t)
        eye = np.eye(self.dim, dtype=complex)
        return np.column_stack([self._apply(t, steps, eye[:, j]) for j in range(self.dim)])

    def inverse_matrix(self, t: float) -> np.ndarray:
        if not self.invertible:
            raise NotInvertibleError(f"{self.name} has no inverse action")
        t, steps = self.resolve_time(t)
        eye = np.eye(self.dim, dtype=complex)
        return np.column_stack([self._apply_inverse(t, steps, eye[:, j]) for j in range(self.dim)])

    @abstractmethod
    def _apply(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        """T(t)x for an already validated time."""

    def _apply_inverse(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        raise NotInvertibleError(f"{self.name} has no inverse action")

    def __repr__(self) -> str:
        grid = f", h={self.time_grid}" if self.time_grid is not None else ""
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim}{grid})"


class MatrixSemigroup(Semigroup):
    """T(t) = e^{tA} for a dense complex generator A."""

    def __init__(
        self,
        generator: np.ndarray,
        name: str = "matrix",
        known_bound: Optional[RateBound] = None,
        cond_limit: float = EIG_CONDITION_LIMIT,
    ):
        A = np.atleast_2d(np.asarray(generator, dtype=complex))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(f"Generator must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise EigFailureError("Generator has non-finite entries")
        super().__init__(A.shape[0], name=name, known_bound=known_bound)
        self._A = A
        A.setflags(write=False)

        scale = float(np.max(np.abs(A))) if A.size else 0.0
        hermitian = np.allclose(A, A.conj().T, rtol=0.0, atol=1e-14 * max(scale, 1.0))
        try:
            if hermitian:
                w, V = linalg.eigh(A)
                self._method = "eigh"
                self._eigenvalues = w.astype(complex)
                self._V, self._Vinv = V.astype(complex), V.conj().T.astype(complex)
            else:
                w, V = linalg.eig(A)
                cond = np.linalg.cond(V)
                self._eigenvalues = w
                if np.isfinite(cond) and cond < cond_limit:
                    self._method = "eig"
                    self._V, self._Vinv = V, linalg.inv(V)
                else:
                    logger.debug(
                        f"{name}: eigenvector condition {cond:.3g} >= {cond_limit:.0e}, using Schur form"
                    )
                    self._method = "schur"
                    self._T, self._Z = linalg.schur(A, output="complex")
        except (linalg.LinAlgError, ValueError) as e:
            raise EigFailureError(f"Decomposition of {name} generator failed: {e}") from e

        if not np.all(np.isfinite(self._eigenvalues)):
            raise EigFailureError(f"Non-finite eigenvalues for {name}")

    @property
    def generator(self) -> np.ndarray:
        return self._A

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues

    @property
    def method(self) -> str:
        return self._method

    @property
    def invertible(self) -> bool:
        return True

    def propagator(self, t: float) -> np.ndarray:
        """e^{tA}; any real t (the matrix case is a group)."""
        if self._method == "schur":
            return self._Z @ linalg.expm(t * self._T) @ self._Z.conj().T
        return (self._V * np.exp(t * self._eigenvalues)) @ self._Vinv

    def _apply(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        if t == 0.0:
            return x.copy()
        if self._method == "schur":
            return self.propagator(t) @ x
        return self._V @ (np.exp(t * self._eigenvalues) * (self._Vinv @ x))

    def _apply_inverse(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        if t == 0.0:
            return x.copy()
        if self._method == "schur":
            return self.propagator(-t) @ x
        return self._V @ (np.exp(-t * self._eigenvalues) * (self._Vinv @ x))

    def apply_many(self, times: Sequence[float], x: VectorLike) -> np.ndarray:
        v = as_vector(x, dim=self.dim)
        times = np.array([self.resolve_time(t)[0] for t in times], dtype=float)
        if self._method == "schur":
            return np.array([self.propagator(t) @ v for t in times], dtype=complex).reshape(
                -1, self.dim
            )
        coeffs = self._Vinv @ v
        return (np.exp(np.outer(times, self._eigenvalues)) * coeffs) @ self._V.T

    def matrix(self, t: float) -> np.ndarray:
        t, _ = self.resolve_time(t)
        return self.propagator(t)

    def inverse_matrix(self, t: float) -> np.ndarray:
        t, _ = self.resolve_time(t)
        return self.propagator(-t)


def semigroup_apply(T: Semigroup, t: float, x: VectorLike) -> np.ndarray:
    """T(t)x."""
    return T.apply(t, x)


def operator_norm_estimate(T: Semigroup, t: float) -> float:
    """Largest singular value of the explicit t-map matrix."""
    return float(linalg.svdvals(T.matrix(t))[0])


def inverse_operator_norm_estimate(T: Semigroup, t: float) -> float:
    """Largest singular value of T(t)^{-1}."""
    return float(linalg.svdvals(T.inverse_matrix(t))[0])
