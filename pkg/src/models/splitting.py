"""
Spectral records: hyperbolicity test results, spectral-condition sweeps and the
stable/unstable splitting X = M ⊕ N with its decay constants.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np
from scipy import linalg

from .bounds import BoundDirection, RateBound
from ..utils.serialization import json_float, matrix_to_json, vector_to_json


@dataclass(frozen=True)
class HyperbolicityReport:
    """σ(T(1)) against the unit circle."""

    hyperbolic: bool
    gap: float
    time_one_spectrum: np.ndarray
    source: str = "generator"

    def to_report(self) -> Dict[str, Any]:
        return {
            "hyperbolic": self.hyperbolic,
            "gap": json_float(self.gap),
            "time_one_spectrum": vector_to_json(self.time_one_spectrum),
            "source": self.source,
        }


@dataclass(frozen=True)
class SpectralReport:
    """Imaginary-axis test and sampled resolvent sweep for a generator."""

    no_imaginary_spectrum: bool
    resolvent_sup: float
    min_abs_real_part: float
    omegas: np.ndarray
    resolvent_norms: np.ndarray
    argmax_omega: float

    def to_report(self) -> Dict[str, Any]:
        return {
            "no_imaginary_spectrum": self.no_imaginary_spectrum,
            "resolvent_sup": json_float(self.resolvent_sup),
            "min_abs_real_part": json_float(self.min_abs_real_part),
            "argmax_omega": self.argmax_omega,
            "sweep": [[float(w), json_float(r)] for w, r in zip(self.omegas, self.resolvent_norms)],
        }


@dataclass(frozen=True)
class HyperbolicSplitting:
    """
    Spectral projections onto M (Re σ < 0) and N (Re σ > 0) with the
    certified constants of ‖T(t)|_M‖ ≤ K_M e^{-λ_M t} and
    ‖(T(t)|_N)^{-1}‖ ≤ K_N e^{-λ_N t}.

    The restricted generators live in bases Q_M, Q_N (columns) with left
    coefficient rows W_M, W_N, so that P_M = Q_M W_M and P_N = Q_N W_N.
    """

    P_M: np.ndarray
    P_N: np.ndarray
    K_M: float
    lam_M: float
    K_N: float
    lam_N: float
    gap: float
    margin: float
    horizon: float
    basis_M: np.ndarray
    coef_M: np.ndarray
    gen_M: np.ndarray
    basis_N: np.ndarray
    coef_N: np.ndarray
    gen_N: np.ndarray
    certification: str = "empirical"
    notes: List[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return int(self.P_M.shape[0])

    @property
    def stable_dim(self) -> int:
        return int(self.basis_M.shape[1])

    @property
    def unstable_dim(self) -> int:
        return int(self.basis_N.shape[1])

    def project_m(self, x: np.ndarray) -> np.ndarray:
        return self.P_M @ x

    def project_n(self, x: np.ndarray) -> np.ndarray:
        return self.P_N @ x

    def stable_propagator(self, t: float) -> np.ndarray:
        """T(t)P_M for t ≥ 0, evaluated on M only."""
        if self.stable_dim == 0:
            return np.zeros_like(self.P_M)
        return self.basis_M @ linalg.expm(t * self.gen_M) @ self.coef_M

    def unstable_propagator(self, t: float) -> np.ndarray:
        """T(t)P_N, forward on N."""
        if self.unstable_dim == 0:
            return np.zeros_like(self.P_N)
        return self.basis_N @ linalg.expm(t * self.gen_N) @ self.coef_N

    def unstable_inverse_propagator(self, t: float) -> np.ndarray:
        """(T(t)|_N)^{-1}P_N for t ≥ 0."""
        if self.unstable_dim == 0:
            return np.zeros_like(self.P_N)
        return self.basis_N @ linalg.expm(-t * self.gen_N) @ self.coef_N

    def stable_bound(self) -> RateBound:
        return RateBound(K=self.K_M, rate=self.lam_M, direction=BoundDirection.FORWARD_CONTRACTION)

    def unstable_bound(self) -> RateBound:
        return RateBound(K=self.K_N, rate=self.lam_N, direction=BoundDirection.INVERSE_CONTRACTION)

    def summary(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "stable_dim": self.stable_dim,
            "unstable_dim": self.unstable_dim,
            "K_M": self.K_M,
            "lambda_M": self.lam_M,
            "K_N": self.K_N,
            "lambda_N": self.lam_N,
            "gap": json_float(self.gap),
            "margin": self.margin,
            "horizon": self.horizon,
            "certification": self.certification,
            "P_M": matrix_to_json(self.P_M),
            "P_N": matrix_to_json(self.P_N),
            "notes": list(self.notes),
        }
