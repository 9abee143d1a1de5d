"""
Shadowing certificates and contraction traces.

A certificate records the error ‖T(t)x - x₀*t‖ of a candidate shadow point x
at sampled times, the sup over all samples, the sup over the last quarter of
samples (the finite-horizon stand-in for the limit), and pass flags.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..utils.constants import DEFAULT_TAIL_TOL
from ..utils.serialization import json_float, vector_to_json


class ShadowMethod(str, Enum):
    """How the shadow point was obtained."""

    STABLE = "stable"
    UNSTABLE_SERIES = "unstable_series"
    HYPERBOLIC_COMBINED = "hyperbolic_combined"
    ORACLE = "oracle"
    VERIFIED = "verified"


def tail_slice(n_samples: int) -> slice:
    """Indices of the last quarter of n_samples time-ordered samples."""
    start = min(int(np.floor(0.75 * n_samples)), max(n_samples - 1, 0))
    return slice(start, n_samples)


@dataclass
class ShadowCertificate:
    """Per-sample error trace of a shadow point and the derived pass flags."""

    method: ShadowMethod
    epsilon: float
    shadow_point: np.ndarray
    sample_times: np.ndarray
    errors: np.ndarray
    sup_error: float
    tail_sup: float
    pass_eps: bool
    pass_limit: bool
    decaying_input: bool = False
    norm: str = "euclidean"
    error_bound: Optional[float] = None
    limit_bound: Optional[float] = None
    series_terms: Optional[int] = None
    tail_cut: Optional[int] = None
    truncation_bound: Optional[float] = None
    ambient_errors: Optional[np.ndarray] = None
    ambient_sup_error: Optional[float] = None
    lsq_sup_error: Optional[float] = None
    rank_deficient: bool = False
    notes: List[str] = field(default_factory=list)

    @classmethod
    def from_trace(
        cls,
        method: ShadowMethod,
        epsilon: float,
        shadow_point: np.ndarray,
        sample_times: np.ndarray,
        errors: np.ndarray,
        decaying_input: bool,
        limit_bound: Optional[float] = None,
        tail_tol: float = DEFAULT_TAIL_TOL,
        **extra: Any,
    ) -> "ShadowCertificate":
        """Sort the trace by time and derive sup, tail and pass flags."""
        sample_times = np.asarray(sample_times, dtype=float)
        errors = np.asarray(errors, dtype=float)
        order = np.argsort(sample_times, kind="stable")
        sample_times = sample_times[order]
        errors = errors[order]
        ambient = extra.pop("ambient_errors", None)
        if ambient is not None:
            ambient = np.asarray(ambient, dtype=float)[order]
            extra["ambient_sup_error"] = float(ambient.max()) if ambient.size else 0.0

        sup_error = float(errors.max()) if errors.size else 0.0
        tail_sup = float(errors[tail_slice(errors.size)].max()) if errors.size else 0.0

        # Without a solver bound the tail must fall an order of magnitude below the sup.
        tail_allowance = limit_bound if limit_bound is not None else sup_error / 10.0
        pass_limit = bool(decaying_input and tail_sup <= max(tail_tol, tail_allowance))

        return cls(
            method=method,
            epsilon=float(epsilon),
            shadow_point=np.asarray(shadow_point, dtype=complex),
            sample_times=sample_times,
            errors=errors,
            sup_error=sup_error,
            tail_sup=tail_sup,
            pass_eps=bool(sup_error <= epsilon),
            pass_limit=pass_limit,
            decaying_input=decaying_input,
            limit_bound=limit_bound,
            ambient_errors=ambient,
            **extra,
        )

    def trace_frame(self) -> pd.DataFrame:
        """Plot-ready (t, err) table."""
        return pd.DataFrame({"t": self.sample_times, "err": self.errors})

    def to_report(self) -> Dict[str, Any]:
        report: Dict[str, Any] = {
            "method": self.method.value,
            "epsilon": self.epsilon,
            "sup_error": json_float(self.sup_error),
            "tail_sup": json_float(self.tail_sup),
            "pass_eps": self.pass_eps,
            "pass_limit": self.pass_limit,
            "decaying_input": self.decaying_input,
            "norm": self.norm,
            "shadow_point": vector_to_json(self.shadow_point),
            "samples": [[float(t), json_float(e)] for t, e in zip(self.sample_times, self.errors)],
        }
        optional = {
            "error_bound": self.error_bound,
            "limit_bound": self.limit_bound,
            "series_terms": self.series_terms,
            "tail_cut": self.tail_cut,
            "truncation_bound": self.truncation_bound,
            "ambient_sup_error": self.ambient_sup_error,
            "lsq_sup_error": self.lsq_sup_error,
        }
        for key, value in optional.items():
            if value is not None:
                report[key] = json_float(value) if isinstance(value, float) else value
        if self.rank_deficient:
            report["rank_deficient"] = True
        if self.notes:
            report["notes"] = list(self.notes)
        return report


@dataclass
class ContractionTrace:
    """Iterates of the shift map Γ on the finite sequence space."""

    distances: np.ndarray
    ratios: np.ndarray
    limit_sequence: np.ndarray
    contraction_factor: float
    fixed_point_residual: float
    stays_in_ball: bool
    converged: bool

    def to_report(self) -> Dict[str, Any]:
        return {
            "distances": [json_float(d) for d in self.distances],
            "ratios": [json_float(r) for r in self.ratios],
            "contraction_factor": self.contraction_factor,
            "fixed_point_residual": json_float(self.fixed_point_residual),
            "stays_in_ball": self.stays_in_ball,
            "converged": self.converged,
        }
