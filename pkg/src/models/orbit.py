"""
Pseudo-orbit models.

A (δ, R)-pseudo-orbit is a list of points x_0..x_n with durations t_i ≥ R
whose jumps h_i = x_{i+1} - T(t_i)x_i stay below δ. The records here are
immutable; construction and validation live in ``src.shadowing.pseudo_orbit``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..exceptions import DimensionMismatchError, InvalidParameterError, OutOfRangeError
from ..utils.serialization import ComplexPair


class JumpKind(str, Enum):
    """Jump-size profiles for generated pseudo-orbits."""

    CONSTANT = "constant"
    DECAYING = "decaying"
    ZERO = "zero"


class JumpRule(BaseModel):
    """How the generator draws the jump h_i at each step."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: JumpKind = Field(JumpKind.CONSTANT, description="Jump-size profile")
    delta: float = Field(0.0, ge=0, description="Jump norm at step 0")
    rho: float = Field(0.5, gt=0, lt=1, description="Geometric ratio for decaying jumps")
    direction: Optional[List[Union[float, List[float]]]] = Field(
        None, description="Fixed jump direction; random on the sphere when omitted"
    )
    real: bool = Field(False, description="Draw real directions instead of complex ones")

    def radius(self, i: int) -> float:
        """Jump norm at step i."""
        if self.kind == JumpKind.ZERO:
            return 0.0
        if self.kind == JumpKind.DECAYING:
            return self.delta * self.rho**i
        return self.delta

    @property
    def declares_decay(self) -> bool:
        return self.kind in (JumpKind.DECAYING, JumpKind.ZERO)


class ValidationReport(BaseModel):
    """Outcome of checking a pseudo-orbit against its declared (δ, R)."""

    valid: bool = Field(..., description="All invariants hold")
    delta: float = Field(..., description="Declared jump bound")
    R: float = Field(..., description="Declared minimum duration")
    delta_actual: float = Field(0.0, description="Largest jump norm found")
    min_duration: float = Field(0.0, description="Smallest duration found")
    worst_jump_index: Optional[int] = Field(None, description="Index of the largest jump")
    jump_violations: List[int] = Field(default_factory=list)
    duration_violations: List[int] = Field(default_factory=list)
    off_grid: List[int] = Field(default_factory=list)
    consistency_residual: float = Field(
        0.0, description="Relative gap between recorded and recomputed jumps"
    )
    decaying_declared: bool = False
    decaying_ok: Optional[bool] = None
    messages: List[str] = Field(default_factory=list)


@dataclass(frozen=True)
class PseudoOrbit:
    """Points, durations and (optionally) the jumps recorded by the generator."""

    points: np.ndarray
    durations: np.ndarray
    delta: float
    R: float
    decaying: bool = False
    jumps: Optional[np.ndarray] = None
    seed: Optional[int] = None
    start_times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        points = np.atleast_2d(np.array(self.points, dtype=complex))
        durations = np.array(self.durations, dtype=float).ravel()
        if points.shape[0] != durations.shape[0] + 1:
            raise DimensionMismatchError(
                f"{points.shape[0]} points need {points.shape[0] - 1} durations, "
                f"got {durations.shape[0]}"
            )
        if durations.shape[0] == 0:
            raise InvalidParameterError("A pseudo-orbit needs at least one leg")
        if np.any(durations <= 0):
            raise InvalidParameterError("Durations must be positive")
        if self.delta < 0 or self.R <= 0:
            raise InvalidParameterError(f"Need delta >= 0 and R > 0, got {self.delta}, {self.R}")

        jumps = None
        if self.jumps is not None:
            jumps = np.atleast_2d(np.array(self.jumps, dtype=complex))
            if jumps.shape != (durations.shape[0], points.shape[1]):
                raise DimensionMismatchError(
                    f"Jumps of shape {jumps.shape} do not match {durations.shape[0]} legs "
                    f"in dimension {points.shape[1]}"
                )
            jumps.setflags(write=False)

        start_times = np.concatenate(([0.0], np.cumsum(durations)))
        for arr in (points, durations, start_times):
            arr.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "start_times", start_times)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "R", float(self.R))

    @property
    def n_legs(self) -> int:
        return int(self.durations.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def horizon(self) -> float:
        """t̂_n, the end of the last leg."""
        return float(self.start_times[-1])

    @property
    def x0(self) -> np.ndarray:
        return self.points[0]

    def leg_index(self, t: float) -> int:
        """Unique i with t̂_i ≤ t < t̂_{i+1} (binary search)."""
        if t < 0 or t >= self.horizon:
            raise OutOfRangeError(f"t={t} outside [0, {self.horizon})")
        return int(np.searchsorted(self.start_times, t, side="right") - 1)


class PseudoOrbitRecord(BaseModel):
    """JSON layout of a pseudo-orbit."""

    model_config = ConfigDict(extra="forbid")

    points: List[List[ComplexPair]]
    durations: List[float]
    delta: float = Field(..., ge=0)
    R: float = Field(..., gt=0)
    decaying: bool = False
    seed: Optional[int] = None
    jumps: Optional[List[List[ComplexPair]]] = None

    @model_validator(mode="after")
    def check_lengths(self) -> "PseudoOrbitRecord":
        if len(self.points) != len(self.durations) + 1:
            raise ValueError("points must have exactly one more entry than durations")
        if self.jumps is not None and len(self.jumps) != len(self.durations):
            raise ValueError("jumps must have one entry per duration")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)
