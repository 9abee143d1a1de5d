"""
Experiment configuration for the CLI.

The configuration is a single JSON document with a versioned schema. Unknown
keys are rejected at every level and validation happens before any
computation starts.
"""

import math
from typing import Annotated, List, Literal, Optional, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, field_validator

from .orbit import JumpKind
from ..utils.constants import (
    DEFAULT_CHAIN_TIME_SAMPLES,
    DEFAULT_DECAY_RATIO,
    DEFAULT_ORBIT_LENGTH,
    DEFAULT_PROBE_COUNT,
    DEFAULT_PROBE_TIMES,
    DEFAULT_R_MIN,
    DEFAULT_SAMPLES_PER_LEG,
    DEFAULT_SPLIT_MARGIN,
    DEFAULT_TAIL_TOL,
    SCHEMA_VERSION,
)

ComplexEntry = Union[float, List[float]]

MAX_SEED = 2**64 - 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _nonzero(v: float) -> float:
    if v == 0:
        raise ValueError("theta must be nonzero")
    return v


NonzeroFloat = Annotated[float, AfterValidator(_nonzero)]


class HeatSpec(_Strict):
    """Dirichlet Laplacian on (0, L) with n interior nodes."""

    kind: Literal["heat"] = "heat"
    n: int = Field(32, ge=1, description="Interior grid points")
    L: float = Field(math.pi, gt=0, description="Domain length")


class TransportSpec(_Strict):
    """Damped translation on a periodic ring."""

    kind: Literal["transport"] = "transport"
    theta: NonzeroFloat = Field(1.0, description="Damping rate; negative values expand")
    n: int = Field(64, ge=2, description="Ring size")
    h: float = Field(0.25, gt=0, description="Lattice step and time grid")


class RotationSpec(_Strict):
    """Planar rotation with angular speed theta."""

    kind: Literal["rotation"] = "rotation"
    theta: NonzeroFloat = Field(1.0, description="Angular speed")


class GHShiftSpec(_Strict):
    """Weighted shift on the window {-m, ..., m}."""

    kind: Literal["gh_shift"] = "gh_shift"
    m: int = Field(32, ge=4, description="Half-width of the index window")
    h: float = Field(0.5, gt=0, description="Lattice step and time grid")
    convention: Optional[Literal["exp_abs", "exp_neg_abs"]] = Field(
        None, description="Weight convention; resolved empirically when omitted"
    )


class MatrixSpec(_Strict):
    """Arbitrary dense generator; entries are numbers or [re, im] pairs."""

    kind: Literal["matrix"] = "matrix"
    generator: List[List[ComplexEntry]] = Field(
        default_factory=lambda: [[-1.0, 0.0], [0.0, 2.0]], description="Generator rows"
    )


class ScalarSpec(_Strict):
    """T(t)x = e^{at}x on a one-dimensional space."""

    kind: Literal["scalar"] = "scalar"
    rate: float = Field(-1.0, description="Exponent a")


class TrivialSpec(_Strict):
    """T(t) = I."""

    kind: Literal["trivial"] = "trivial"
    dim: int = Field(2, ge=1)


ModelSpec = Annotated[
    Union[HeatSpec, TransportSpec, RotationSpec, GHShiftSpec, MatrixSpec, ScalarSpec, TrivialSpec],
    Field(discriminator="kind"),
]


class GridSpec(_Strict):
    """Finite node set for chain-recurrence graphs."""

    kind: Literal["box", "circle"] = "box"
    lower: float = -1.0
    upper: float = 1.0
    step: float = Field(0.1, gt=0)
    radius: float = Field(1.0, gt=0)
    count: int = Field(36, ge=3)


class ChainSpec(_Strict):
    grid: GridSpec = Field(default_factory=GridSpec)
    delta: float = Field(0.02, gt=0)
    R: float = Field(1.0, gt=0)
    t_max: float = Field(10.0, gt=0)
    n_times: int = Field(DEFAULT_CHAIN_TIME_SAMPLES, ge=1)


class ProbeSpec(_Strict):
    """Nonwandering probe around one point."""

    point: Optional[List[ComplexEntry]] = None
    epsilon_nbhd: float = Field(0.1, gt=0)
    R: float = Field(1.0, gt=0)
    t_max: float = Field(10.0, gt=0)
    n_probe: int = Field(DEFAULT_PROBE_COUNT, ge=1)
    n_times: int = Field(DEFAULT_PROBE_TIMES, ge=1)


class DriftSpec(_Strict):
    """Parameters of the drifting pseudo-orbit demos."""

    epsilon: float = Field(0.1, gt=0)
    delta_prime: float = Field(0.01, ge=0)
    m: int = Field(30, ge=1)


class GHDemoSpec(_Strict):
    support_j: Optional[int] = 4
    delta: float = Field(0.05, gt=0)
    R: float = Field(1.0, gt=0)


class ExperimentConfig(_Strict):
    """Everything one CLI invocation needs; embedded verbatim in the report."""

    schema_version: Literal["1.0"] = SCHEMA_VERSION
    model: ModelSpec = Field(default_factory=MatrixSpec)
    epsilon: float = Field(1e-2, gt=0, description="Shadowing accuracy")
    orbit_length: int = Field(DEFAULT_ORBIT_LENGTH, ge=1, description="Number of legs")
    jump_kind: JumpKind = Field(JumpKind.DECAYING, description="Jump profile of the generator")
    jump_rho: float = Field(DEFAULT_DECAY_RATIO, gt=0, lt=1)
    jump_scale: float = Field(1.0, gt=0, le=1, description="Jump size as a fraction of δ")
    seed: int = Field(0, ge=0, le=MAX_SEED)
    x0: Optional[List[ComplexEntry]] = Field(None, description="Start point; random when omitted")
    duration: Optional[float] = Field(None, gt=0, description="Leg duration; R when omitted")
    r_min: float = Field(DEFAULT_R_MIN, gt=0)
    samples_per_leg: int = Field(DEFAULT_SAMPLES_PER_LEG, ge=1)
    margin: float = Field(DEFAULT_SPLIT_MARGIN, gt=0, lt=1)
    horizon: Optional[float] = Field(None, gt=0)
    tail_tol: float = Field(DEFAULT_TAIL_TOL, gt=0)
    omega_max: float = Field(100.0, gt=0)
    omega_samples: int = Field(201, ge=3)
    chain: ChainSpec = Field(default_factory=ChainSpec)
    probe: ProbeSpec = Field(default_factory=ProbeSpec)
    drift: DriftSpec = Field(default_factory=DriftSpec)
    gh_demo: GHDemoSpec = Field(default_factory=GHDemoSpec)
    output_dir: Optional[str] = None

    @field_validator("schema_version", mode="before")
    @classmethod
    def known_schema(cls, v: str) -> str:
        if v != SCHEMA_VERSION:
            raise ValueError(f"Unsupported schema_version {v!r}; expected {SCHEMA_VERSION!r}")
        return v
