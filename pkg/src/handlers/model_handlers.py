"""Model construction from experiment configs."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from config.settings import Settings
from src.dynamics.semigroup import MatrixSemigroup, Semigroup
from src.dynamics.systems import (
    GHShiftModel,
    make_gh_shift,
    make_heat,
    make_rotation,
    make_scalar,
    make_transport,
    make_trivial,
)
from src.dynamics.vectors import random_unit_vectors
from src.exceptions import ConfigError, DimensionMismatchError
from src.models.experiment import (
    ExperimentConfig,
    GHShiftSpec,
    HeatSpec,
    MatrixSpec,
    ModelSpec,
    RotationSpec,
    ScalarSpec,
    TransportSpec,
    TrivialSpec,
)
from src.utils.serialization import matrix_from_json, vector_from_json


@dataclass
class ModelBundle:
    """The semigroup to run on, plus the weighted-shift wrapper when there is one."""

    semigroup: Semigroup
    gh_model: Optional[GHShiftModel] = None

    @property
    def kind(self) -> str:
        return "gh_shift" if self.gh_model is not None else self.semigroup.name


def build_model(spec: ModelSpec, settings: Settings) -> ModelBundle:
    """Construct the semigroup a model spec describes.

    Args:
        spec: One of the discriminated model specs of ExperimentConfig
        settings: Process settings (time-grid tolerance, eigen-solver condition limit)

    Returns:
        ModelBundle with the semigroup and, for the weighted shift, its model
    """
    bundle = _construct(spec, settings)
    bundle.semigroup.grid_tol = settings.grid_tol
    return bundle


def _construct(spec: ModelSpec, settings: Settings) -> ModelBundle:
    if isinstance(spec, HeatSpec):
        return ModelBundle(make_heat(spec.n, spec.L))
    if isinstance(spec, TransportSpec):
        return ModelBundle(make_transport(spec.theta, spec.n, spec.h))
    if isinstance(spec, RotationSpec):
        return ModelBundle(make_rotation(spec.theta))
    if isinstance(spec, ScalarSpec):
        return ModelBundle(make_scalar(spec.rate))
    if isinstance(spec, TrivialSpec):
        return ModelBundle(make_trivial(spec.dim))
    if isinstance(spec, GHShiftSpec):
        model = make_gh_shift(spec.m, spec.h, spec.convention)
        return ModelBundle(model.semigroup, gh_model=model)
    if isinstance(spec, MatrixSpec):
        try:
            A = matrix_from_json(spec.generator)
        except DimensionMismatchError as e:
            raise ConfigError(f"Malformed generator: {e}") from e
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ConfigError(f"Generator must be square, got shape {A.shape}")
        return ModelBundle(MatrixSemigroup(A, name="matrix", cond_limit=settings.eig_condition_limit))
    raise ConfigError(f"Unknown model spec {type(spec).__name__}")


def resolve_x0(config: ExperimentConfig, dim: int) -> np.ndarray:
    """Configured start point, or a seeded random unit vector."""
    if config.x0 is not None:
        x0 = vector_from_json(config.x0)
        if x0.shape[0] != dim:
            raise ConfigError(f"x0 has dimension {x0.shape[0]}, model has {dim}")
        return x0
    rng = np.random.default_rng(config.seed)
    x0 = random_unit_vectors(rng, 1, dim)[0]
    logger.debug(f"Drew x0 from seed {config.seed}")
    return x0
