"""Pytest configuration and shared fixtures for all tests."""

import sys
from typing import List

import numpy as np
import pytest
from loguru import logger

from src.dynamics.semigroup import MatrixSemigroup, Semigroup
from src.dynamics.systems import make_matrix, make_scalar
from src.models.bounds import BoundDirection, RateBound

N_RANDOM_GENERATORS = 50


def random_hyperbolic_generator(rng: np.random.Generator, dim: int, min_real: float = 0.2) -> np.ndarray:
    """V·diag(μ)·V⁻¹ with |Re μ| in [min_real, 2] of both signs and a well-conditioned V."""
    signs = rng.choice([-1.0, 1.0], size=dim)
    if dim > 1:
        signs[0], signs[1] = -1.0, 1.0
    real = signs * rng.uniform(min_real, 2.0, size=dim)
    imag = rng.uniform(-1.5, 1.5, size=dim)
    V = np.eye(dim) + 0.2 * rng.standard_normal((dim, dim)) / np.sqrt(dim)
    return V @ np.diag(real + 1j * imag) @ np.linalg.inv(V)


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep loguru on stderr at WARNING, and restore that after CLI runs swap sinks."""
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for reproducible draws."""
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_decay() -> MatrixSemigroup:
    """T(t)x = e^{-t}x."""
    return make_scalar(-1.0)


@pytest.fixture
def scalar_growth() -> MatrixSemigroup:
    """T(t)x = e^{t}x."""
    return make_scalar(1.0)


@pytest.fixture
def saddle() -> MatrixSemigroup:
    """A = diag(-1, 2)."""
    return make_matrix(np.diag([-1.0, 2.0]), name="saddle")


@pytest.fixture
def unit_forward_bound() -> RateBound:
    return RateBound(K=1.0, rate=1.0, direction=BoundDirection.FORWARD_CONTRACTION)


@pytest.fixture
def unit_inverse_bound() -> RateBound:
    return RateBound(K=1.0, rate=1.0, direction=BoundDirection.INVERSE_CONTRACTION)


@pytest.fixture(scope="session")
def random_hyperbolic_models() -> List[MatrixSemigroup]:
    """Fifty hyperbolic generators of dimension 2..8 with min |Re σ(A)| ≥ 0.2."""
    rng = np.random.default_rng(2024)
    models = []
    for k in range(N_RANDOM_GENERATORS):
        dim = int(rng.integers(2, 9))
        models.append(make_matrix(random_hyperbolic_generator(rng, dim), name=f"random_{k}"))
    return models


class ForwardOnlyDecay(Semigroup):
    """T(t)x = e^{-t}x on C with no inverse action."""

    def __init__(self):
        super().__init__(1, name="forward_only")

    def _apply(self, t, steps, x):
        return np.exp(-t) * x


@pytest.fixture
def forward_only() -> ForwardOnlyDecay:
    return ForwardOnlyDecay()
