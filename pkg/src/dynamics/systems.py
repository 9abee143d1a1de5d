"""
Model constructors.

Discretised versions of the heat equation (Dirichlet Laplacian), the damped
transport equation on a ring, planar rotation, the weighted shift on a
truncated window, plus arbitrary matrix generators, scalar exponentials and
the trivial semigroup T(t) = I.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from .semigroup import MatrixSemigroup, Semigroup
from .vectors import VectorLike, as_vector
from ..exceptions import (
    InvalidParameterError,
    NeitherConventionHoldsError,
    WindowTooSmallError,
    ZeroThetaError,
)
from ..models.bounds import BoundDirection, RateBound

# GH identities are weight-ratio arithmetic, exact up to rounding
GH_IDENTITY_TOL = 1e-12


def make_matrix(A: np.ndarray, name: str = "matrix") -> MatrixSemigroup:
    return MatrixSemigroup(A, name=name)


def make_scalar(rate: float) -> MatrixSemigroup:
    """T(t)x = e^{rate·t}x on C."""
    bound = None
    if rate < 0:
        bound = RateBound(K=1.0, rate=-rate, direction=BoundDirection.FORWARD_CONTRACTION)
    elif rate > 0:
        bound = RateBound(K=1.0, rate=rate, direction=BoundDirection.INVERSE_CONTRACTION)
    return MatrixSemigroup(np.array([[rate]], dtype=complex), name=f"scalar({rate:g})", known_bound=bound)


def make_trivial(dim: int = 2) -> MatrixSemigroup:
    """T(t) = I."""
    return MatrixSemigroup(np.zeros((dim, dim), dtype=complex), name="trivial")


def heat_generator(n: int, L: float = math.pi) -> np.ndarray:
    """(1/h²)·tridiag(1, -2, 1) with h = L/(n+1)."""
    h = L / (n + 1)
    A = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    return A / h**2


def make_heat(n: int, L: float = math.pi) -> MatrixSemigroup:
    """Dirichlet heat semigroup on n interior nodes of (0, L)."""
    if n < 1 or L <= 0:
        raise InvalidParameterError(f"Heat model needs n >= 1 and L > 0, got n={n}, L={L}")
    A = heat_generator(n, L)
    mu1 = float(-np.max(linalg.eigvalsh(A)))
    bound = RateBound(K=1.0, rate=mu1, direction=BoundDirection.FORWARD_CONTRACTION)
    logger.debug(f"heat(n={n}, L={L:.4g}): first Dirichlet eigenvalue {mu1:.6f}")
    return MatrixSemigroup(A, name=f"heat(n={n})", known_bound=bound)


def make_rotation(theta: float) -> MatrixSemigroup:
    """Real 2-D embedding of x ↦ e^{iθt}x."""
    if theta == 0:
        raise ZeroThetaError("Rotation needs a nonzero angular speed")
    A = np.array([[0.0, -theta], [theta, 0.0]])
    return MatrixSemigroup(A, name=f"rotation({theta:g})")


class TransportSemigroup(Semigroup):
    """(T(kh)u)_j = e^{-khθ}·u_{(j+k) mod n} on a ring of n nodes."""

    def __init__(self, theta: float, n: int, h: float):
        if theta > 0:
            bound = RateBound(K=1.0, rate=theta, direction=BoundDirection.FORWARD_CONTRACTION)
        else:
            bound = RateBound(K=1.0, rate=-theta, direction=BoundDirection.INVERSE_CONTRACTION)
        super().__init__(n, name=f"transport({theta:g})", time_grid=h, known_bound=bound)
        self.theta = float(theta)

    @property
    def invertible(self) -> bool:
        return True

    def _apply(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        return np.exp(-self.theta * t) * np.roll(x, -steps)

    def _apply_inverse(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        return np.exp(self.theta * t) * np.roll(x, steps)


def make_transport(theta: float, n: int, h: float) -> TransportSemigroup:
    if theta == 0:
        raise ZeroThetaError("Transport needs a nonzero damping rate")
    if n < 2 or h <= 0:
        raise InvalidParameterError(f"Transport needs n >= 2 and h > 0, got n={n}, h={h}")
    return TransportSemigroup(theta, n, h)


class WeightConvention(str, Enum):
    """Weight profile of the shift: w(x) = e^{|x|} or w(x) = e^{-|x|}."""

    EXP_ABS = "exp_abs"
    EXP_NEG_ABS = "exp_neg_abs"


def gh_log_weights(m: int, h: float, convention: WeightConvention) -> np.ndarray:
    x = np.abs(np.arange(-m, m + 1) * h)
    return x if convention == WeightConvention.EXP_ABS else -x


class WeightedShiftSemigroup(Semigroup):
    """
    (T(h)u)_j = (w_j / w_{j+1})·u_{j+1}; k steps telescope to w_j / w_{j+k}.

    With ``periodic=False`` the window has a zero boundary (u_{m+1} = 0) and
    the inverse is the weighted right shift, exact while the support stays
    off the right edge. With ``periodic=True`` indices wrap around the ring.
    """

    def __init__(self, log_weights: np.ndarray, h: float, periodic: bool = False, name: str = "gh_shift"):
        super().__init__(len(log_weights), name=name, time_grid=h)
        self.log_weights = np.asarray(log_weights, dtype=float)
        self.periodic = periodic

    @property
    def invertible(self) -> bool:
        return True

    def _apply(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        n, lw = self.dim, self.log_weights
        if self.periodic:
            idx = (np.arange(n) + steps) % n
            return np.exp(lw - lw[idx]) * x[idx]
        out = np.zeros_like(x)
        if steps < n:
            out[: n - steps] = np.exp(lw[: n - steps] - lw[steps:]) * x[steps:]
        return out

    def _apply_inverse(self, t: float, steps: Optional[int], x: np.ndarray) -> np.ndarray:
        n, lw = self.dim, self.log_weights
        if self.periodic:
            idx = (np.arange(n) - steps) % n
            return np.exp(lw - lw[idx]) * x[idx]
        out = np.zeros_like(x)
        if steps < n:
            out[steps:] = np.exp(lw[steps:] - lw[: n - steps]) * x[: n - steps]
        return out


@dataclass
class GHShiftModel:
    """Weighted shift on {-m, …, m} with the structural split M = {j < 0}, N = {j ≥ 0}."""

    m: int
    h: float
    convention: WeightConvention
    semigroup: WeightedShiftSemigroup = field(init=False)
    verified_convention: Optional[WeightConvention] = None
    convention_evidence: Dict[str, bool] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.semigroup = WeightedShiftSemigroup(
            gh_log_weights(self.m, self.h, self.convention),
            self.h,
            name=f"gh_shift(m={self.m}, {self.convention.value})",
        )

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.m, self.m + 1)

    @property
    def m_indices(self) -> np.ndarray:
        return self.indices[self.indices < 0]

    @property
    def n_indices(self) -> np.ndarray:
        return self.indices[self.indices >= 0]

    def position(self, j: int) -> int:
        if abs(j) > self.m:
            raise InvalidParameterError(f"Index {j} outside the window [-{self.m}, {self.m}]")
        return j + self.m

    def basis(self, j: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[self.position(j)] = 1.0
        return e

    def interior_indices(self, margin: int = 2) -> List[int]:
        """Indices at least ``margin`` cells from the edge, excluding 0."""
        return [j for j in range(-self.m + margin, self.m - margin + 1) if j != 0]

    def project_m(self, u: VectorLike) -> np.ndarray:
        v = as_vector(u, dim=self.dim).copy()
        v[self.indices >= 0] = 0
        return v

    def project_n(self, u: VectorLike) -> np.ndarray:
        v = as_vector(u, dim=self.dim).copy()
        v[self.indices < 0] = 0
        return v

    def periodic_closure(self) -> WeightedShiftSemigroup:
        """The same weights on a ring; an invertible matrix representation."""
        return WeightedShiftSemigroup(
            gh_log_weights(self.m, self.h, self.convention),
            self.h,
            periodic=True,
            name=f"gh_ring(m={self.m}, {self.convention.value})",
        )


def make_gh_shift(m: int, h: float, convention: Optional[str] = None) -> GHShiftModel:
    """Weighted shift model; the convention is resolved empirically when omitted."""
    if m < 4:
        raise WindowTooSmallError(f"Weighted shift needs m >= 4, got {m}")
    if h <= 0:
        raise InvalidParameterError(f"Weighted shift needs h > 0, got {h}")
    if convention is not None:
        return GHShiftModel(m, h, WeightConvention(convention))

    model = GHShiftModel(m, h, WeightConvention.EXP_ABS)
    resolved = verify_gh_convention(model)
    if resolved != model.convention:
        evidence = model.convention_evidence
        model = GHShiftModel(m, h, resolved, verified_convention=resolved, convention_evidence=evidence)
    return model


def _decay_identities_hold(m: int, h: float, convention: WeightConvention) -> bool:
    shift = WeightedShiftSemigroup(gh_log_weights(m, h, convention), h)
    target = math.exp(-h)
    for j in range(-m + 2, m - 1):
        e = np.zeros(2 * m + 1, dtype=complex)
        e[j + m] = 1.0
        if j < 0:
            ratio = linalg.norm(shift.apply(h, e))
        else:
            ratio = linalg.norm(shift.apply_inverse(h, e))
        if abs(ratio - target) > GH_IDENTITY_TOL:
            return False
    return True


def verify_gh_convention(model: GHShiftModel) -> WeightConvention:
    """
    Test both weight conventions on interior basis vectors: forward decay
    ‖T(h)e_j‖ = e^{-h} for j < 0 and backward decay ‖T(h)^{-1}e_j‖ = e^{-h}
    for j ≥ 0. Exactly one must hold; the result is recorded on the model.
    """
    evidence = {c.value: _decay_identities_hold(model.m, model.h, c) for c in WeightConvention}
    model.convention_evidence = evidence
    holding = [c for c in WeightConvention if evidence[c.value]]
    if len(holding) != 1:
        raise NeitherConventionHoldsError(
            f"Decay identities hold for {len(holding)} conventions (m={model.m}, h={model.h}): {evidence}"
        )
    model.verified_convention = holding[0]
    if holding[0] != model.convention:
        logger.warning(
            f"Weighted shift built with {model.convention.value} but identities hold for "
            f"{holding[0].value}"
        )
    logger.info(f"Weighted shift convention resolved to {holding[0].value}")
    return holding[0]


@dataclass(frozen=True)
class GHCheckReport:
    """Generalized-hyperbolic inequalities on interior basis vectors."""

    holds: bool
    checked: int
    max_violation: float
    m_invariant: bool
    failures: List[Tuple[int, str, int]]

    def to_report(self) -> Dict[str, object]:
        return {
            "holds": self.holds,
            "checked": self.checked,
            "max_violation": self.max_violation,
            "m_invariant": self.m_invariant,
            "failures": [list(f) for f in self.failures],
        }


def check_generalized_hyperbolic(
    model: GHShiftModel, K: float = 1.0, lam: float = 1.0, tol: float = GH_IDENTITY_TOL
) -> GHCheckReport:
    """
    Forward decay on M, forward growth on N (while the support stays in N)
    and backward decay on N, for every interior basis vector and every step
    count that keeps the support inside the window margin.
    """
    T, h, m = model.semigroup, model.h, model.m
    failures: List[Tuple[int, str, int]] = []
    worst = 0.0
    checked = 0
    m_invariant = True

    for j in model.interior_indices():
        e = model.basis(j)
        if j < 0:
            for k in range(1, j + m - 1):
                image = T.apply(k * h, e)
                value = float(linalg.norm(image))
                limit = K * math.exp(-lam * k * h)
                checked += 1
                worst = max(worst, value - limit)
                if value > limit * (1 + tol):
                    failures.append((j, "forward_decay", k))
                if np.any(image[model.indices >= 0] != 0):
                    m_invariant = False
        else:
            for k in range(1, j + 1):
                value = float(linalg.norm(T.apply(k * h, e)))
                limit = math.exp(lam * k * h) / K
                checked += 1
                worst = max(worst, limit - value)
                if value < limit * (1 - tol):
                    failures.append((j, "forward_growth", k))
            for k in range(1, m - 1 - j):
                value = float(linalg.norm(T.apply_inverse(k * h, e)))
                limit = K * math.exp(-lam * k * h)
                checked += 1
                worst = max(worst, value - limit)
                if value > limit * (1 + tol):
                    failures.append((j, "backward_decay", k))

    return GHCheckReport(
        holds=not failures and m_invariant,
        checked=checked,
        max_violation=worst,
        m_invariant=m_invariant,
        failures=failures,
    )


def support_extent(model: GHShiftModel, u: VectorLike, atol: float = 0.0) -> Optional[Tuple[int, int]]:
    """(min j, max j) of the support of u, or None for u = 0."""
    v = as_vector(u, dim=model.dim)
    nonzero = np.flatnonzero(np.abs(v) > atol)
    if nonzero.size == 0:
        return None
    return int(model.indices[nonzero[0]]), int(model.indices[nonzero[-1]])


def support_monitor(model: GHShiftModel, u: VectorLike, margin: int = 2) -> bool:
    """True while the support of u keeps ``margin`` cells away from the window edge."""
    extent = support_extent(model, u)
    if extent is None:
        return True
    lo, hi = extent
    return lo >= -model.m + margin and hi <= model.m - margin
