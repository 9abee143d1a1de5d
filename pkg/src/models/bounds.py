"""
Exponential decay bounds ``‖T(t)‖ ≤ K e^{-λt}`` and their inverse counterpart.
"""

from enum import Enum
import math
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator


class BoundDirection(str, Enum):
    """Which family of operators the bound controls."""

    FORWARD_CONTRACTION = "forward_contraction"
    INVERSE_CONTRACTION = "inverse_contraction"


class RateBound(BaseModel):
    """Decay constants K (overshoot) and rate (exponent) for T(t) or T(t)^{-1}."""

    model_config = ConfigDict(frozen=True)

    K: float = Field(..., gt=0, description="Overshoot constant, at least 1 by convention")
    rate: float = Field(..., gt=0, description="Exponential decay rate")
    direction: BoundDirection = Field(
        BoundDirection.FORWARD_CONTRACTION, description="Forward maps or their inverses"
    )

    @field_validator("K")
    @classmethod
    def rescale_overshoot(cls, v: float) -> float:
        # K < 1 is still a valid bound once raised to 1
        return max(float(v), 1.0)

    @property
    def is_forward(self) -> bool:
        return self.direction == BoundDirection.FORWARD_CONTRACTION

    def value(self, t: float) -> float:
        """K e^{-rate t}."""
        return self.K * math.exp(-self.rate * t)

    def summary(self) -> Dict[str, Any]:
        return {"K": self.K, "lambda": self.rate, "direction": self.direction.value}
