"""Domain records: decay bounds, pseudo-orbits, certificates, splittings and experiment configs."""

from .bounds import BoundDirection, RateBound
from .certificate import ContractionTrace, ShadowCertificate, ShadowMethod
from .experiment import ExperimentConfig
from .orbit import JumpKind, JumpRule, PseudoOrbit, PseudoOrbitRecord, ValidationReport
from .splitting import HyperbolicityReport, HyperbolicSplitting, SpectralReport

__all__ = [
    "BoundDirection",
    "RateBound",
    "ContractionTrace",
    "ShadowCertificate",
    "ShadowMethod",
    "ExperimentConfig",
    "JumpKind",
    "JumpRule",
    "PseudoOrbit",
    "PseudoOrbitRecord",
    "ValidationReport",
    "HyperbolicityReport",
    "HyperbolicSplitting",
    "SpectralReport",
]
