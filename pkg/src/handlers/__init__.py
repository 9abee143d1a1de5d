"""CLI subcommand handlers; each takes (config, settings) and returns an ExperimentOutcome."""

# Model construction
from .model_handlers import ModelBundle, build_model, resolve_x0

# Spectral analysis and recurrence
from .analysis_handlers import handle_chainrec, handle_spectrum, handle_split

# Shadowing
from .shadow_handlers import (
    SolverPlan,
    handle_conjecture_probe,
    handle_oracle,
    handle_shadow,
    plan_solver,
)

# Canned demos
from .demo_handlers import handle_demo

__all__ = [
    "ModelBundle",
    "build_model",
    "resolve_x0",
    "handle_chainrec",
    "handle_spectrum",
    "handle_split",
    "SolverPlan",
    "handle_conjecture_probe",
    "handle_oracle",
    "handle_shadow",
    "plan_solver",
    "handle_demo",
]
