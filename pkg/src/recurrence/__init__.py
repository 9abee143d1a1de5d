"""Chain recurrence, nonwandering probes and the no-shadowing demonstrations."""

from .chain import (
    ChainGraph,
    box_grid,
    build_chain_graph,
    chain_recurrent_set,
    chain_related,
    circle_grid,
    is_nonwandering,
)
from .demos import (
    DriftReport,
    GHRecurrenceReport,
    gh_recurrence_demo,
    rotation_no_shadowing_demo,
    trivial_no_shadowing_demo,
)

__all__ = [
    "ChainGraph",
    "box_grid",
    "build_chain_graph",
    "chain_recurrent_set",
    "chain_related",
    "circle_grid",
    "is_nonwandering",
    "DriftReport",
    "GHRecurrenceReport",
    "gh_recurrence_demo",
    "rotation_no_shadowing_demo",
    "trivial_no_shadowing_demo",
]
