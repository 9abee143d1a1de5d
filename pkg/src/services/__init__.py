"""Report emission services."""

from .report_writer import (
    ExperimentOutcome,
    render_summary,
    to_jsonable,
    write_error_report,
    write_outputs,
)

__all__ = [
    "ExperimentOutcome",
    "render_summary",
    "to_jsonable",
    "write_error_report",
    "write_outputs",
]
