"""
Report emission for CLI runs.

Every run writes ``report.json`` (sorted keys, 2-space indent, the resolved
config embedded) and, when the handler produced them, ``trace.csv``,
``chain_edges.csv`` and ``orbit.json``. A rich table summarises the result
on the terminal.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger
from rich.console import Console
from rich.table import Table

from ..utils.constants import SCHEMA_VERSION
from ..utils.serialization import json_float

CSV_FLOAT_FORMAT = "%.17g"


@dataclass
class ExperimentOutcome:
    """What a subcommand handler hands back to the CLI."""

    result: Dict[str, Any]
    summary: Dict[str, Any] = field(default_factory=dict)
    trace: Optional[pd.DataFrame] = None
    chain_edges: Optional[pd.DataFrame] = None
    orbit: Optional[Dict[str, Any]] = None
    status: str = "ok"


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars, enums and non-finite floats for JSON."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return json_float(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return [json_float(value.real), json_float(value.imag)]
    if isinstance(value, Path):
        return str(value)
    return value


def dump_json(document: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(document), sort_keys=True, indent=2, allow_nan=False) + "\n"


def build_report(
    subcommand: str,
    config: Dict[str, Any],
    status: str,
    result: Dict[str, Any],
    timestamp: bool = True,
) -> Dict[str, Any]:
    report: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "status": status,
        "config": config,
        "result": result,
    }
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    return report


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


def write_outputs(
    out_dir: Path,
    subcommand: str,
    config: Dict[str, Any],
    outcome: ExperimentOutcome,
    timestamp: bool = True,
) -> List[Path]:
    """Write every artifact the outcome carries; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out_dir / "report.json"
    report = build_report(subcommand, config, outcome.status, outcome.result, timestamp)
    report_path.write_text(dump_json(report), encoding="utf-8")
    written.append(report_path)

    if outcome.trace is not None:
        path = out_dir / "trace.csv"
        _write_frame(outcome.trace, path)
        written.append(path)
    if outcome.chain_edges is not None:
        path = out_dir / "chain_edges.csv"
        _write_frame(outcome.chain_edges, path)
        written.append(path)
    if outcome.orbit is not None:
        path = out_dir / "orbit.json"
        path.write_text(dump_json(outcome.orbit), encoding="utf-8")
        written.append(path)

    logger.info(f"Wrote {len(written)} artifact(s) to {out_dir}")
    return written


def write_error_report(
    out_dir: Path,
    subcommand: str,
    config: Optional[Dict[str, Any]],
    error: Exception,
    timestamp: bool = True,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = {"error_type": type(error).__name__, "message": str(error)}
    report = build_report(subcommand, config or {}, "error", result, timestamp)
    path = out_dir / "report.json"
    path.write_text(dump_json(report), encoding="utf-8")
    return path


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}" if math.isfinite(value) else str(value)
    return str(value)


def render_summary(title: str, summary: Dict[str, Any], console: Optional[Console] = None) -> None:
    """Key/value table of the headline numbers."""
    console = console or Console()
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in summary.items():
        table.add_row(str(key), _format_cell(value))
    console.print(table)
