"""
Collects per-step records and writes the diagnostics table.

The CSV carries a schema_version column so downstream readers can detect layout
changes. The summary JSON reports, for every conserved column, the initial and
final values, the extrema and the largest drift from the initial value.

Usage:
    sink = DiagnosticsSink()
    solver.run(sink=sink)
    sink.write_csv(out_dir / "diagnostics.csv")
    sink.write_summary(out_dir / "summary.json")
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Union

import pandas as pd
from pydantic import BaseModel

from src.models import BasisKind
from src.operators.lenard_bernstein import lb_table_rows

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONSERVED_COLUMNS = ("mass", "momentum", "moment2", "total_energy", "weighted_l2")


class DiagnosticsSink:
    """In-memory table of DiagnosticsRecord / TrapRecord rows."""

    def __init__(self, schema_version: int = SCHEMA_VERSION):
        self.schema_version = schema_version
        self.rows: list[dict[str, Any]] = []

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, record: Union[BaseModel, dict[str, Any]]) -> None:
        row = record.flat() if hasattr(record, "flat") else dict(record)
        self.rows.append(row)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        frame.insert(0, "schema_version", self.schema_version)
        return frame

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.info(f"Wrote {len(self.rows)} diagnostics rows to {path}")
        return path

    def summary(self) -> dict[str, Any]:
        frame = pd.DataFrame(self.rows)
        out: dict[str, Any] = {"schema_version": self.schema_version, "rows": len(frame)}
        for column in CONSERVED_COLUMNS:
            if column not in frame or frame[column].isna().all():
                continue
            series = frame[column].astype(float)
            initial = float(series.iloc[0])
            out[column] = {
                "initial": initial,
                "final": float(series.iloc[-1]),
                "min": float(series.min()),
                "max": float(series.max()),
                "max_drift": float((series - initial).abs().max()),
            }
        if "picard_iterations" in frame:
            out["picard_iterations_max"] = int(frame["picard_iterations"].max())
        return out

    def write_summary(self, path: Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, default=str))
        return path


def lb_table_frame(basis_kind: BasisKind, k: int, N: int) -> pd.DataFrame:  # noqa: N803
    """lb_table_rows as a DataFrame (one row per Hermite mode)."""
    return pd.DataFrame(lb_table_rows(basis_kind, k, N))
