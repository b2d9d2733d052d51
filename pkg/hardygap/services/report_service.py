"""
Report document assembly and JSON/CSV emission
"""
import csv
import io
import json
import logging
import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel

from hardygap.core.config import settings
from hardygap.core.exceptions import ConfigError
from hardygap.models.report import ReportDocument

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "alpha", "p", "N", "domain", "H_bound", "lambda_inf", "gap", "nu", "nu_tilde",
    "iterations", "error_estimate", "regime",
]

RADIAL_CAVEAT = ("discrete minima are upper bounds for H: they minimize over radial piecewise-linear "
                 "functions with Dirichlet conditions at the cutoffs")


def round_significant(value: float, digits: Optional[int] = None) -> float:
    digits = digits or settings.SIGNIFICANT_DIGITS
    return float(f"{value:.{digits}g}")


def to_plain(value: Any) -> Any:
    """JSON-ready copy with floats at the configured significant digits"""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump(mode="python"))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return round_significant(value)
    return value


class ReportService:
    """Builds and writes machine-readable reports"""

    def build(self, command: str, config: Optional[Dict[str, Any]], results: Dict[str, Any],
              diagnostics: Optional[Dict[str, Any]] = None, caveats: Optional[List[str]] = None,
              timestamp: bool = True) -> ReportDocument:
        return ReportDocument(
            schema_version=settings.SCHEMA_VERSION,
            version=settings.VERSION,
            command=command,
            config=to_plain(config or {}),
            results=to_plain(results),
            diagnostics=to_plain(diagnostics or {}),
            caveats=list(caveats or []),
            generated_at=datetime.now(timezone.utc).isoformat() if timestamp else None,
        )

    def render_json(self, document: ReportDocument) -> str:
        return json.dumps(document.model_dump(mode="json"), indent=2) + "\n"

    def render_csv(self, document: ReportDocument) -> str:
        """Flattened section,key,value rows"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["section", "key", "value"])
        payload = document.model_dump(mode="json")
        for section in ("results", "diagnostics"):
            for key, value in _flatten(payload[section]):
                writer.writerow([section, key, value])
        for key in ("schema_version", "version", "command", "generated_at"):
            writer.writerow(["meta", key, payload[key]])
        return buffer.getvalue()

    def write(self, document: ReportDocument, out_dir: Optional[Path] = None, fmt: str = "json",
              stem: Optional[str] = None) -> Path:
        out_dir = Path(out_dir or settings.OUTPUT_DIR)
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            text = self.render_json(document)
        elif fmt == "csv":
            text = self.render_csv(document)
        else:
            raise ConfigError(f"unknown report format {fmt!r}")
        path = out_dir / f"{stem or document.command}.{fmt}"
        with open(path, "w") as f:
            f.write(text)
        logger.info(f"wrote {path}")
        return path

    def write_sweep_csv(self, rows: Iterable[Dict[str, Any]], path: Path) -> Path:
        """Sweep rows in the fixed column order, one row per grid point"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_cell(to_plain(row.get(k))) for k in SWEEP_COLUMNS})
        logger.info(f"wrote {path}")
        return path


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{settings.SIGNIFICANT_DIGITS}g}"
    return value


def _flatten(value: Any, prefix: str = ""):
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(value) if isinstance(value, list) else value


report_service = ReportService()
