"""Run reports and their deterministic on-disk formats."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np

from liquidyn import __version__
from liquidyn.model import BalanceResult
from liquidyn.scenario import SensitivityReport

FORMATS = ("table", "structured")
SIG_DIGITS = 6


@dataclass
class Report:
    command: str
    input_digest: str
    engine_version: str = __version__
    parameters: dict[str, float] = field(default_factory=dict)
    balances: dict[str, BalanceResult] = field(default_factory=dict)
    epsilon_breakdown: dict[str, float] = field(default_factory=dict)
    sensitivity: Optional[SensitivityReport] = None
    summary: dict[str, Any] = field(default_factory=dict)
    series: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def input_digest(*parts: Any) -> str:
    """SHA-256 over file contents (``Path`` parts) and canonical JSON of everything else."""
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, Path):
            h.update(part.read_bytes())
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode())
        h.update(b"\x00")
    return h.hexdigest()


def balance_warnings(result: BalanceResult, tol: float = 1e-4) -> list[str]:
    """Flag an open balance and, separately, a residual that has the right size but wrong sign."""
    out = []
    if abs(result.imbalance) > tol:
        out.append(
            f"balance not closed at epsilon {_num(result.epsilon_supplied)}: "
            f"rhs {_num(result.rhs)} vs lhs {_num(result.lhs)} "
            f"(imbalance {_num(result.imbalance)}); closing epsilon is {_num(result.epsilon_required)}")
    supplied, required = result.epsilon_supplied, result.epsilon_required
    if (supplied * required < 0
            and abs(abs(supplied) - abs(required)) <= tol):
        out.append(
            f"epsilon sign inconsistency: supplied {_num(supplied)} matches the closing "
            f"value {_num(required)} in magnitude only; the rhs terms with the supplied "
            f"epsilon sum to {_num(result.rhs)}, not {_num(result.lhs)}")
    return out


def _num(x: float) -> str:
    if x == 0:
        x = 0.0   # drop the sign of negative zero
    return f"{x:.{SIG_DIGITS}g}"


def _round(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value in report: {x}")
    return float(_num(x))


def _plain(obj: Any) -> Any:
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return {name: _plain(getattr(obj, name)) for name in obj.__dataclass_fields__}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_document(report: Report) -> dict[str, Any]:
    doc = {
        "command": report.command,
        "engine_version": report.engine_version,
        "input_digest": report.input_digest,
        "parameters": report.parameters,
        "balances": report.balances,
        "epsilon_breakdown": report.epsilon_breakdown,
        "sensitivity": report.sensitivity,
        "summary": report.summary,
        "series": sorted(report.series),
        "notes": report.notes,
        "warnings": list(report.warnings),
    }
    return _plain(doc)


def _flatten(prefix: str, obj: Any, rows: list[tuple[str, str, str]]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        section, _, key = prefix.partition(".")
        if obj is None:
            value = ""
        elif isinstance(obj, float):
            value = _num(obj)
        else:
            value = str(obj)
        rows.append((section, key, value))


def render_table(doc: dict[str, Any]) -> str:
    rows: list[tuple[str, str, str]] = []
    _flatten("", doc, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("section", "key", "value"))
    writer.writerows(rows)
    return buf.getvalue()


def render_structured(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def emit_report(report: Report, out_dir, fmt: str = "structured") -> list[Path]:
    """Write the report plus one ``<series>.dat`` (time value) file per series.

    Output is byte-identical for identical reports: keys are sorted and every
    float is printed with six significant digits.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = to_document(report)
    written = []
    if fmt == "structured":
        path = out / "report.json"
        path.write_text(render_structured(doc), encoding="utf-8")
    else:
        path = out / "report.csv"
        path.write_text(render_table(doc), encoding="utf-8")
    written.append(path)
    for name in sorted(report.series):
        times, values = report.series[name]
        if len(values) == 0:
            continue
        lines = [f"# time {name}"]
        lines += [f"{_num(float(t))} {_num(_round(float(v)))}" for t, v in zip(times, values)]
        path = out / f"{_safe_name(name)}.dat"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written
