"""Input files: indicator tables, annual series, scenarios and parameter sets.

Numeric cells ending in ``%`` are divided by 100 on load; every other cell is
read as a decimal. Writers never emit ``%``, so load -> dump -> load is
idempotent.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import pandas as pd

from liquidyn.cycles import TimeSeries
from liquidyn.errors import ValidationError
from liquidyn.indicators import IndicatorBundle
from liquidyn.model import PARAMETER_NAMES, ParameterSet
from liquidyn.scenario import COMPOSITE_DIFFUSION, TARGETS, Perturbation, Scenario, current_value


class InputError(OSError):
    """A referenced file is missing or unreadable."""


INDICATOR_COLUMNS = (
    "date", "equity_price", "bond_price", "velocity", "inflation", "gini",
    "credit_to_gdp", "lcr", "cds", "beta", "risk_premium",
)
OPTIONAL_COLUMNS = ("shock_intensity",)

_SCALAR_FIELDS = {
    "inflation": "inflation_rate",
    "gini": "gini",
    "credit_to_gdp": "credit_to_gdp",
    "lcr": "lcr",
    "cds": "cds_spread",
    "beta": "beta",
    "risk_premium": "risk_premium",
    "shock_intensity": "shock_intensity",
}

ALIASES = {
    "inflation": "pressure",
    "grad_p": "pressure",
    "mu": "stickiness",
    "credit_to_gdp": "stickiness",
    "lcr": "diffusion",
    "bank_pressure": COMPOSITE_DIFFUSION,
    "gini": "internal_tension",
    "inequality": "internal_tension",
    "sigma_w": "shock",
    "premium": "risk_premium",
    "f_gdp": "cyclical_force",
    "cycle": "cyclical_force",
    "eps": "epsilon",
    "v": "velocity",
}
INDICATOR_ONLY = frozenset({"velocity"})


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def parse_number(text: str, where: str = "value") -> float:
    """Parse a decimal, accepting a trailing ``%`` and the unicode minus sign."""
    raw = text.strip().replace("−", "-").replace(",", "")
    scale = 1.0
    if raw.endswith("%"):
        raw, scale = raw[:-1].strip(), 100.0
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}", where) from None
    if not math.isfinite(value):
        raise ValidationError(f"must be finite: {text!r}", where)
    return value / scale


def _fmt(x: float) -> str:
    return repr(float(x))


# --- indicators --------------------------------------------------------------

def load_indicators(path) -> IndicatorBundle:
    """Read a delimited indicator table (one row per date, one column per indicator).

    Price columns are daily series. ``velocity`` holds annual observations on
    whichever rows carry them. Scalar indicators take their last non-blank
    value.
    """
    text = _read_text(path)
    reader = csv.reader(text.splitlines())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValidationError("file is empty", "header") from None
    missing = [c for c in INDICATOR_COLUMNS if c not in header]
    if missing:
        raise ValidationError(f"missing column(s): {', '.join(missing)}", missing[0])
    known = set(INDICATOR_COLUMNS) | set(OPTIONAL_COLUMNS)
    extra = [c for c in header if c not in known]
    if extra:
        raise ValidationError(f"unknown column(s): {', '.join(extra)}", extra[0])

    dates: list[pd.Timestamp] = []
    columns: dict[str, list[Optional[float]]] = {c: [] for c in header if c != "date"}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ValidationError(f"row {lineno}: expected {len(header)} cells, got {len(row)}", "row")
        cells = dict(zip(header, row))
        try:
            date = pd.Timestamp(cells["date"].strip())
        except ValueError:
            raise ValidationError(f"row {lineno}: bad date {cells['date']!r}", "date") from None
        if dates and date <= dates[-1]:
            raise ValidationError(f"row {lineno}: dates must be strictly increasing", "date")
        dates.append(date)
        for name in columns:
            cell = cells[name].strip()
            columns[name].append(
                parse_number(cell, f"row {lineno}, column {name}") if cell else None)
    if not dates:
        raise ValidationError("no data rows", "equity_price")

    index = pd.DatetimeIndex(dates)

    def series(name: str) -> pd.Series:
        s = pd.Series(columns[name], index=index, dtype=float).dropna()
        if s.empty:
            raise ValidationError("series is empty", name)
        return s

    def last(name: str) -> Optional[float]:
        values = [v for v in columns.get(name, []) if v is not None]
        if not values:
            if name in OPTIONAL_COLUMNS:
                return None
            raise ValidationError("no value given", name)
        return values[-1]

    scalars = {field: last(col) for col, field in _SCALAR_FIELDS.items()}
    return IndicatorBundle(
        equity_index_prices=series("equity_price"),
        sovereign_bond_prices=series("bond_price"),
        velocity_series=series("velocity"),
        **scalars,
    )


def dump_indicators(bundle: IndicatorBundle, path) -> None:
    frame = pd.concat(
        {
            "equity_price": bundle.equity_index_prices,
            "bond_price": bundle.sovereign_bond_prices,
            "velocity": bundle.velocity_series,
        },
        axis=1,
    ).sort_index()
    lines = [",".join(INDICATOR_COLUMNS + OPTIONAL_COLUMNS)]
    last = len(frame) - 1
    for i, (date, row) in enumerate(frame.iterrows()):
        cells = [date.strftime("%Y-%m-%d")]
        cells += ["" if pd.isna(row[c]) else _fmt(row[c]) for c in ("equity_price", "bond_price", "velocity")]
        for col in INDICATOR_COLUMNS[4:] + OPTIONAL_COLUMNS:
            value = getattr(bundle, _SCALAR_FIELDS[col])
            cells.append(_fmt(value) if i == last and value is not None else "")
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- annual series -------------------------------------------------------------

def load_time_series(path, column: Optional[str] = None) -> TimeSeries:
    """Two-column table ``time,value`` (extra columns selected by ``column``)."""
    text = _read_text(path)
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("file is empty", "header")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ValidationError("need a time column and a value column", "header")
    col = header.index(column) if column else 1
    if column and column not in header:
        raise ValidationError(f"no column {column!r}", column)
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        times.append(parse_number(row[0], f"row {lineno}, column {header[0]}"))
        values.append(parse_number(row[col], f"row {lineno}, column {header[col]}"))
    if not values:
        raise ValidationError("series is empty", header[col])
    steps = np.diff(times)
    if len(steps) and (np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=0, atol=1e-9)):
        raise ValidationError("times must be evenly spaced and increasing", header[0])
    step = float(steps[0]) if len(steps) else 1.0
    return TimeSeries(start_time=times[0], values=tuple(values), step=step)


# --- scenarios -----------------------------------------------------------------

_ARROW = re.compile(r"\s*(?:->|→)\s*")


def canonical_target(name: str) -> str:
    key = name.strip()
    key = ALIASES.get(key.lower(), key)
    if key not in TARGETS:
        raise ValidationError(f"unknown parameter {name.strip()!r}", "target")
    return key


def parse_scenario(text: str, baseline: Optional[ParameterSet] = None,
                   default_name: str = "scenario", rel_tol: float = 1e-9) -> Scenario:
    """Parse ``target: old -> new`` lines (or ``target: new``).

    Reserved keys are ``name:`` and ``fixed_epsilon:``. ``#`` starts a comment.
    Velocity entries are kept as indicator-only records. When ``baseline`` is
    given, each quoted old value is checked against it and a mismatch is
    reported as a warning, not an error.
    """
    name = default_name
    fixed_epsilon = None
    perturbations: list[Perturbation] = []
    indicators: list[Perturbation] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValidationError(f"line {lineno}: expected 'name: old -> new'", "line")
        key, rhs = (part.strip() for part in line.split(":", 1))
        where = f"line {lineno}"
        if key == "name":
            name = rhs
            continue
        if key == "fixed_epsilon":
            fixed_epsilon = parse_number(rhs, where)
            continue
        parts = _ARROW.split(rhs)
        if len(parts) > 2 or any(not p for p in parts) or (len(parts) == 1 and _ARROW.search(rhs)):
            raise ValidationError(f"{where}: malformed entry {rhs!r}", key)
        old = parse_number(parts[0], where) if len(parts) == 2 else None
        new = parse_number(parts[-1], where)
        target = canonical_target(key)
        if target in seen:
            raise ValidationError(f"{where}: duplicate target {target!r}", target)
        seen.add(target)
        pert = Perturbation(target=target, new_value=new, old_value=old)
        if target in INDICATOR_ONLY:
            indicators.append(pert)
            continue
        if baseline is not None and old is not None:
            actual = current_value(baseline, target)
            if not math.isclose(old, actual, rel_tol=rel_tol, abs_tol=1e-12):
                warnings.append(
                    f"{target}: scenario quotes baseline {old!r} but the baseline value is {actual!r}")
        perturbations.append(pert)
    return Scenario(name=name, perturbations=tuple(perturbations), fixed_epsilon=fixed_epsilon,
                    indicators=tuple(indicators), warnings=tuple(warnings))


def load_scenario(path, baseline: Optional[ParameterSet] = None) -> Scenario:
    return parse_scenario(_read_text(path), baseline, default_name=Path(path).stem)


def format_scenario(s: Scenario) -> str:
    lines = [f"name: {s.name}"]
    if s.fixed_epsilon is not None:
        lines.append(f"fixed_epsilon: {_fmt(s.fixed_epsilon)}")
    for pert in s.perturbations + s.indicators:
        if pert.old_value is None:
            lines.append(f"{pert.target}: {_fmt(pert.new_value)}")
        else:
            lines.append(f"{pert.target}: {_fmt(pert.old_value)} -> {_fmt(pert.new_value)}")
    return "\n".join(lines) + "\n"


def dump_scenario(s: Scenario, path) -> None:
    Path(path).write_text(format_scenario(s), encoding="utf-8")


# --- parameter sets ----------------------------------------------------------------

def parse_overrides(values: Mapping[str, object]) -> dict[str, float]:
    out = {}
    for key, value in values.items():
        target = canonical_target(key)
        if target not in PARAMETER_NAMES:
            raise ValidationError(f"{target} is not a stored parameter", target)
        out[target] = parse_number(str(value), target) if isinstance(value, str) else float(value)
    return out


def load_params(path, base: Optional[ParameterSet] = None) -> ParameterSet:
    """JSON object of parameter values; missing names fall back to ``base``."""
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg})", "params") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object", "params")
    data = data.get("parameters", data)
    overrides = parse_overrides(data)
    if base is None:
        return ParameterSet.from_mapping(overrides)
    return base.replace(**overrides)


def dump_params(p: ParameterSet, path) -> None:
    Path(path).write_text(json.dumps(p.to_dict(), indent=2) + "\n", encoding="utf-8")
