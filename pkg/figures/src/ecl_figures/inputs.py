"""Readers for the simulation engine's CSV and JSON files.

Each reader validates the documented schema by name before touching values:
a file with missing columns or keys fails with the missing names, and a file
with no data rows fails as empty. Values are parsed, never recomputed.
"""

from __future__ import annotations

import csv
import json
from typing import Any

from .errors import EmptyDataError, FigureError, MissingColumnError

TRAJECTORY_COLUMNS = (
    "step",
    "alpha",
    "beta_effective",
    "rule",
    "n_states",
    "entropy_nats",
    "entropy_norm",
    "dominant_share",
    "top5_mass",
    "eff_dim_order1",
    "eff_dim_order2",
)
SWEEP_COLUMNS = ("alpha", "steady_mean", "steady_std", "reached")
PHASE_COLUMNS = ("alpha", "beta", "steady_entropy_norm", "regime")

IRREVERSIBILITY_KEYS = (
    "alpha",
    "shock_start",
    "shock_end",
    "shock_multiplier",
    "baseline",
    "shock_peak",
    "post_shock_floor",
    "recovery_gap",
    "dominant_share_final",
)
UNIVERSALITY_KEYS = ("grid", "curves", "dilations", "max_pairwise_rms")


def _parse_float(path: str, column: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FigureError(f"{path}: column {column} has non-numeric value {text!r}") from None


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [name for name in required if name not in header]
        if missing:
            raise MissingColumnError(path, missing)
        rows = list(reader)
    if not rows:
        raise EmptyDataError(path)
    return rows


def read_trajectory(path: str) -> dict[str, list]:
    """Trajectory CSV as columns; numeric columns parsed to float."""
    rows = _read_rows(path, TRAJECTORY_COLUMNS)
    out: dict[str, list] = {name: [] for name in TRAJECTORY_COLUMNS}
    for row in rows:
        for name in TRAJECTORY_COLUMNS:
            value = row[name]
            out[name].append(value if name == "rule" else _parse_float(path, name, value))
    return out


def read_sweep(path: str) -> tuple[dict[str, list], float | None]:
    """Sweep CSV as columns plus the alpha_c footer record (None for none)."""
    rows = _read_rows(path, SWEEP_COLUMNS)
    if rows[-1]["alpha"] != "alpha_c":
        raise MissingColumnError(path, ["alpha_c footer"])
    footer = rows[-1]["steady_mean"]
    alpha_c = None if footer == "none" else _parse_float(path, "alpha_c", footer)
    rows = rows[:-1]
    if not rows:
        raise EmptyDataError(path)
    out: dict[str, list] = {name: [] for name in SWEEP_COLUMNS}
    for row in rows:
        for name in ("alpha", "steady_mean", "steady_std"):
            out[name].append(_parse_float(path, name, row[name]))
        out["reached"].append(row["reached"] == "true")
    return out, alpha_c


def read_phase(path: str) -> dict[str, list]:
    """Phase CSV as columns; regime kept as text."""
    rows = _read_rows(path, PHASE_COLUMNS)
    out: dict[str, list] = {name: [] for name in PHASE_COLUMNS}
    for row in rows:
        for name in ("alpha", "beta", "steady_entropy_norm"):
            out[name].append(_parse_float(path, name, row[name]))
        out["regime"].append(row["regime"])
    return out


def _read_json(path: str, required: tuple[str, ...]) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FigureError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FigureError(f"{path}: expected a JSON object")
    missing = [key for key in required if key not in data]
    if missing:
        raise MissingColumnError(path, missing)
    return data


def read_irreversibility(path: str) -> dict[str, Any]:
    return _read_json(path, IRREVERSIBILITY_KEYS)


def read_universality(path: str) -> dict[str, Any]:
    data = _read_json(path, UNIVERSALITY_KEYS)
    if not data["grid"] or not data["curves"]:
        raise EmptyDataError(path)
    return data
