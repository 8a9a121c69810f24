"""Reading and writing weighted-grid data files.

The canonical "wgrid" format is JSON:

    {"dim": n, "shape": [N_1, ..., N_n],
     "weights": [row-major reals], "values": [row-major reals]}

A CSV alternative exists for 1D data: a header line followed by rows
"index,weight,value".  Loaders reject NaN, infinities and negatives and
name the offending field, so a file that loads is already valid.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import DataValidationError
from .grids import Grid, WeightedGrid, validate

__all__ = ["load_wgrid", "save_wgrid", "file_digest"]


def file_digest(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_wgrid(path: str | Path) -> WeightedGrid:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        wg = _load_csv(path)
    else:
        wg = _load_json(path)
    report = validate(wg)
    if not report.ok:
        raise DataValidationError("; ".join(report.violations))
    return wg


def _load_json(path: Path) -> WeightedGrid:
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"json: {exc}") from exc
    if not isinstance(obj, dict):
        raise DataValidationError("json: top-level object expected")
    for field in ("dim", "shape", "weights", "values"):
        if field not in obj:
            raise DataValidationError(f"{field}: missing")
    try:
        shape = tuple(int(n) for n in obj["shape"])
    except (TypeError, ValueError) as exc:
        raise DataValidationError(f"shape: {exc}") from exc
    if int(obj["dim"]) != len(shape):
        raise DataValidationError(f"dim: {obj['dim']} does not match shape of length {len(shape)}")
    grid = Grid(shape)
    weights = _parse_numbers(obj["weights"], "weights", grid.ncells)
    values = _parse_numbers(obj["values"], "values", grid.ncells)
    return WeightedGrid(grid, weights, values)


def _parse_numbers(raw, field: str, expected: int) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataValidationError(f"{field}: {exc}") from exc
    if arr.ndim != 1 or arr.size != expected:
        raise DataValidationError(f"{field}: expected {expected} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DataValidationError(f"{field}: NaN or infinity not allowed")
    if np.any(arr < 0):
        raise DataValidationError(f"{field}: negative entries not allowed")
    return arr


def _load_csv(path: Path) -> WeightedGrid:
    rows = list(csv.reader(path.read_text().splitlines()))
    if not rows:
        raise DataValidationError("csv: empty file")
    body = rows[1:]
    if not body:
        raise DataValidationError("csv: no data rows")
    n = len(body)
    weights = np.full(n, np.nan)
    values = np.full(n, np.nan)
    for row in body:
        if len(row) != 3:
            raise DataValidationError(f"csv: expected 3 columns, got {len(row)}")
        try:
            idx = int(row[0])
            w = float(row[1])
            v = float(row[2])
        except ValueError as exc:
            raise DataValidationError(f"csv: {exc}") from exc
        if not 0 <= idx < n:
            raise DataValidationError(f"index: {idx} out of range for {n} rows")
        if not np.isnan(weights[idx]):
            raise DataValidationError(f"index: duplicate {idx}")
        weights[idx] = w
        values[idx] = v
    if np.any(np.isnan(weights)):
        raise DataValidationError("index: missing rows")
    if not np.all(np.isfinite(weights)) or not np.all(np.isfinite(values)):
        raise DataValidationError("csv: NaN or infinity not allowed")
    if np.any(weights < 0):
        raise DataValidationError("weight: negative entries not allowed")
    if np.any(values < 0):
        raise DataValidationError("value: negative entries not allowed")
    return WeightedGrid(Grid((n,)), weights, values)


def save_wgrid(wg: WeightedGrid, path: str | Path) -> None:
    obj = {
        "dim": wg.grid.dim,
        "shape": list(wg.grid.shape),
        "weights": [float(x) for x in wg.weights.ravel()],
        "values": [float(x) for x in wg.values.ravel()],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
