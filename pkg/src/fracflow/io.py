"""CSV and JSON writers for fields, norm series and reports.

Numbers are written with 17 significant digits so that a round trip
reproduces the binary values exactly.
"""

from __future__ import annotations

import csv
import json
import math
import os
import pathlib
from dataclasses import asdict, is_dataclass

import numpy as np

SCHEMA_VERSION = 1
OUTPUT_ENV = "FRACFLOW_OUT"


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def output_dir(default: str | os.PathLike | None = None) -> pathlib.Path:
    """Output directory: ``$FRACFLOW_OUT`` if set, else *default*, else the
    current directory."""
    path = os.environ.get(OUTPUT_ENV) or default or "."
    path = pathlib.Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_rows(path, header: list[str], rows) -> pathlib.Path:
    path = pathlib.Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def write_series(path, series) -> pathlib.Path:
    """Columns ``t, value, p, weak``."""
    weak = "1" if series.weak else "0"
    return write_rows(
        path, ["t", "value", "p", "weak"],
        ([t, v, series.p, weak] for t, v in zip(series.times, series.values)),
    )


def write_field(path, field) -> pathlib.Path:
    """Columns ``x[, y], value``."""
    grid = field.grid
    names = ["x", "y"][: grid.d]
    coords = [x.ravel() for x in grid.mesh()]
    return write_rows(path, [*names, "value"], zip(*coords, field.values.ravel()))


def read_field(path, grid):
    from fracflow.spectral import Field

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Field(grid, data[:, -1].reshape(grid.shape))


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no infinities; keep them readable and lossless
        return x if math.isfinite(x) else fmt(x)
    if hasattr(obj, "value"):
        return obj.value
    return obj


def dumps(obj) -> str:
    payload = _jsonable(obj)
    if isinstance(payload, dict):
        payload = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(payload, indent=2, sort_keys=True)


def write_json(path, obj) -> pathlib.Path:
    path = pathlib.Path(path)
    path.write_text(dumps(obj) + "\n")
    return path
