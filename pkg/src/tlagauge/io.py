"""CSV and JSON writers with a fixed, reproducible format."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _fmt(x) -> str:
    if isinstance(x, (str, bytes)):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(path, header, columns) -> Path:
    """Write equal-length columns; floats use 17 significant digits, LF endings."""
    path = Path(path)
    cols = [np.asarray(c) if not isinstance(c, list) else c for c in columns]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("columns must have equal length")
    if len(header) != len(cols):
        raise ValueError("header and columns differ in length")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in cols])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_transition_table(path, table) -> Path:
    return write_csv(path, ["alpha_j", "alpha_k", "omega_alpha", "re_c", "im_c", "re_cp", "im_cp"],
                     [table.j, table.k, table.omega / table.omega0, table.c.real, table.c.imag,
                      table.cp.real, table.cp.imag])


def write_spectrum(path, spectrum, analytic, omega0: float = 1.0) -> Path:
    """``analytic`` is the reference density on the same grid, same normalization."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = spectrum.density / analytic
    return write_csv(path, ["omega", "density", "density_baseline", "ratio_to_analytic"],
                     [spectrum.omegas / omega0, spectrum.density, spectrum.density_baseline, ratio])
