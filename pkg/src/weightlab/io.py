"""JSON and CSV helpers shared by the command line and the suite.

Reports are written with sorted keys and a fixed float format so that two
runs with the same seed produce byte-identical files.  Non-finite floats are
encoded as the strings ``"inf"``, ``"-inf"`` and ``"nan"`` to keep the output
strict JSON.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .space import MeasureSpace, SetBasis, space_from_dict


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy values, tuples and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def load_array(path, complex_ok: bool = False) -> np.ndarray:
    """A JSON array of numbers; with ``complex_ok`` entries may be ``[re, im]`` or ``{"re", "im"}``."""
    data = read_json(path)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array")
    if complex_ok:
        vals = []
        for x in data:
            if isinstance(x, dict):
                vals.append(complex(x["re"], x.get("im", 0.0)))
            elif isinstance(x, list):
                vals.append(complex(x[0], x[1]))
            else:
                vals.append(complex(x))
        return np.asarray(vals, dtype=np.complex128)
    return np.asarray(data, dtype=np.float64)


def load_space(path) -> tuple[MeasureSpace, SetBasis]:
    return space_from_dict(read_json(path))


def write_csv(path, rows: Iterable[dict]) -> None:
    rows = list(rows)
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})
