"""Deterministic CSV output with JSON metadata sidecars.

CSV bodies are byte-identical for identical (command, config, seed):
full 17-significant-digit decimals, fixed column order, newline '\\n'.
Timestamps and environment details live only in the sidecar.
"""

from __future__ import annotations

import dataclasses
import json
import math
import subprocess
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def version_string() -> str:
    """Package version, decorated with the git description when available."""
    try:
        from importlib.metadata import version

        base = version("noisyspins")
    except Exception:
        base = "unknown"
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0:
            return f"{base}+g{out.stdout.strip()}"
    except Exception:
        pass
    return base


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        return format(float(x), ".17g")
    return str(x)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_csv(path, columns: dict, meta: dict) -> Path:
    """Write a CSV body plus a `<name>.meta.json` sidecar.

    `columns` maps name -> sequence; all columns must share a length.
    """
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {dict(zip(names, [a.shape[0] for a in arrays]))}")
    n_rows = lengths.pop() if lengths else 0
    lines = [",".join(names)]
    for i in range(n_rows):
        lines.append(",".join(format_value(a[i]) for a in arrays))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    sidecar = dict(meta)
    sidecar.setdefault("file", path.name)
    sidecar["columns"] = names
    sidecar["rows"] = n_rows
    sidecar["version"] = version_string()
    sidecar["timestamp"] = datetime.now(timezone.utc).isoformat()
    Path(str(path) + ".meta.json").write_text(
        json.dumps(_jsonable(sidecar), indent=2, sort_keys=True) + "\n"
    )
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a CSV written by `write_csv` into float columns (strings kept)."""
    lines = Path(path).read_text().strip().split("\n")
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    out = {}
    for k, name in enumerate(names):
        col = [r[k] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = np.array(col)
    return out
