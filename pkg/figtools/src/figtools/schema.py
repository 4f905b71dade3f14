"""Schema-validated reading of the solver's CSV tables."""

from __future__ import annotations

import hashlib
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

TEXT_COLUMNS = {"kind", "reason"}


class SchemaError(ValueError):
    """Input table does not match the documented column contract."""


def load_schema(path: str | None = None) -> dict:
    if path is not None:
        return json.loads(Path(path).read_text())
    with resources.files("figtools").joinpath("csv_schema.json").open() as fh:
        return json.load(fh)


def table_kind(path: Path) -> str:
    return path.stem


def read_table(path, schema: dict) -> dict[str, np.ndarray]:
    """Read one CSV, enforcing the schema for its file kind.

    Missing documented columns raise SchemaError naming the first
    offender; unknown extra columns are ignored with a warning.
    """
    path = Path(path)
    kind = table_kind(path)
    if kind not in schema["files"]:
        raise SchemaError(f"no schema entry for table kind {kind!r}")
    expected = list(schema["files"][kind]["columns"])
    text = path.read_text().strip()
    if not text:
        raise SchemaError(f"{path.name}: empty file")
    lines = text.split("\n")
    header = lines[0].split(",")
    for col in expected:
        if col not in header:
            raise SchemaError(f"{path.name}: missing column {col!r}")
    for col in header:
        if col not in expected:
            warnings.warn(f"{path.name}: ignoring undocumented column {col!r}",
                          stacklevel=2)
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != len(header) for r in rows):
        raise SchemaError(f"{path.name}: ragged rows")
    out: dict[str, np.ndarray] = {}
    for k, name in enumerate(header):
        if name not in expected:
            continue
        col = [r[k] for r in rows]
        if name in TEXT_COLUMNS:
            out[name] = np.array(col)
        else:
            try:
                out[name] = np.array([float(v) for v in col])
            except ValueError as exc:
                raise SchemaError(f"{path.name}: non-numeric value in {name!r}: {exc}")
    return out


def input_digest(paths) -> str:
    """sha256 over the input bodies and their metadata sidecars."""
    h = hashlib.sha256()
    for p in paths:
        p = Path(p)
        h.update(p.read_bytes())
        sidecar = Path(str(p) + ".meta.json")
        if sidecar.exists():
            h.update(sidecar.read_bytes())
    return h.hexdigest()


def fail(message: str) -> "int":
    print(f"error: {message}", file=sys.stderr)
    return 1
