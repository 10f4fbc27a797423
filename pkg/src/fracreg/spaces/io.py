"""Binary and CSV serialization of fields and space-time fields.

Binary record layout (little endian)::

    magic   4 bytes  b"FRF1"
    d       int32
    n       int32
    L       float64
    payload n**d float64, row-major

A space-time field is the concatenation of one record per time slice; its
time grid and any metadata live in a JSON manifest next to the binary file.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..frac_calc import TimeGrid
from .grid import Field, SpaceGrid, SpaceTimeField

__all__ = [
    "read_field",
    "read_fields",
    "read_space_time",
    "write_field",
    "write_field_csv",
    "write_space_time",
]

MAGIC = b"FRF1"
_HEADER = struct.Struct("<4siid")


def _record(f: Field) -> bytes:
    g = f.grid
    return _HEADER.pack(MAGIC, g.d, g.n, g.L) + np.ascontiguousarray(f.values, dtype="<f8").tobytes()


def write_field(path, f: Field) -> None:
    Path(path).write_bytes(_record(f))


def _parse(buf: bytes, offset: int) -> tuple[Field, int]:
    if len(buf) - offset < _HEADER.size:
        raise ValueError("truncated field header")
    magic, d, n, L = _HEADER.unpack_from(buf, offset)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; not a field file")
    grid = SpaceGrid(d, L, n)
    count = n**d
    start = offset + _HEADER.size
    end = start + 8 * count
    if end > len(buf):
        raise ValueError("truncated field payload")
    vals = np.frombuffer(buf, dtype="<f8", count=count, offset=start).reshape(grid.shape)
    return Field(grid, vals.astype(float)), end


def read_fields(path) -> list[Field]:
    buf = Path(path).read_bytes()
    out, pos = [], 0
    while pos < len(buf):
        f, pos = _parse(buf, pos)
        out.append(f)
    return out


def read_field(path) -> Field:
    fields = read_fields(path)
    if len(fields) != 1:
        raise ValueError(f"{path}: expected one field record, found {len(fields)}")
    return fields[0]


def _manifest_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".json")


def write_space_time(path, F: SpaceTimeField, meta: dict | None = None) -> Path:
    """Write slice records to ``path`` and a manifest to ``path + '.json'``."""
    with open(path, "wb") as fh:
        for s in F.slices():
            fh.write(_record(s))
    manifest = {
        "format": "FRF1",
        "slices": F.tgrid.N + 1,
        "time_grid": {"T": F.tgrid.T, "N": F.tgrid.N, "grading": F.tgrid.grading},
        "space_grid": {"d": F.sgrid.d, "n": F.sgrid.n, "L": F.sgrid.L},
    }
    if meta:
        manifest.update(meta)
    mp = _manifest_path(path)
    mp.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return mp


def read_space_time(path) -> tuple[SpaceTimeField, dict]:
    mp = _manifest_path(path)
    if not mp.exists():
        raise FileNotFoundError(f"missing manifest {mp}")
    manifest = json.loads(mp.read_text())
    tg = manifest["time_grid"]
    tgrid = TimeGrid(tg["T"], tg["N"], tg["grading"])
    fields = read_fields(path)
    if len(fields) != tgrid.N + 1:
        raise ValueError(f"manifest lists {tgrid.N + 1} slices, file holds {len(fields)}")
    sgrid = fields[0].grid
    if any(f.grid != sgrid for f in fields):
        raise ValueError("slices disagree on the spatial grid")
    return SpaceTimeField(tgrid, sgrid, np.stack([f.values for f in fields])), manifest


def write_field_csv(path, f: Field) -> None:
    """Coordinates and value per node, 17 significant digits."""
    pts = f.grid.points()
    cols = [f"x{i}" for i in range(f.grid.d)] + ["value"]
    data = np.column_stack([pts, f.values.reshape(-1)])
    np.savetxt(path, data, delimiter=",", header=",".join(cols), comments="", fmt="%.17g")
