"""Binary vector/matrix files and JSON-lines run reports.

Vector file (version 1), all little-endian::

    b"CSPX" | u32 version=1 | u64 count | count x f64

Matrix file (version 2) adds the row count and stores row-major::

    b"CSPX" | u32 version=2 | u64 count | u64 rows | count x f64

Anything not starting with the magic is read as whitespace/newline separated
decimal text.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

MAGIC = b"CSPX"
_HEAD = struct.Struct("<4sIQ")
_ROWS = struct.Struct("<Q")
_F64 = np.dtype("<f8")

REPORT_KEYS = ("method", "n", "k", "variant", "iterations", "feasibility_gap",
               "wall_time_seconds", "seed", "status")


class FormatError(ValueError):
    pass


def write_vector(path, x) -> None:
    x = np.ascontiguousarray(x, dtype=_F64).ravel()
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, 1, x.shape[0]))
        fh.write(x.tobytes())


def write_matrix(path, A) -> None:
    A = np.ascontiguousarray(A, dtype=_F64)
    if A.ndim != 2:
        raise ValueError("matrix must be 2-D")
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, 2, A.size))
        fh.write(_ROWS.pack(A.shape[0]))
        fh.write(A.tobytes())


def _parse_binary(data: bytes) -> np.ndarray:
    if len(data) < _HEAD.size:
        raise FormatError("truncated header")
    magic, version, count = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("bad magic")
    offset = _HEAD.size
    rows = None
    if version == 2:
        if len(data) < offset + _ROWS.size:
            raise FormatError("truncated matrix header")
        (rows,) = _ROWS.unpack_from(data, offset)
        offset += _ROWS.size
    elif version != 1:
        raise FormatError(f"unsupported version {version}")
    payload = data[offset:]
    if len(payload) != 8 * count:
        raise FormatError(f"payload holds {len(payload)} bytes, header promises {8 * count}")
    arr = np.frombuffer(payload, dtype=_F64).astype(np.float64)
    if rows is not None:
        if rows == 0 or count % rows:
            raise FormatError(f"count {count} not divisible by rows {rows}")
        arr = arr.reshape(rows, count // rows)
    return arr


def _parse_text(data: bytes) -> np.ndarray:
    try:
        tokens = data.decode("ascii").split()
    except UnicodeDecodeError as exc:
        raise FormatError("input is neither CSPX binary nor ASCII text") from exc
    if not tokens:
        raise FormatError("empty input")
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"cannot parse number: {exc}") from exc


def read_array(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] == MAGIC:
        return _parse_binary(data)
    return _parse_text(data)


def read_vector(path) -> np.ndarray:
    arr = read_array(path)
    if arr.ndim != 1:
        raise FormatError(f"{path}: expected a vector, found a {arr.shape} matrix")
    return arr


def read_matrix(path) -> np.ndarray:
    arr = read_array(path)
    if arr.ndim != 2:
        raise FormatError(f"{path}: expected a version-2 matrix file")
    return arr


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return _clean(value.item())
    return value


def report_line(method: str, n: int, k: float, variant: str, iterations: int,
                feasibility_gap: float, wall_time_seconds: float, seed, status: str,
                **extra) -> str:
    """One JSON object; non-finite numbers are written as null."""
    rec = dict(method=method, n=int(n), k=float(k), variant=str(variant),
               iterations=int(iterations), feasibility_gap=feasibility_gap,
               wall_time_seconds=wall_time_seconds, seed=seed, status=str(status))
    rec.update(extra)
    return json.dumps({key: _clean(v) for key, v in rec.items()}, allow_nan=False)
