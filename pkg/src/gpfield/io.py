"""GPF1 snapshots, CSV/JSON reports and atomic file writes.

GPF1 layout (little endian)::

    offset 0   magic   4 bytes  b"GPF1"
    offset 4   dim     u8
    offset 5   N       u32 per axis
    ...        L, rho0, time   f64 each
    payload    row-major interleaved (re, im) f64
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectral import Field, Grid

MAGIC = b"GPF1"


class SnapshotFormatError(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"byte offset {offset}: {message}")
        self.offset = offset


def atomic_write_bytes(path, data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def encode_snapshot(field: Field, rho0: float, time: float) -> bytes:
    g = field.grid
    header = MAGIC + struct.pack("<B", g.dim) + struct.pack(f"<{g.dim}I", *g.shape)
    header += struct.pack("<ddd", g.L, rho0, time)
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes(order="C")
    return header + payload


def write_snapshot(path, field: Field, rho0: float, time: float) -> None:
    atomic_write_bytes(path, encode_snapshot(field, rho0, time))


def decode_snapshot(data: bytes):
    """Return ``(field, rho0, time)``; raises :class:`SnapshotFormatError`."""
    if len(data) < 5:
        raise SnapshotFormatError(len(data), "truncated header")
    if data[:4] != MAGIC:
        raise SnapshotFormatError(0, f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    dim = data[4]
    if dim not in (1, 2, 3):
        raise SnapshotFormatError(4, f"unsupported dimension {dim}")
    off = 5
    need = off + 4 * dim + 24
    if len(data) < need:
        raise SnapshotFormatError(len(data), "truncated header")
    shape = struct.unpack_from(f"<{dim}I", data, off)
    if len(set(shape)) != 1:
        raise SnapshotFormatError(off, f"non-cubic lattice {shape}")
    off += 4 * dim
    L, rho0, time = struct.unpack_from("<ddd", data, off)
    if not (math.isfinite(L) and L > 0):
        raise SnapshotFormatError(off, f"invalid half-length {L}")
    off += 24
    count = int(np.prod(shape))
    expected = off + 16 * count
    if len(data) != expected:
        raise SnapshotFormatError(min(len(data), expected),
                                  f"payload size mismatch: file has {len(data)} bytes, expected {expected}")
    try:
        grid = Grid(dim, shape[0], L)
    except ValueError as exc:
        raise SnapshotFormatError(5, str(exc)) from None
    values = np.frombuffer(data, dtype="<c16", count=count, offset=off).reshape(shape)
    return Field(grid, values.astype(np.complex128)), rho0, time


def read_snapshot(path):
    return decode_snapshot(Path(path).read_bytes())


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, csv_text(header, rows))


def export_slice_csv(path, field: Field, axis: int = 0) -> None:
    """Line through the lattice centre along ``axis``: columns x, re, im, abs."""
    g = field.grid
    index = [g.N // 2] * g.dim
    index[axis] = slice(None)
    line = field.values[tuple(index)]
    write_csv(path, ["x", "re", "im", "abs"],
              zip(g.x1d, line.real, line.imag, np.abs(line)))


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, set):
        return sorted(obj)
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(_finite(obj), default=_json_default, indent=2, sort_keys=True)


def write_json(path, obj) -> None:
    atomic_write_text(path, to_json(obj) + "\n")
