"""Binary field snapshots.

Layout, all little-endian::

    offset  size  content
    0       4     magic b"LLFS"
    4       2     format version (uint16, currently 1)
    6       4     field kind: b"REAL", b"CPLX" or b"MAG3"
    10      8     n, number of grid points (uint64)
    18      8     box length L (float64)
    26      ...   samples as float64

Sample blocks: REAL stores ``n`` values; CPLX stores ``n`` interleaved
``(re, im)`` pairs; MAG3 stores the three components one after another
(``m1[0..n)``, ``m2[0..n)``, ``m3[0..n)``).
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .fields import Magnetization, WaveField
from .spectral import Grid

MAGIC = b"LLFS"
VERSION = 1
HEADER = struct.Struct("<4sH4sQd")
KINDS = (b"REAL", b"CPLX", b"MAG3")


class SnapshotError(ValueError):
    pass


def encode(field) -> bytes:
    if isinstance(field, Magnetization):
        kind = b"MAG3"
        grid = field.grid
        body = np.concatenate([field.m1, field.m2, field.m3])
    elif isinstance(field, WaveField):
        kind = b"CPLX"
        grid = field.grid
        body = np.ascontiguousarray(field.psi, dtype=np.complex128).view(np.float64)
    elif isinstance(field, tuple) and len(field) == 2 and isinstance(field[0], Grid):
        grid, values = field
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n,):
            raise SnapshotError(f"real field of shape {values.shape} on grid of {grid.n} points")
        kind = b"REAL"
        body = values
    else:
        raise TypeError(f"cannot snapshot object of type {type(field).__name__}")
    header = HEADER.pack(MAGIC, VERSION, kind, grid.n, grid.length)
    return header + body.astype("<f8").tobytes()


def decode(data: bytes):
    """Inverse of :func:`encode`; REAL snapshots come back as ``(grid, values)``."""
    if len(data) < HEADER.size:
        raise SnapshotError("truncated header")
    magic, version, kind, n, length = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    if kind not in KINDS:
        raise SnapshotError(f"unknown field kind {kind!r}")
    grid = Grid(int(n), float(length))
    count = {b"REAL": 1, b"CPLX": 2, b"MAG3": 3}[kind] * grid.n
    body = np.frombuffer(data, dtype="<f8", offset=HEADER.size)
    if body.size != count:
        raise SnapshotError(f"expected {count} samples, found {body.size}")
    body = body.astype(np.float64)
    if kind == b"REAL":
        return grid, body
    if kind == b"CPLX":
        return WaveField(grid, body.view(np.complex128).copy())
    m1, m2, m3 = body.reshape(3, grid.n)
    return Magnetization(grid, m1.copy(), m2.copy(), m3.copy())


def save(path, field) -> Path:
    path = Path(path)
    path.write_bytes(encode(field))
    return path


def load(path):
    return decode(Path(path).read_bytes())
