"""Binary field snapshots (HSF1 format).

Layout: magic ``HSF1`` | nx, ny, nz as uint32 LE | h as float64 LE |
component count as uint32 LE | symmetry tag byte (0 none, 1 even, 2 odd) |
lattice values as float64 LE, one component after another, each in C order
with z fastest.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DataError
from .spectral import EVEN, NONE, ODD, Grid, PhysicalField, SpectralField, to_physical, to_spectral

MAGIC = b"HSF1"
_HEADER = struct.Struct("<4sIIIdIB")
_TAG_BYTE = {NONE: 0, EVEN: 1, ODD: 2}
_BYTE_TAG = {v: k for k, v in _TAG_BYTE.items()}


def write_snapshot(path, f: SpectralField) -> None:
    """Write the field's lattice values to ``path``."""
    phys = to_physical(f)
    header = _HEADER.pack(MAGIC, f.grid.nx, f.grid.ny, f.grid.nz,
                          f.grid.h, f.ncomp, _TAG_BYTE[f.symmetry])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(phys.values, dtype="<f8").tobytes())


def read_snapshot(path, grid: Grid | None = None) -> SpectralField:
    """Read a snapshot; reuses ``grid`` when it matches the header."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise DataError(f"{path}: truncated header")
        magic, nx, ny, nz, h, ncomp, tag_byte = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        if tag_byte not in _BYTE_TAG:
            raise DataError(f"{path}: unknown symmetry byte {tag_byte}")
        count = ncomp * nx * ny * nz
        data = np.frombuffer(fh.read(count * 8), dtype="<f8")
        if data.size != count:
            raise DataError(f"{path}: truncated payload")
    if grid is None or (grid.nx, grid.ny, grid.nz, grid.h) != (nx, ny, nz, h):
        grid = Grid.make(nx, ny, nz, h)
    values = data.reshape(ncomp, nx, ny, nz).astype(float)
    return to_spectral(PhysicalField(grid, values), _BYTE_TAG[tag_byte])


def snapshot_hook(directory, stride=1, prefix="state"):
    """Integration hook writing HSF1 dumps every ``stride`` steps."""
    import os

    os.makedirs(directory, exist_ok=True)
    counter = {"i": 0}

    def hook(state, series):
        counter["i"] += 1
        if counter["i"] % stride == 0:
            write_snapshot(os.path.join(directory,
                                        f"{prefix}_{state.t:.6f}.hsf"), state.v)
    return hook
