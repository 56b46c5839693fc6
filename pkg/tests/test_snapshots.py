"""Tests for the HSF1 binary snapshot format."""

import struct

import numpy as np
import pytest

from hydrostat.errors import DataError
from hydrostat.io import read_snapshot, write_snapshot
from hydrostat.spectral import (EVEN, Grid, PhysicalField, dealias, symmetrize,
                                to_physical, to_spectral)

H = 0.5


@pytest.fixture()
def grid():
    return Grid.make(8, 8, 16, H)


def sample_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((2,) + grid.physical_shape)
    return symmetrize(dealias(to_spectral(PhysicalField(grid, vals))), EVEN)


def test_round_trip(tmp_path, grid):
    f = sample_field(grid)
    path = tmp_path / "field.hsf"
    write_snapshot(path, f)
    g = read_snapshot(path, grid)
    assert g.symmetry == EVEN
    np.testing.assert_allclose(g.coeffs, f.coeffs, atol=1e-13)


def test_header_layout(tmp_path, grid):
    f = sample_field(grid)
    path = tmp_path / "field.hsf"
    write_snapshot(path, f)
    raw = path.read_bytes()
    magic, nx, ny, nz, h, ncomp, tag = struct.unpack_from("<4sIIIdIB", raw)
    assert magic == b"HSF1"
    assert (nx, ny, nz) == (8, 8, 16)
    assert h == H
    assert ncomp == 2
    assert tag == 1                    # even
    payload = raw[struct.calcsize("<4sIIIdIB"):]
    assert len(payload) == 2 * 8 * 8 * 16 * 8
    # z-fastest ordering: first 16 doubles are the z-column at (comp0, x0, y0)
    col = np.frombuffer(payload[: 16 * 8], dtype="<f8")
    np.testing.assert_allclose(col, to_physical(f).values[0, 0, 0], atol=1e-15)


def test_grid_rebuilt_when_absent(tmp_path, grid):
    f = sample_field(grid)
    path = tmp_path / "field.hsf"
    write_snapshot(path, f)
    g = read_snapshot(path)
    assert (g.grid.nx, g.grid.ny, g.grid.nz, g.grid.h) == (8, 8, 16, H)


def test_bad_magic_rejected(tmp_path, grid):
    path = tmp_path / "bad.hsf"
    path.write_bytes(b"XXXX" + b"\0" * 64)
    with pytest.raises(DataError):
        read_snapshot(path)


def test_truncated_payload_rejected(tmp_path, grid):
    f = sample_field(grid)
    path = tmp_path / "field.hsf"
    write_snapshot(path, f)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(DataError):
        read_snapshot(path)
