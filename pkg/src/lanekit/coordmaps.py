"""Normalized x/y coordinate grids for positional feature injection.

Binary dump layout (all little-endian)::

    b"CMAP" | uint32 W | uint32 H | float32[H*W] x_map | float32[H*W] y_map

with both grids stored row-major.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"CMAP"
_HEADER = struct.Struct("<4sII")


@dataclass(frozen=True, eq=False)
class CoordMaps:
    x_map: np.ndarray
    y_map: np.ndarray

    @property
    def height(self) -> int:
        return self.x_map.shape[0]

    @property
    def width(self) -> int:
        return self.x_map.shape[1]


def make_coord_maps(width: int, height: int) -> CoordMaps:
    """Build H x W grids spanning [-1, 1] left-to-right and top-to-bottom."""
    if width < 2 or height < 2:
        raise ValueError(f"coordinate maps need width, height >= 2, got {width}x{height}")
    j = np.arange(1, width + 1, dtype=np.float64)
    i = np.arange(1, height + 1, dtype=np.float64)
    x_row = 2.0 * (j - 1.0) / (width - 1) - 1.0
    y_col = 2.0 * (i - 1.0) / (height - 1) - 1.0
    x_map = np.ascontiguousarray(np.broadcast_to(x_row, (height, width)))
    y_map = np.ascontiguousarray(np.broadcast_to(y_col[:, None], (height, width)))
    x_map.setflags(write=False)
    y_map.setflags(write=False)
    return CoordMaps(x_map, y_map)


def dumps_coord_maps(maps: CoordMaps) -> bytes:
    header = _HEADER.pack(MAGIC, maps.width, maps.height)
    return (
        header
        + maps.x_map.astype("<f4").tobytes(order="C")
        + maps.y_map.astype("<f4").tobytes(order="C")
    )


def loads_coord_maps(data: bytes) -> CoordMaps:
    """Inverse of :func:`dumps_coord_maps`; values come back as float32."""
    if len(data) < _HEADER.size:
        raise ValueError("truncated coordinate map header")
    magic, width, height = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    n = width * height
    expected = _HEADER.size + 8 * n
    if len(data) != expected:
        raise ValueError(f"expected {expected} bytes, got {len(data)}")
    values = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    return CoordMaps(values[:n].reshape(height, width), values[n:].reshape(height, width))


def dump_coord_maps(maps: CoordMaps, path) -> None:
    with open(path, "wb") as f:
        f.write(dumps_coord_maps(maps))


def load_coord_maps(path) -> CoordMaps:
    with open(path, "rb") as f:
        return loads_coord_maps(f.read())
