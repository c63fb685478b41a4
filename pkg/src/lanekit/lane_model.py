"""Geometric primitives shared by every other module.

Image coordinates follow the usual raster convention: ``x`` grows to the
right, ``y`` grows downwards, so the smallest ``y`` of a lane is its most
distant point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidLaneError


@dataclass(frozen=True)
class ImageSpec:
    """Canvas size plus the number of top rows removed by cropping.

    Defaults describe the 1640x590 CULane frame with the conventional
    270-row crop.
    """

    width_px: int = 1640
    height_px: int = 590
    cut_height_px: int = 270

    def __post_init__(self):
        if self.width_px < 2 or self.height_px < 2:
            raise ValueError(f"image must be at least 2x2, got {self.width_px}x{self.height_px}")
        if not 0 <= self.cut_height_px < self.height_px:
            raise ValueError(
                f"cut_height_px must lie in [0, {self.height_px}), got {self.cut_height_px}"
            )

    @property
    def cropped_height(self) -> int:
        return self.height_px - self.cut_height_px


def _readonly(a):
    a.setflags(write=False)
    return a


class Lane:
    """Polyline lane with strictly increasing ``y``.

    Input points are sorted by ``y``; points sharing the exact same ``y``
    collapse to one point at their mean ``x``.
    """

    __slots__ = ("_points",)

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidLaneError(f"expected an (N, 2) array of points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidLaneError("lane coordinates must be finite")
        if pts.shape[0] and np.any(np.diff(pts[:, 1]) <= 0):
            order = np.argsort(pts[:, 1], kind="stable")
            pts = pts[order]
            ys, inverse, counts = np.unique(pts[:, 1], return_inverse=True, return_counts=True)
            if len(ys) != len(pts):
                xs = np.bincount(inverse, weights=pts[:, 0]) / counts
                pts = np.column_stack([xs, ys])
        if pts.shape[0] < 2:
            raise InvalidLaneError("a lane needs at least 2 points with distinct y")
        self._points = _readonly(np.ascontiguousarray(pts))

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def xs(self) -> np.ndarray:
        return self._points[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self._points[:, 1]

    @property
    def y_span(self) -> tuple[float, float]:
        return float(self._points[0, 1]), float(self._points[-1, 1])

    def __len__(self):
        return self._points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Lane):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __reduce__(self):
        return Lane, (np.array(self._points),)

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self):
        return f"Lane({self._points.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SampledLane:
    """Lane x-positions at fixed row anchors.

    Rows the lane does not reach carry ``x = 0`` and ``valid = False``.
    """

    rows: np.ndarray
    xs: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        xs = np.asarray(self.xs, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if not (rows.ndim == xs.ndim == valid.ndim == 1):
            raise ValueError("rows, xs and valid must be 1-D")
        if not (len(rows) == len(xs) == len(valid)):
            raise ValueError("rows, xs and valid must have equal length")
        if np.any(np.diff(rows) <= 0):
            raise ValueError("row anchors must be strictly increasing")
        object.__setattr__(self, "rows", _readonly(rows))
        object.__setattr__(self, "xs", _readonly(xs))
        object.__setattr__(self, "valid", _readonly(valid))

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, SampledLane):
            return NotImplemented
        return (
            np.array_equal(self.rows, other.rows)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.valid, other.valid)
        )

    def with_xs(self, xs) -> SampledLane:
        return SampledLane(self.rows, xs, self.valid)


def sample_lane_at_rows(lane: Lane, rows) -> SampledLane:
    """Linearly interpolate ``lane`` at each row anchor."""
    rows = np.asarray(rows, dtype=np.int64)
    y_top, y_bottom = lane.y_span
    valid = (rows >= y_top) & (rows <= y_bottom)
    xs = np.where(valid, np.interp(rows.astype(np.float64), lane.ys, lane.xs), 0.0)
    return SampledLane(rows, xs, valid)
