"""Partial field-of-view evaluation.

A window keeps the distal part of the cropped view: it always starts at the
crop line and extends down a given fraction of the remaining height.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lane_model import ImageSpec, Lane

FOV_NAMES = {1.0: "full", 0.5: "top_half", 1 / 3: "top_third"}


@dataclass(frozen=True)
class FovWindow:
    """Half-open row interval ``[y_lo, y_hi)``."""

    y_lo: int
    y_hi: int
    fraction: float = 1.0

    def __post_init__(self):
        if not self.y_lo < self.y_hi:
            raise ValueError(f"empty window [{self.y_lo}, {self.y_hi})")

    @property
    def n_rows(self) -> int:
        return self.y_hi - self.y_lo

    def contains(self, other: FovWindow) -> bool:
        return self.y_lo <= other.y_lo and other.y_hi <= self.y_hi


def fov_window(spec: ImageSpec, fraction: float) -> FovWindow:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    span = spec.height_px - spec.cut_height_px
    # tolerance keeps e.g. 0.29 * 100 from flooring to 28
    rows = math.floor(fraction * span + 1e-9)
    if rows < 1:
        raise ValueError(f"fraction {fraction} leaves no rows of a {span}-row view")
    return FovWindow(spec.cut_height_px, spec.cut_height_px + rows, fraction)


def fov_name(fraction: float) -> str:
    """Report key for a fraction: ``full``, ``top_half``, ``top_third`` or ``frac_<f>``."""
    for known, name in FOV_NAMES.items():
        if abs(fraction - known) < 1e-3:
            return name
    return f"frac_{fraction:g}"


def clip_lane(lane: Lane, window: FovWindow) -> Lane | None:
    """Restrict a lane to the window rows, inserting exact boundary points.

    The segment end at ``y_hi`` is kept so the clipped polyline reaches the
    window edge. Returns ``None`` when nothing of positive length remains.
    """
    ys, xs = lane.ys, lane.xs
    lo = max(float(window.y_lo), ys[0])
    hi = min(float(window.y_hi), ys[-1])
    if not hi > lo:
        return None
    inner = (ys > lo) & (ys < hi)
    pts = np.empty((int(inner.sum()) + 2, 2))
    pts[0] = np.interp(lo, ys, xs), lo
    pts[1:-1, 0] = xs[inner]
    pts[1:-1, 1] = ys[inner]
    pts[-1] = np.interp(hi, ys, xs), hi
    return Lane(pts)


def evaluate_fov(pred_lanes, gt_lanes, categories=None, cfg=None, fractions=(1.0, 0.5, 1 / 3),
                 workers=1):
    """Run :func:`lanekit.evaluation.evaluate_dataset` once per window fraction.

    Returns a dict keyed by fraction. Both sides are clipped to the window
    inside the evaluator, so images whose lanes all fall outside only
    contribute false positives.
    """
    from .evaluation import EvalConfig, evaluate_dataset

    cfg = EvalConfig() if cfg is None else cfg
    reports = {}
    for fraction in fractions:
        window = fov_window(cfg.spec, fraction)
        reports[fraction] = evaluate_dataset(
            pred_lanes, gt_lanes, categories, cfg.with_window(window), workers=workers
        )
    return reports
