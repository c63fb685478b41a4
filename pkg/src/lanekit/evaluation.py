"""CULane-style evaluation: thick-stroke lane masks, IoU matching, F1 and mF1.

A lane is drawn as every pixel whose centre lies within ``lane_width_px / 2``
of its polyline, after clipping the polyline to the evaluation window. Lanes
have strictly increasing ``y``, so each pixel row of such a stroke is a single
run of columns. Masks are therefore stored as one ``[lo, hi]`` column run
per window row, and mask IoU reduces to exact integer run arithmetic.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DatasetError
from .fov import FovWindow, clip_lane, fov_window
from .lane_model import ImageSpec, Lane

DEFAULT_THRESHOLDS = tuple(round(0.5 + 0.05 * k, 2) for k in range(10))
DEFAULT_LANE_WIDTH = 30
THREADS_ENV = "LANEKIT_THREADS"


@dataclass(frozen=True)
class EvalConfig:
    spec: ImageSpec = field(default_factory=ImageSpec)
    lane_width_px: int = DEFAULT_LANE_WIDTH
    iou_thresholds: tuple = DEFAULT_THRESHOLDS
    window: FovWindow | None = None

    def __post_init__(self):
        if self.lane_width_px <= 0:
            raise ValueError("lane_width_px must be positive")
        ts = tuple(float(t) for t in self.iou_thresholds)
        if not ts or any(not 0 < t < 1 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"thresholds must be strictly increasing within (0, 1): {ts}")
        object.__setattr__(self, "iou_thresholds", ts)
        if self.window is None:
            object.__setattr__(self, "window", fov_window(self.spec, 1.0))
        w = self.window
        if not self.spec.cut_height_px <= w.y_lo < w.y_hi <= self.spec.height_px:
            raise ValueError(f"window [{w.y_lo}, {w.y_hi}) outside the cropped image")

    def with_window(self, window: FovWindow) -> EvalConfig:
        return replace(self, window=window)


# ---------------------------------------------------------------------------
# rasterization

_EMPTY_LO, _EMPTY_HI = 0, -1


def _run_bounds(points, yc, r):
    """Left/right x-extent of the stroke on each horizontal line ``y = yc``.

    Each segment's stroke is a capsule (two end discs plus a band), whose
    cut by a horizontal line is an interval; the union over segments of a
    y-monotone polyline is again one interval. Rows the stroke misses get
    ``(inf, -inf)``.
    """
    x0 = points[:-1, 0, None]
    y0 = points[:-1, 1, None]
    x1 = points[1:, 0, None]
    y1 = points[1:, 1, None]
    dx = x1 - x0
    dy = y1 - y0
    seg_len2 = dx * dx + dy * dy
    seg_len = np.sqrt(seg_len2)
    e0 = yc[None, :] - y0
    e1 = yc[None, :] - y1
    r2 = r * r
    inf = np.inf

    with np.errstate(divide="ignore", invalid="ignore"):
        h2 = r2 - e0 * e0
        h = np.sqrt(np.maximum(h2, 0.0))
        left = np.where(h2 >= 0, x0 - h, inf)
        right = np.where(h2 >= 0, x0 + h, -inf)

        h2 = r2 - e1 * e1
        h = np.sqrt(np.maximum(h2, 0.0))
        left = np.minimum(left, np.where(h2 >= 0, x1 - h, inf))
        right = np.maximum(right, np.where(h2 >= 0, x1 + h, -inf))

        # band: perpendicular distance <= r and projection inside the segment
        perp_lo = x0 + (e0 * dx - r * seg_len) / dy
        perp_hi = x0 + (e0 * dx + r * seg_len) / dy
        t_lo = x0 + (-e0 * dy) / dx
        t_hi = x0 + (seg_len2 - e0 * dy) / dx
        inside = (e0 >= 0) & (e0 <= dy)
        par_lo = np.where(dx > 0, t_lo, np.where(dx < 0, t_hi, np.where(inside, -inf, inf)))
        par_hi = np.where(dx > 0, t_hi, np.where(dx < 0, t_lo, np.where(inside, inf, -inf)))
        band_lo = np.maximum(perp_lo, par_lo)
        band_hi = np.minimum(perp_hi, par_hi)
        hit = band_lo <= band_hi
        left = np.minimum(left, np.where(hit, band_lo, inf))
        right = np.maximum(right, np.where(hit, band_hi, -inf))

    return left.min(axis=0), right.max(axis=0)


def lane_runs(lane: Lane | None, cfg: EvalConfig):
    """Per-row inclusive column runs ``(lo, hi)`` of a lane's mask in the window.

    Empty rows have ``lo > hi``. The lane is clipped to the window first.
    """
    window = cfg.window
    lo = np.full(window.n_rows, _EMPTY_LO, dtype=np.int64)
    hi = np.full(window.n_rows, _EMPTY_HI, dtype=np.int64)
    clipped = None if lane is None else clip_lane(lane, window)
    if clipped is None:
        return lo, hi
    r = cfg.lane_width_px / 2.0
    y_top, y_bottom = clipped.y_span
    first = max(window.y_lo, int(np.floor(y_top - r - 0.5)))
    last = min(window.y_hi, int(np.ceil(y_bottom + r + 0.5)) + 1)
    if first >= last:
        return lo, hi
    yc = np.arange(first, last, dtype=np.float64) + 0.5
    left, right = _run_bounds(clipped.points, yc, r)
    hit = left <= right
    width = cfg.spec.width_px
    col_lo = np.zeros(len(yc), dtype=np.int64)
    col_hi = np.full(len(yc), -1, dtype=np.int64)
    # pixel j is set when its centre j + 0.5 lies in [left, right]
    col_lo[hit] = np.maximum(np.ceil(left[hit] - 0.5), 0).astype(np.int64)
    col_hi[hit] = np.minimum(np.floor(right[hit] - 0.5), width - 1).astype(np.int64)
    empty = col_lo > col_hi
    col_lo[empty], col_hi[empty] = _EMPTY_LO, _EMPTY_HI
    lo[first - window.y_lo:last - window.y_lo] = col_lo
    hi[first - window.y_lo:last - window.y_lo] = col_hi
    return lo, hi


def rasterize_lane(lane: Lane, cfg: EvalConfig) -> np.ndarray:
    """Boolean mask of shape ``(window rows, image width)``."""
    lo, hi = lane_runs(lane, cfg)
    mask = np.zeros((cfg.window.n_rows, cfg.spec.width_px), dtype=bool)
    cols = np.arange(cfg.spec.width_px)
    mask[:] = (cols[None, :] >= lo[:, None]) & (cols[None, :] <= hi[:, None])
    return mask


def lane_iou(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


def iou_matrix(preds: Sequence[Lane], gts: Sequence[Lane], cfg: EvalConfig) -> np.ndarray:
    """Mask IoU between every prediction (rows) and ground truth (columns)."""
    out = np.zeros((len(preds), len(gts)))
    if not len(preds) or not len(gts):
        return out
    p_lo, p_hi = (np.stack(a) for a in zip(*(lane_runs(l, cfg) for l in preds)))
    g_lo, g_hi = (np.stack(a) for a in zip(*(lane_runs(l, cfg) for l in gts)))
    p_area = np.clip(p_hi - p_lo + 1, 0, None).sum(axis=1)
    g_area = np.clip(g_hi - g_lo + 1, 0, None).sum(axis=1)
    inter = np.clip(
        np.minimum(p_hi[:, None], g_hi[None]) - np.maximum(p_lo[:, None], g_lo[None]) + 1, 0, None
    ).sum(axis=2)
    union = p_area[:, None] + g_area[None, :] - inter
    np.divide(inter, union, out=out, where=union > 0)
    return out


# ---------------------------------------------------------------------------
# matching and scores

@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    pairs: tuple = ()


def match_iou_matrix(iou: np.ndarray, threshold: float) -> MatchResult:
    """Assignment maximizing summed IoU over pairs with ``iou >= threshold``."""
    iou = np.asarray(iou, dtype=np.float64)
    n_pred, n_gt = iou.shape
    pairs = ()
    if n_pred and n_gt:
        weights = np.where(iou >= threshold, iou, 0.0)
        rows, cols = linear_sum_assignment(weights, maximize=True)
        pairs = tuple(
            (int(p), int(g), float(iou[p, g]))
            for p, g in zip(rows, cols)
            if iou[p, g] >= threshold
        )
    tp = len(pairs)
    return MatchResult(tp=tp, fp=n_pred - tp, fn=n_gt - tp, pairs=pairs)


def match_lanes(preds, gts, cfg: EvalConfig, threshold: float) -> MatchResult:
    return match_iou_matrix(iou_matrix(preds, gts, cfg), threshold)


class Scores(NamedTuple):
    precision: float
    recall: float
    f1: float


def _ratio(num, den):
    return num / den if den else 0.0


def f1_from_counts(tp: int, fp: int, fn: int) -> Scores:
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    return Scores(precision, recall, _ratio(2 * precision * recall, precision + recall))


# ---------------------------------------------------------------------------
# dataset evaluation

@dataclass(frozen=True)
class Categories:
    """Scenario subsets of a dataset; ``no_lane`` ones are scored by false positives only."""

    members: Mapping[str, Sequence[str]]
    no_lane: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "no_lane", frozenset(self.no_lane))
        unknown = self.no_lane - set(self.members)
        if unknown:
            raise ValueError(f"no-lane categories without members: {sorted(unknown)}")


@dataclass(frozen=True)
class ThresholdScores:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class CategoryScores:
    fp_count: int
    mf1: float | None = None
    f1: Mapping[float, float] | None = None


def _fmt(x):
    return round(float(x), 6)


def _tkey(t):
    return f"{t:.2f}"


@dataclass(frozen=True)
class MetricsReport:
    thresholds: tuple
    per_threshold: Mapping[float, ThresholdScores]
    mf1: float
    per_category: Mapping[str, CategoryScores]
    n_images: int

    def f1(self, threshold: float) -> float:
        return self.per_threshold[threshold].f1

    def to_dict(self) -> dict:
        """JSON-ready dict: fixed key order, floats rounded to 6 decimals."""
        per_threshold = {
            _tkey(t): {
                "precision": _fmt(s.precision),
                "recall": _fmt(s.recall),
                "f1": _fmt(s.f1),
                "tp": s.tp,
                "fp": s.fp,
                "fn": s.fn,
            }
            for t, s in self.per_threshold.items()
        }
        per_category = {}
        for name, c in self.per_category.items():
            if c.mf1 is None:
                per_category[name] = {"fp_count": c.fp_count}
            else:
                per_category[name] = {
                    "mf1": _fmt(c.mf1),
                    "f1": {_tkey(t): _fmt(v) for t, v in c.f1.items()},
                    "fp_count": c.fp_count,
                }
        return {
            "n_images": self.n_images,
            "mf1": _fmt(self.mf1),
            "per_threshold": per_threshold,
            "per_category": per_category,
        }


def _in_window(lanes, window):
    return [l for l in lanes if clip_lane(l, window) is not None]


def image_counts(preds, gts, cfg: EvalConfig) -> np.ndarray:
    """``(n_thresholds, 3)`` array of tp/fp/fn for one image.

    Lanes with no extent inside the window are dropped from their side
    before matching.
    """
    preds, gts = _in_window(preds, cfg.window), _in_window(gts, cfg.window)
    iou = iou_matrix(preds, gts, cfg)
    out = np.empty((len(cfg.iou_thresholds), 3), dtype=np.int64)
    for k, t in enumerate(cfg.iou_thresholds):
        m = match_iou_matrix(iou, t)
        out[k] = m.tp, m.fp, m.fn
    return out


def _chunk_counts(args):
    pairs, cfg = args
    return [image_counts(p, g, cfg) for p, g in pairs]


def resolve_workers(workers=None) -> int:
    """Requested ``workers`` (default 1), capped by ``$LANEKIT_THREADS`` when set.

    With no explicit request the environment value itself is used.
    """
    env = os.environ.get(THREADS_ENV)
    cap = int(env) if env else None
    if workers is None:
        workers = cap or 1
    elif cap is not None:
        workers = min(int(workers), cap)
    return max(1, int(workers))


def _load(lanes):
    return lanes.load_lanes() if hasattr(lanes, "load_lanes") else lanes


def _all_counts(ids, pred_lanes, gt_lanes, cfg, workers):
    pairs = [(list(pred_lanes[i]), list(gt_lanes[i])) for i in ids]
    if workers <= 1 or len(pairs) < 2:
        return _chunk_counts((pairs, cfg))
    n_chunks = min(len(pairs), 4 * workers)
    bounds = np.linspace(0, len(pairs), n_chunks + 1).astype(int)
    chunks = [(pairs[a:b], cfg) for a, b in zip(bounds, bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return [c for part in ex.map(_chunk_counts, chunks) for c in part]


def evaluate_dataset(pred_lanes, gt_lanes, categories: Categories | None = None,
                     cfg: EvalConfig | None = None, workers=None) -> MetricsReport:
    """Accumulate tp/fp/fn over all images at every threshold.

    ``pred_lanes`` and ``gt_lanes`` map image id to a sequence of lanes (or
    are :class:`lanekit.io.DatasetIndex` objects). Per-image counts are
    integers, so the report does not depend on ``workers``.
    """
    cfg = EvalConfig() if cfg is None else cfg
    pred_lanes, gt_lanes = _load(pred_lanes), _load(gt_lanes)
    only_pred = set(pred_lanes) - set(gt_lanes)
    only_gt = set(gt_lanes) - set(pred_lanes)
    if only_pred or only_gt:
        raise DatasetError(
            f"{len(only_pred)} image(s) only in predictions (e.g. {sorted(only_pred)[:3]}), "
            f"{len(only_gt)} only in ground truth (e.g. {sorted(only_gt)[:3]})"
        )
    ids = sorted(gt_lanes)
    counts = dict(zip(ids, _all_counts(ids, pred_lanes, gt_lanes, cfg, resolve_workers(workers))))

    thresholds = cfg.iou_thresholds
    zero = np.zeros((len(thresholds), 3), dtype=np.int64)
    total = sum((counts[i] for i in ids), zero)
    per_threshold = {}
    for t, (tp, fp, fn) in zip(thresholds, total.tolist()):
        p, r, f = f1_from_counts(tp, fp, fn)
        per_threshold[t] = ThresholdScores(p, r, f, tp, fp, fn)
    mf1 = float(np.mean([s.f1 for s in per_threshold.values()]))

    per_category = {}
    if categories is not None:
        for name, members in categories.members.items():
            missing = set(members) - counts.keys()
            if missing:
                raise DatasetError(
                    f"category {name!r} lists {len(missing)} unknown image(s), "
                    f"e.g. {sorted(missing)[:3]}"
                )
            sub = sum((counts[i] for i in sorted(set(members))), zero)
            fp_count = int(sub[0, 1])
            if name in categories.no_lane:
                per_category[name] = CategoryScores(fp_count=fp_count)
            else:
                f1s = {t: f1_from_counts(*row).f1 for t, row in zip(thresholds, sub.tolist())}
                per_category[name] = CategoryScores(
                    fp_count=fp_count, mf1=float(np.mean(list(f1s.values()))), f1=f1s
                )

    return MetricsReport(
        thresholds=thresholds,
        per_threshold=per_threshold,
        mf1=mf1,
        per_category=per_category,
        n_images=len(ids),
    )
