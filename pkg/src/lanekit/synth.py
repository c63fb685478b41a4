"""Seeded synthetic lane datasets for desk-scale verification.

Ground-truth lanes in one image are parallel quadratic curves ``x(y)``
sampled every 10 rows; prediction copies add independent uniform
horizontal noise to every point. Coordinates are rounded to the lane file
precision so in-memory lanes equal what a reader gets back from disk.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .evaluation import Categories
from .io import DatasetIndex, lane_path_for, parse_lane_file, write_lane_file
from .lane_model import ImageSpec, Lane

CATEGORY_NAMES = ("normal", "curve", "night", "cross")
NO_LANE = frozenset({"cross"})
ROW_STEP = 10
LANE_SPACING = 360.0


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_images: int = 200
    lanes_per_image: tuple = (2, 4)
    curvature: float = 1e-3
    perturbation_px: float = 0.0
    spec: ImageSpec = field(default_factory=ImageSpec)

    def __post_init__(self):
        lo, hi = self.lanes_per_image
        if not 1 <= lo <= hi:
            raise ValueError(f"bad lanes_per_image range {self.lanes_per_image}")
        if self.n_images < 0 or self.perturbation_px < 0 or self.curvature < 0:
            raise ValueError("n_images, perturbation_px and curvature must be non-negative")


class SynthDataset(NamedTuple):
    gt: dict
    pred: dict
    categories: Categories


def _canonical(lanes):
    return parse_lane_file(write_lane_file(lanes))


def _image_lanes(rng, cfg):
    spec = cfg.spec
    n = int(rng.integers(cfg.lanes_per_image[0], cfg.lanes_per_image[1] + 1))
    heading = rng.uniform(-0.5, 0.5)
    curvature = rng.uniform(-cfg.curvature, cfg.curvature)
    centre = spec.width_px / 2 + rng.uniform(-40, 40)
    y_bottom = spec.height_px
    span = spec.height_px - spec.cut_height_px
    gt, pred = [], []
    for i in range(n):
        y_top = spec.cut_height_px + rng.uniform(0, 0.3 * span)
        ys = np.arange(y_bottom, y_top, -ROW_STEP, dtype=np.float64)[::-1]
        depth = y_bottom - ys
        xs = centre + (i - (n - 1) / 2) * LANE_SPACING + heading * depth + curvature * depth**2
        xs = np.clip(xs, 0, spec.width_px - 1)
        noise = rng.uniform(-1.0, 1.0, size=len(ys))
        if len(ys) < 2:
            continue
        gt.append(Lane(np.column_stack([xs, ys])))
        pred.append(Lane(np.column_stack([xs + cfg.perturbation_px * noise, ys])))
    return _canonical(gt), _canonical(pred)


def synth_dataset(cfg: SynthConfig) -> SynthDataset:
    """In-memory dataset; images of the ``cross`` category carry no lanes."""
    rng = np.random.default_rng(cfg.seed)
    gt, pred = {}, {}
    members = {name: [] for name in CATEGORY_NAMES}
    for k in range(cfg.n_images):
        image_id = f"synth/{k:05d}.jpg"
        category = CATEGORY_NAMES[int(rng.integers(len(CATEGORY_NAMES)))]
        members[category].append(image_id)
        lanes = _image_lanes(rng, cfg)
        if category in NO_LANE:
            lanes = [], []
        gt[image_id], pred[image_id] = lanes
    categories = Categories({k: tuple(v) for k, v in members.items()}, NO_LANE)
    return SynthDataset(gt, pred, categories)


def write_dataset(lanes_by_id, root) -> None:
    root = Path(root)
    for image_id in sorted(lanes_by_id):
        path = root / lane_path_for(image_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(write_lane_file(lanes_by_id[image_id]))


def gen_synthetic(cfg: SynthConfig, out_dir) -> SynthDataset:
    """Write ``gt/``, ``pred/`` and ``list/`` trees under ``out_dir``.

    ``list/test.txt`` enumerates all images and ``list/test_split/<name>.txt``
    each category. Returns the two :class:`DatasetIndex` objects in place of
    the in-memory lane dicts.
    """
    out = Path(out_dir)
    data = synth_dataset(cfg)
    write_dataset(data.gt, out / "gt")
    write_dataset(data.pred, out / "pred")
    split = out / "list" / "test_split"
    split.mkdir(parents=True, exist_ok=True)
    ids = sorted(data.gt)
    (out / "list" / "test.txt").write_text("".join(i + "\n" for i in ids))
    for name, members in data.categories.members.items():
        (split / f"{name}.txt").write_text("".join(i + "\n" for i in members))
    return SynthDataset(
        DatasetIndex.from_list(out / "gt", ids, no_lane=NO_LANE),
        DatasetIndex.from_list(out / "pred", ids, no_lane=NO_LANE),
        data.categories,
    )
