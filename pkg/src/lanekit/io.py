"""Lane annotation files, dataset indices and report emission.

Lane files follow the CULane ``.lines.txt`` layout: one lane per line,
whitespace-separated ``x y`` pairs. List files hold one relative image id
per line (e.g. ``driver_100_30frame/05251517_0433.MP4/00000.jpg``); the lane
file for an id sits next to it with ``.jpg`` replaced by ``.lines.txt``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DatasetError, InvalidLaneError, LaneFileError
from .lane_model import Lane

log = logging.getLogger(__name__)

LANE_SUFFIX = ".lines.txt"


def parse_lane_file(text: str) -> list[Lane]:
    lanes = []
    skipped = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) % 2:
            raise LaneFileError(lineno, f"odd number of values ({len(tokens)})")
        try:
            values = [float(t) for t in tokens]
        except ValueError as e:
            raise LaneFileError(lineno, str(e)) from None
        try:
            lanes.append(Lane(list(zip(values[0::2], values[1::2]))))
        except InvalidLaneError as e:
            if "at least 2 points" not in str(e):
                raise LaneFileError(lineno, str(e)) from None
            skipped += 1
    if skipped:
        log.warning("skipped %d lane(s) with fewer than 2 distinct points", skipped)
    return lanes


def _num(v):
    return f"{v:.5f}"


def write_lane_file(lanes) -> str:
    return "".join(
        " ".join(f"{_num(x)} {_num(y)}" for x, y in lane.points) + "\n" for lane in lanes
    )


def read_lanes(path) -> list[Lane]:
    return parse_lane_file(Path(path).read_text())


def lane_path_for(image_id: str) -> str:
    stem, ext = os.path.splitext(image_id)
    return (stem if ext else image_id) + LANE_SUFFIX


def read_list(path) -> list[str]:
    ids = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            ids.append(line.lstrip("/"))
    return ids


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    lane_file: Path
    category: str | None = None


@dataclass(frozen=True)
class DatasetIndex:
    root: Path
    records: tuple
    no_lane_categories: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        ids = [r.image_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise DatasetError("duplicate image ids in dataset index")

    @classmethod
    def from_list(cls, root, image_ids, category_of=None, no_lane=()) -> DatasetIndex:
        """Index the lane files of ``image_ids`` under ``root``; all must exist."""
        root = Path(root)
        category_of = category_of or {}
        records = []
        missing = []
        for image_id in sorted(set(image_ids)):
            path = root / lane_path_for(image_id)
            if not path.is_file():
                missing.append(str(path))
            records.append(ImageRecord(image_id, path, category_of.get(image_id)))
        if missing:
            raise DatasetError(f"{len(missing)} lane file(s) missing, e.g. {missing[:3]}")
        return cls(root, tuple(records), frozenset(no_lane))

    @classmethod
    def scan(cls, root, no_lane=()) -> DatasetIndex:
        """Index every ``*.lines.txt`` below ``root``; ids use a ``.jpg`` suffix."""
        root = Path(root)
        ids = [
            p.relative_to(root).as_posix()[: -len(LANE_SUFFIX)] + ".jpg"
            for p in root.rglob("*" + LANE_SUFFIX)
        ]
        return cls.from_list(root, ids, no_lane=no_lane)

    @property
    def image_ids(self) -> list[str]:
        return [r.image_id for r in self.records]

    def load_lanes(self) -> dict[str, list[Lane]]:
        return {r.image_id: read_lanes(r.lane_file) for r in self.records}


def read_categories(category_lists, no_lane=()):
    """Build :class:`lanekit.evaluation.Categories` from ``{name: list path}``."""
    from .evaluation import Categories

    members = {name: tuple(read_list(path)) for name, path in category_lists.items()}
    return Categories(members, frozenset(n for n in no_lane if n in members))


def report_json(reports) -> str:
    """Serialize ``{key: MetricsReport}`` with stable key order."""
    return json.dumps({k: r.to_dict() for k, r in reports.items()}, indent=2) + "\n"


CSV_FIELDS = ("window", "category", "mf1", "f1@50", "f1@75", "fp_count")


def _f1_cell(f1s, t):
    return f"{f1s[t]:.6f}" if t in f1s else ""


def report_csv(reports) -> str:
    """One row per (window, category), plus an ``overall`` row per window."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for key, report in reports.items():
        overall = {t: s.f1 for t, s in report.per_threshold.items()}
        first_fp = report.per_threshold[report.thresholds[0]].fp
        w.writerow([key, "overall", f"{report.mf1:.6f}", _f1_cell(overall, 0.5),
                    _f1_cell(overall, 0.75), first_fp])
        for name, c in report.per_category.items():
            if c.mf1 is None:
                w.writerow([key, name, "", "", "", c.fp_count])
            else:
                w.writerow([key, name, f"{c.mf1:.6f}", _f1_cell(c.f1, 0.5),
                            _f1_cell(c.f1, 0.75), c.fp_count])
    return buf.getvalue()
