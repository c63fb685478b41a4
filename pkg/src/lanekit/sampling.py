"""Row-anchor generators: uniform spacing and log-warped focusing.

Anchors live in the frame of the cropped region, so row 0 is the first row
below the crop line (the most distant road) and row ``height`` its bottom.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_N_SAMPLE = 36
DEFAULT_BASE = 10.0


class SamplingMode(str, enum.Enum):
    UNIFORM = "uniform"
    FOCUSING = "focusing"


@dataclass(frozen=True)
class RowSampler:
    height: int
    n_sample: int = DEFAULT_N_SAMPLE
    mode: SamplingMode = SamplingMode.FOCUSING
    base: float = DEFAULT_BASE

    def __post_init__(self):
        object.__setattr__(self, "mode", SamplingMode(self.mode))
        if self.n_sample < 2:
            raise ValueError(f"n_sample must be >= 2, got {self.n_sample}")
        if self.height < 1:
            raise ValueError(f"height must be positive, got {self.height}")
        if not self.base > 1:
            raise ValueError(f"base must be > 1, got {self.base}")

    def rows(self) -> np.ndarray:
        if self.mode is SamplingMode.UNIFORM:
            return uniform_rows(self)
        return focusing_rows(self)


def round_half_away(values) -> np.ndarray:
    """Round to nearest integer, ties away from zero (``np.round`` rounds to even)."""
    values = np.asarray(values, dtype=np.float64)
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def _fractions(n):
    return np.arange(n, dtype=np.float64) / (n - 1)


def _require_mode(sampler, mode):
    if sampler.mode is not mode:
        raise ValueError(f"sampler mode is {sampler.mode.value!r}, expected {mode.value!r}")


def uniform_rows(sampler: RowSampler) -> np.ndarray:
    _require_mode(sampler, SamplingMode.UNIFORM)
    # integer product first keeps exact .5 ties exact
    i = np.arange(sampler.n_sample, dtype=np.float64)
    rows = round_half_away(sampler.height * i / (sampler.n_sample - 1))
    return np.clip(rows, 0, sampler.height)


def log_warp(t, base):
    """``log_base(1 + (base - 1) t)``: maps [0, 1] onto [0, 1], concave for base > 1."""
    t = np.asarray(t, dtype=np.float64)
    return np.log1p((base - 1.0) * t) / math.log1p(base - 1.0)


def focusing_positions(sampler: RowSampler) -> np.ndarray:
    """Continuous (unrounded) focusing anchor positions.

    The arithmetic sequence is pushed through a reflected log warp so the
    spacing widens monotonically from the top of the region to the bottom.
    """
    a = _fractions(sampler.n_sample)
    return sampler.height * (1.0 - log_warp(1.0 - a, sampler.base))


def focusing_rows(sampler: RowSampler) -> np.ndarray:
    _require_mode(sampler, SamplingMode.FOCUSING)
    rows = np.clip(round_half_away(focusing_positions(sampler)), 0, sampler.height)
    return dedup_rows(rows)


def dedup_rows(rows) -> np.ndarray:
    """Drop repeated values from a nondecreasing integer sequence."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 1:
        raise ValueError("rows must be 1-D")
    steps = np.diff(rows)
    if np.any(steps < 0):
        raise ValueError("rows must be nondecreasing")
    keep = np.concatenate([[True], steps > 0]) if len(rows) else np.zeros(0, dtype=bool)
    return rows[keep]
