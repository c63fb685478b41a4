"""SVG overlays of a lane and the anchors a sampler places on it."""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .lane_model import ImageSpec, Lane, sample_lane_at_rows

MARKER_RADIUS = 4


def anchor_markers(lane: Lane, rows, spec: ImageSpec) -> np.ndarray:
    """Image-space ``(x, y)`` of every anchor the lane reaches.

    ``rows`` are in the cropped frame, so row 0 is image row ``cut_height_px``.
    """
    image_rows = np.asarray(rows, dtype=np.int64) + spec.cut_height_px
    sampled = sample_lane_at_rows(lane, image_rows)
    return np.column_stack([sampled.xs[sampled.valid], sampled.rows[sampled.valid]])


def render_overlay(lane: Lane, rows, spec: ImageSpec, color="red", title=None) -> str:
    markers = anchor_markers(lane, rows, spec)
    polyline = " ".join(f"{x:.3f},{y:.3f}" for x, y in lane.points)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width_px}" '
        f'height="{spec.height_px}" viewBox="0 0 {spec.width_px} {spec.height_px}">',
    ]
    if title:
        parts.append(f"<title>{escape(title)}</title>")
    parts += [
        f'<rect x="0" y="0" width="{spec.width_px}" height="{spec.cut_height_px}" '
        'fill="#dddddd" class="crop"/>',
        f'<polyline class="lane" fill="none" stroke="black" stroke-width="2" points="{polyline}"/>',
    ]
    for x, y in markers:
        parts.append(
            f'<circle class="anchor" cx="{x:.3f}" cy="{y:.0f}" r="{MARKER_RADIUS}" '
            f"fill={quoteattr(color)}/>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def demo_lane(spec: ImageSpec) -> Lane:
    """A gently curving lane covering the whole cropped view."""
    ys = np.linspace(spec.cut_height_px, spec.height_px, 17)
    depth = (spec.height_px - ys) / max(spec.cropped_height, 1)
    xs = spec.width_px * (0.3 + 0.25 * depth - 0.1 * depth**2)
    return Lane(np.column_stack([xs, ys]))
