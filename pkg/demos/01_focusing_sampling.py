"""
Focusing row anchors
====================

Compare uniform and focusing anchor rows on the cropped 320-row view and
write an SVG overlay for each.
"""
from pathlib import Path

import numpy as np

from lanekit import ImageSpec, RowSampler
from lanekit.render import demo_lane, render_overlay

spec = ImageSpec(1640, 590, 270)
height = spec.cropped_height

###############################################################################
# Rows for both modes. Row 0 is the top of the crop, i.e. the far end of the
# road.

uniform = RowSampler(height, 36, "uniform").rows()
focusing = RowSampler(height, 36, "focusing", base=10).rows()
print("uniform :", uniform.tolist())
print("focusing:", focusing.tolist())

###############################################################################
# How many anchors land in the far half of the view?

for name, rows in (("uniform", uniform), ("focusing", focusing)):
    far = int(np.sum(rows < height / 2))
    print(f"{name:9s} far-half anchors: {far}/{len(rows)}")

###############################################################################
# Larger bases push more anchors to the top.

for base in (1.5, 3, 10, 30, 100):
    rows = RowSampler(height, 36, "focusing", base=base).rows()
    print(f"base={base:>5}: {len(rows)} rows, first gaps {np.diff(rows)[:4].tolist()}")

###############################################################################
# SVG overlays, written next to this script.

out = Path(__file__).with_suffix("")
out.mkdir(exist_ok=True)
lane = demo_lane(spec)
for name, rows in (("uniform", uniform), ("focusing", focusing)):
    path = out / f"{name}.svg"
    path.write_text(render_overlay(lane, rows, spec, title=f"{name} anchors"))
    print("wrote", path)
