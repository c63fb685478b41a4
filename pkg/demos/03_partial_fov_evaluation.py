"""
Evaluating on the far part of the road
======================================

Score a synthetic dataset on the full cropped view and on its top half and
top third. Prediction noise here grows towards the top of the image, so
the far windows score lower.
"""
import numpy as np

from lanekit import Lane, evaluate_fov
from lanekit.io import report_csv
from lanekit.synth import SynthConfig, synth_dataset

data = synth_dataset(SynthConfig(seed=1, n_images=150))

###############################################################################
# Bend every prediction away from its ground truth, more strongly near the
# horizon (small y).

rng = np.random.default_rng(2)
pred = {}
for image_id, lanes in data.gt.items():
    bent = []
    for lane in lanes:
        far = (590 - lane.ys) / 320
        bent.append(Lane(np.column_stack([lane.xs + rng.choice([-1, 1]) * 14 * far**2, lane.ys])))
    pred[image_id] = bent

###############################################################################
# Three windows, same predictions.

reports = evaluate_fov(pred, data.gt, data.categories, fractions=(1, 1 / 2, 1 / 3))
for fraction, report in reports.items():
    print(f"fraction {fraction:.3f}: mF1={report.mf1:.4f}  F1@50={report.f1(0.5):.4f}  "
          f"F1@75={report.f1(0.75):.4f}")

###############################################################################
# Per-category table as written by ``lanekit eval --csv``.

print(report_csv({f"{f:.3f}": r for f, r in reports.items()}))
