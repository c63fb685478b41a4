"""
LineIoU and the directional terms
=================================

Sweep a prediction across a fixed target and watch how the positional and
directional terms react, then check the gradient numerically.
"""
import numpy as np

from lanekit import (
    DIoUCoefficients,
    ExpansionConfig,
    SampledLane,
    d_iou_grad,
    d_iou_loss,
    dl_iou,
    dr_iou,
    p_iou,
)

cfg = ExpansionConfig(m=15)
k = DIoUCoefficients(alpha=1, beta=0.5, gamma=0.5)
rows = np.array([0])
target = SampledLane(rows, [100.0], [True])

###############################################################################
# Single-point sweep. DL only moves when the prediction is right of the
# target, DR only when it is left.

print(f"{'offset':>7} {'P_IoU':>8} {'DL':>8} {'DR':>8} {'loss':>8}")
for offset in (-45, -15, -10, 0, 10, 15, 45):
    pred = target.with_xs([100.0 + offset])
    print(f"{offset:7d} {p_iou(pred, target, cfg):8.4f} {dl_iou(pred, target, cfg):8.4f} "
          f"{dr_iou(pred, target, cfg):8.4f} {d_iou_loss(pred, target, cfg, k):8.4f}")

###############################################################################
# A whole lane, 36 anchors, with the prediction drifting right at the top.

rng = np.random.default_rng(0)
rows = np.arange(36) * 9
tx = 800 + 0.3 * rows
px = tx + np.linspace(25, 0, 36) + rng.normal(0, 1, 36)
pred = SampledLane(rows, px, np.ones(36, bool))
tgt = SampledLane(rows, tx, np.ones(36, bool))
print("lane loss:", round(d_iou_loss(pred, tgt, cfg, k), 6))

###############################################################################
# Analytic gradient against central differences.

g = d_iou_grad(pred, tgt, cfg, k)
h = 1e-4
numeric = np.array([
    (d_iou_loss(pred.with_xs(px + h * e), tgt, cfg, k)
     - d_iou_loss(pred.with_xs(px - h * e), tgt, cfg, k)) / (2 * h)
    for e in np.eye(36)
])
print("max |analytic - numeric|:", float(np.max(np.abs(g - numeric))))

###############################################################################
# One plain gradient step lowers the loss.

step = pred.with_xs(px - 200 * g)
print("after one step:", round(d_iou_loss(step, tgt, cfg, k), 6))
