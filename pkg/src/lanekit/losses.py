"""LineIoU, directional IoU terms and the combined directional loss.

Every point is widened into the interval ``[x - m, x + m]``. The positional
term compares predicted and target intervals over all jointly valid rows;
the left/right terms only measure how far the prediction strays to one
side of the target.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .lane_model import SampledLane

DEFAULT_EXPANSION = 15.0


@dataclass(frozen=True)
class ExpansionConfig:
    m: float = DEFAULT_EXPANSION

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"expansion m must be positive, got {self.m}")


@dataclass(frozen=True)
class DIoUCoefficients:
    alpha: float = 1.0
    beta: float = 0.5
    gamma: float = 0.5

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("coefficients must be non-negative")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValueError("at least one coefficient must be positive")


@dataclass(frozen=True)
class LossWeights:
    w_iou: float = 1.0
    w_cls: float = 1.0
    w_xytl: float = 1.0
    w_se: float = 1.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.w_iou, self.w_cls, self.w_xytl, self.w_se])):
            raise ValueError("loss weights must be finite")


def _as_cfg(cfg):
    return ExpansionConfig() if cfg is None else cfg


def _joint(pred: SampledLane, tgt: SampledLane):
    if not np.array_equal(pred.rows, tgt.rows):
        raise ValueError("prediction and target are sampled at different row anchors")
    mask = pred.valid & tgt.valid
    if not mask.any():
        raise ValueError("prediction and target share no valid rows")
    return mask


# Array-level kernels. ``px`` and ``tx`` hold only jointly valid rows.

def _p_iou(px, tx, m):
    delta = np.abs(px - tx)
    return np.sum(2 * m - delta) / np.sum(2 * m + delta)


# (tx - max(px - m, tx - m)) / m and its mirror, written via the offset
# px - tx so a perfect point gives exactly 1.
def _dl_terms(px, tx, m):
    return 1.0 - np.maximum(px - tx, 0.0) / m


def _dr_terms(px, tx, m):
    return 1.0 - np.maximum(tx - px, 0.0) / m


def _d_iou(px, tx, m, k):
    return (
        k.alpha * (1 - _p_iou(px, tx, m))
        + k.beta * (1 - np.mean(_dl_terms(px, tx, m)))
        + k.gamma * (1 - np.mean(_dr_terms(px, tx, m)))
    )


def _d_iou_grad(px, tx, m, k):
    d = px - tx
    # right-hand derivative at d == 0
    right = d >= 0
    sign = np.where(right, 1.0, -1.0)
    delta = np.abs(d)
    inter = np.sum(2 * m - delta)
    union = np.sum(2 * m + delta)
    n = len(px)
    grad = k.alpha * sign * (inter + union) / union**2
    grad = grad + np.where(right, k.beta / (n * m), -k.gamma / (n * m))
    return grad


def p_iou(pred: SampledLane, tgt: SampledLane, cfg: ExpansionConfig | None = None) -> float:
    """LineIoU: summed interval overlap over summed interval union.

    Not clamped, so it goes negative once predictions drift more than
    ``2 m`` from their targets.
    """
    mask = _joint(pred, tgt)
    return float(_p_iou(pred.xs[mask], tgt.xs[mask], _as_cfg(cfg).m))


def dl_iou(pred: SampledLane, tgt: SampledLane, cfg: ExpansionConfig | None = None) -> float:
    """Mean left-direction IoU; only penalizes predictions right of the target."""
    mask = _joint(pred, tgt)
    return float(np.mean(_dl_terms(pred.xs[mask], tgt.xs[mask], _as_cfg(cfg).m)))


def dr_iou(pred: SampledLane, tgt: SampledLane, cfg: ExpansionConfig | None = None) -> float:
    mask = _joint(pred, tgt)
    return float(np.mean(_dr_terms(pred.xs[mask], tgt.xs[mask], _as_cfg(cfg).m)))


def d_iou_loss(
    pred: SampledLane,
    tgt: SampledLane,
    cfg: ExpansionConfig | None = None,
    k: DIoUCoefficients | None = None,
) -> float:
    mask = _joint(pred, tgt)
    k = DIoUCoefficients() if k is None else k
    return float(_d_iou(pred.xs[mask], tgt.xs[mask], _as_cfg(cfg).m, k))


def d_iou_grad(
    pred: SampledLane,
    tgt: SampledLane,
    cfg: ExpansionConfig | None = None,
    k: DIoUCoefficients | None = None,
) -> np.ndarray:
    """Gradient of :func:`d_iou_loss` with respect to every predicted x.

    Rows outside the joint validity mask get zero. At ``pred == tgt`` the
    right-hand derivative is returned.
    """
    mask = _joint(pred, tgt)
    k = DIoUCoefficients() if k is None else k
    grad = np.zeros(len(pred.rows))
    grad[mask] = _d_iou_grad(pred.xs[mask], tgt.xs[mask], _as_cfg(cfg).m, k)
    return grad


def _weighted(iou_term, components, w):
    return (
        w.w_iou * components[iou_term]
        + w.w_cls * components["l_cls"]
        + w.w_xytl * components["l_xytl"]
        + w.w_se * components["l_se"]
    )


def total_loss_v1(components: Mapping[str, float], w: LossWeights | None = None) -> float:
    """Weighted total with the LineIoU loss (keys ``l_piou, l_cls, l_xytl, l_se``)."""
    return float(_weighted("l_piou", components, LossWeights() if w is None else w))


def total_loss_v2(components: Mapping[str, float], w: LossWeights | None = None) -> float:
    """Same as :func:`total_loss_v1` with ``l_diou`` in place of ``l_piou``."""
    return float(_weighted("l_diou", components, LossWeights() if w is None else w))
