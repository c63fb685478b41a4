import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanekit import (
    DIoUCoefficients,
    ExpansionConfig,
    LossWeights,
    SampledLane,
    d_iou_grad,
    d_iou_loss,
    dl_iou,
    dr_iou,
    p_iou,
    total_loss_v1,
    total_loss_v2,
)
from oracles import central_difference, diou_direct

M15 = ExpansionConfig(15)
K = DIoUCoefficients(1, 0.5, 0.5)


def lanes(pred_xs, tgt_xs, valid=None):
    n = len(pred_xs)
    rows = np.arange(n) * 10
    valid = np.ones(n, bool) if valid is None else np.asarray(valid)
    return SampledLane(rows, pred_xs, valid), SampledLane(rows, tgt_xs, np.ones(n, bool))


def reflect(pred, tgt):
    return pred.with_xs(2 * tgt.xs - pred.xs)


@pytest.mark.parametrize(
    "px, tx, expected",
    [([100, 200], [100, 200], 1.0), ([115], [100], 1 / 3), ([145], [100], -0.2)],
)
def test_p_iou(px, tx, expected):
    assert p_iou(*lanes(px, tx), M15) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("px, expected", [(100, 1.0), (110, 1 / 3), (80, 1.0)])
def test_dl_iou(px, expected):
    assert dl_iou(*lanes([px], [100]), M15) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("px, expected", [(100, 1.0), (95, 2 / 3), (130, 1.0)])
def test_dr_iou(px, expected):
    assert dr_iou(*lanes([px], [100]), M15) == pytest.approx(expected, abs=1e-12)


def test_d_iou_loss_examples():
    assert d_iou_loss(*lanes([3, 50], [3, 50]), M15, DIoUCoefficients(2, 3, 4)) == 0
    assert d_iou_loss(*lanes([115], [100]), M15, K) == pytest.approx(7 / 6, abs=1e-12)
    assert d_iou_loss(*lanes([85], [100]), M15, K) == pytest.approx(7 / 6, abs=1e-12)


def test_gradient_examples():
    g = d_iou_grad(*lanes([105], [100]), M15, K)
    assert g[0] == pytest.approx(60 / 1225 + 1 / 30, abs=1e-12)
    # far left: positional term pulls right, DR term pulls right, DL is flat
    g = d_iou_grad(*lanes([40], [100]), M15, K)
    assert g[0] == pytest.approx(-4 * 15 / (30 + 60) ** 2 - 0.5 / 15, abs=1e-12)
    g = d_iou_grad(*lanes([40, 7, 9], [100, 0, 0], valid=[True, False, True]), M15, K)
    assert g[1] == 0


def test_gradient_at_kink_is_right_derivative():
    pred, tgt = lanes([100.0], [100.0])
    g = d_iou_grad(pred, tgt, M15, K)[0]
    h = 1e-6
    up = d_iou_loss(pred.with_xs([100 + h]), tgt, M15, K)
    assert g == pytest.approx(up / h, rel=1e-4)


def test_errors():
    a = SampledLane([0, 1], [0, 0], [True, False])
    b = SampledLane([0, 1], [0, 0], [False, True])
    with pytest.raises(ValueError, match="no valid rows"):
        p_iou(a, b)
    with pytest.raises(ValueError, match="different row anchors"):
        dl_iou(a, SampledLane([0, 2], [0, 0], [True, True]))
    with pytest.raises(ValueError):
        ExpansionConfig(0)
    with pytest.raises(ValueError):
        DIoUCoefficients(0, 0, 0)
    with pytest.raises(ValueError):
        DIoUCoefficients(-1, 1, 1)
    with pytest.raises(ValueError):
        LossWeights(w_cls=float("inf"))


def test_defaults_follow_training_setup():
    assert ExpansionConfig().m == 15
    assert LossWeights().w_iou == 1


@pytest.mark.parametrize(
    "fn, comps, w, expected",
    [
        (total_loss_v1, dict(l_piou=0.5, l_cls=0.2, l_xytl=0.1, l_se=0.3), LossWeights(), 1.1),
        (total_loss_v1, dict(l_piou=0, l_cls=0, l_xytl=0, l_se=0), LossWeights(3, 4, 5, 6), 0),
        (total_loss_v1, dict(l_piou=0.25, l_cls=0.5, l_xytl=9, l_se=9), LossWeights(2, 1, 0, 0),
         1.0),
        (total_loss_v2, dict(l_diou=7 / 6, l_cls=0, l_xytl=0, l_se=0), LossWeights(), 7 / 6),
        (total_loss_v2, dict(l_diou=0, l_cls=0, l_xytl=0, l_se=0), LossWeights(), 0),
        (total_loss_v2, dict(l_diou=0.1, l_cls=0.2, l_xytl=0.3, l_se=0.4), LossWeights(), 1.0),
    ],
)
def test_total_losses(fn, comps, w, expected):
    assert fn(comps, w) == pytest.approx(expected, abs=1e-12)


xs = st.floats(-500, 2000, allow_nan=False)
offsets = st.one_of(st.just(0.0), st.floats(1e-3, 40), st.floats(-40, -1e-3))
points = st.lists(st.tuples(xs, offsets), min_size=1, max_size=36)


@given(points, st.floats(1, 40))
@settings(max_examples=300, deadline=None)
def test_mirror_and_per_point_identities(pts, m):
    tx = np.array([p[0] for p in pts])
    px = tx + np.array([p[1] for p in pts])
    cfg = ExpansionConfig(m)
    pred, tgt = lanes(px, tx)
    assert dl_iou(pred, tgt, cfg) == pytest.approx(dr_iou(reflect(pred, tgt), tgt, cfg), abs=1e-9)
    for p, t in zip(px, tx):
        pp, tt = lanes([p], [t])
        dl, dr = dl_iou(pp, tt, cfg), dr_iou(pp, tt, cfg)
        assert max(dl, dr) == 1
        assert min(dl, dr) == pytest.approx(1 - abs(p - t) / m, abs=1e-9)


@given(points, st.floats(1, 40))
@settings(max_examples=300, deadline=None)
def test_p_iou_bounded_and_monotone(pts, m):
    tx = np.array([p[0] for p in pts])
    px = tx + np.array([p[1] for p in pts])
    pred, tgt = lanes(px, tx)
    cfg = ExpansionConfig(m)
    v = p_iou(pred, tgt, cfg)
    assert v <= 1
    worse = pred.with_xs(px + np.sign(px - tx + 1e-300) * 1.0)
    assert p_iou(worse, tgt, cfg) < v


@given(points, st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5))
@settings(max_examples=300, deadline=None)
def test_loss_matches_direct_and_is_nonnegative(pts, a, b, c):
    m = 15.0
    tx = np.array([p[0] for p in pts])
    px = tx + np.array([p[1] for p in pts]) * 0.75
    k = DIoUCoefficients(a, b, c)
    loss = d_iou_loss(*lanes(px, tx), ExpansionConfig(m), k)
    assert loss == pytest.approx(diou_direct(px, tx, m, a, b, c), abs=1e-9)
    assert loss >= -1e-12
    if np.all(px == tx):
        assert loss == 0
    else:
        assert loss > 0


@given(points, st.floats(-1e4, 1e4))
@settings(max_examples=200, deadline=None)
def test_translation_invariance(pts, c):
    tx = np.array([p[0] for p in pts])
    px = tx + np.array([p[1] for p in pts])
    base = lanes(px, tx)
    moved = lanes(px + c, tx + c)
    for fn in (p_iou, dl_iou, dr_iou):
        assert fn(*moved, M15) == pytest.approx(fn(*base, M15), abs=1e-9)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 37))
        tx = rng.uniform(0, 1640, n)
        delta = rng.uniform(1, 40, n) * rng.choice([-1, 1], n)
        pred, tgt = lanes(tx + delta, tx)
        k = DIoUCoefficients(*rng.uniform(0.1, 2, 3))
        analytic = d_iou_grad(pred, tgt, M15, k)
        numeric = central_difference(
            lambda x: d_iou_loss(pred.with_xs(x), tgt, M15, k), pred.xs, h=1e-4
        )
        assert np.all(np.abs(analytic - numeric) <= 1e-6 * np.maximum(1, np.abs(analytic)))
