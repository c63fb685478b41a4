import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanekit import ImageSpec, InvalidLaneError, Lane, SampledLane, sample_lane_at_rows


def test_image_spec_invariants():
    ImageSpec(2, 2, 0)
    with pytest.raises(ValueError):
        ImageSpec(1, 10, 0)
    with pytest.raises(ValueError):
        ImageSpec(10, 10, 10)
    with pytest.raises(ValueError):
        ImageSpec(10, 10, -1)
    assert ImageSpec().cropped_height == 320


def test_lane_sorts_by_y_and_collapses_duplicates():
    lane = Lane([(120.3, 580), (100.5, 590), (10, 580)])
    assert lane.points.tolist() == [[(120.3 + 10) / 2, 580], [100.5, 590]]


@pytest.mark.parametrize(
    "points",
    [[(0, 0)], [(0, 5), (3, 5)], [(0, 0), (np.nan, 1)], [(0, 0), (1, np.inf)], [1, 2, 3]],
)
def test_lane_rejects_invalid(points):
    with pytest.raises(InvalidLaneError):
        Lane(points)


def test_lane_is_immutable():
    lane = Lane([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        lane.points[0, 0] = 5


@pytest.mark.parametrize(
    "points, rows, xs, valid",
    [
        ([(10, 0), (20, 100)], [0, 50, 100], [10, 15, 20], [True] * 3),
        ([(10, 0), (20, 100)], [150], [0], [False]),
        ([(0, 0), (10, 40), (30, 100)], [70], [20], [True]),
    ],
)
def test_sample_lane_at_rows(points, rows, xs, valid):
    s = sample_lane_at_rows(Lane(points), rows)
    np.testing.assert_allclose(s.xs, xs, rtol=0, atol=1e-12)
    assert s.valid.tolist() == valid


def test_sampled_lane_validates():
    with pytest.raises(ValueError):
        SampledLane([0, 0], [1, 2], [True, True])
    with pytest.raises(ValueError):
        SampledLane([0, 1], [1], [True, True])


lanes = st.lists(
    st.tuples(st.floats(-500, 2000, allow_nan=False), st.integers(0, 600)),
    min_size=2,
    max_size=12,
    unique_by=lambda p: p[1],
).map(Lane)


@given(lanes)
@settings(max_examples=200, deadline=None)
def test_resampling_at_vertices_is_exact(lane):
    s = sample_lane_at_rows(lane, lane.ys.astype(np.int64))
    assert s.valid.all()
    assert np.array_equal(s.xs, lane.xs)
    assert Lane(np.column_stack([s.xs, s.rows])) == lane


@given(lanes, st.lists(st.integers(-50, 700), min_size=1, max_size=40, unique=True))
@settings(max_examples=200, deadline=None)
def test_valid_mask_is_contiguous(lane, rows):
    s = sample_lane_at_rows(lane, sorted(rows))
    idx = np.flatnonzero(s.valid)
    if len(idx):
        assert np.all(np.diff(idx) == 1)
    assert np.all(s.xs[~s.valid] == 0)
