import struct

import numpy as np
import pytest

from lanekit.coordmaps import (
    dump_coord_maps,
    dumps_coord_maps,
    load_coord_maps,
    loads_coord_maps,
    make_coord_maps,
)
from oracles import coord_value


def test_three_by_two():
    maps = make_coord_maps(3, 2)
    assert maps.x_map.tolist() == [[-1, 0, 1], [-1, 0, 1]]
    assert maps.y_map.tolist() == [[-1, -1, -1], [1, 1, 1]]
    assert (maps.width, maps.height) == (3, 2)


def test_two_by_two_corners():
    maps = make_coord_maps(2, 2)
    corners = {(maps.x_map[i, j], maps.y_map[i, j]) for i in (0, 1) for j in (0, 1)}
    assert corners == {(-1, -1), (1, -1), (-1, 1), (1, 1)}


@pytest.mark.parametrize("w, h", [(1, 5), (5, 1), (0, 0)])
def test_rejects_degenerate(w, h):
    with pytest.raises(ValueError):
        make_coord_maps(w, h)


@pytest.mark.parametrize("w, h", [(2, 2), (7, 3), (64, 17), (13, 64)])
def test_matches_formula_exactly(w, h):
    maps = make_coord_maps(w, h)
    for i in range(1, h + 1):
        for j in range(1, w + 1):
            assert (maps.x_map[i - 1, j - 1], maps.y_map[i - 1, j - 1]) == coord_value(i, j, w, h)


def test_spacing_symmetry_and_transpose():
    maps = make_coord_maps(9, 5)
    np.testing.assert_allclose(np.diff(maps.x_map, axis=1), 2 / 8, rtol=0, atol=1e-15)
    np.testing.assert_allclose(np.diff(maps.y_map, axis=0), 2 / 4, rtol=0, atol=1e-15)
    assert abs(maps.x_map.sum()) < 1e-12 and abs(maps.y_map.sum()) < 1e-12
    swapped = make_coord_maps(5, 9)
    assert np.array_equal(maps.x_map, swapped.y_map.T)
    assert np.array_equal(maps.y_map, swapped.x_map.T)


def test_binary_layout(tmp_path):
    maps = make_coord_maps(3, 2)
    blob = dumps_coord_maps(maps)
    assert blob[:4] == b"CMAP"
    assert struct.unpack_from("<II", blob, 4) == (3, 2)
    assert len(blob) == 12 + 4 * 12
    values = struct.unpack_from("<12f", blob, 12)
    assert values == (-1, 0, 1, -1, 0, 1, -1, -1, -1, 1, 1, 1)

    path = tmp_path / "maps.bin"
    dump_coord_maps(make_coord_maps(33, 17), path)
    back = load_coord_maps(path)
    assert np.array_equal(back.x_map, make_coord_maps(33, 17).x_map.astype(np.float32))


def test_loads_rejects_garbage():
    with pytest.raises(ValueError):
        loads_coord_maps(b"NOPE" + bytes(8))
    with pytest.raises(ValueError):
        loads_coord_maps(dumps_coord_maps(make_coord_maps(2, 2))[:-1])
