import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import flood_fill_components, neighbour_boundary
from wiou.labels import (LabelMap, boundary_mask, connected_components, extract_boundary,
                         morphological_op)


def lm(rows, num_classes=None, ignore_id=None):
    a = np.array(rows)
    return LabelMap(a, num_classes or int(a.max()) + 1, ignore_id)


def label_maps(max_side=16, max_classes=4):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side),
                     st.integers(1, max_classes)).flatmap(
        lambda t: arrays(np.int32, (t[0], t[1]), elements=st.integers(0, t[2] - 1)).map(
            lambda a: LabelMap(a, t[2])))


def test_labelmap_validation():
    with pytest.raises(ValueError):
        LabelMap(np.zeros((0, 3), int), 1)
    with pytest.raises(ValueError, match="x=1, y=0"):
        LabelMap(np.array([[0, 5]]), 2)
    m = LabelMap(np.array([[0, 255]]), 2, ignore_id=255)
    assert m.valid.tolist() == [[True, False]]
    assert m.classes_present() == [0]
    with pytest.raises(ValueError):
        m.labels[0, 0] = 1


def test_diagonal_pixels_connectivity():
    m = lm([[1, 0], [0, 1]])
    assert connected_components(m, 1, 4).count == 2
    assert connected_components(m, 1, 8).count == 1


def test_absent_class_has_no_components():
    inst = connected_components(lm([[0, 0]], num_classes=3), 2)
    assert inst.count == 0
    assert not inst.instance_ids.any()


def test_component_ids_follow_scan_order():
    m = lm([[0, 0, 1],
            [1, 0, 1],
            [1, 0, 0]])
    ids = connected_components(m, 1).instance_ids
    # the right-hand component starts first in row-major order
    assert ids[0, 2] == 1 and ids[1, 0] == 2


def test_components_match_flood_fill_on_random_maps():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = rng.integers(0, 3, size=(16, 16))
        m = LabelMap(a, 3)
        for conn in (4, 8):
            for c in range(3):
                inst = connected_components(m, c, conn)
                ids, n = flood_fill_components(a == c, conn)
                assert inst.count == n
                assert np.array_equal(inst.instance_ids, ids)


@settings(max_examples=60, deadline=None)
@given(label_maps())
def test_components_partition_class(m):
    for c in range(m.num_classes):
        inst = connected_components(m, c)
        ids = inst.instance_ids
        assert np.array_equal(ids > 0, m.labels == c)
        assert sorted(set(ids[ids > 0].tolist())) == list(range(1, inst.count + 1))


def test_boundary_uniform_map_is_empty():
    assert len(extract_boundary(lm([[1, 1, 1]] * 3), 1)) == 0


def test_boundary_single_centre_pixel():
    m = lm([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert extract_boundary(m, 1).as_set() == {(1, 1)}


def test_boundary_of_square_is_its_perimeter():
    a = np.zeros((5, 5), int)
    a[1:4, 1:4] = 1
    got = extract_boundary(LabelMap(a, 2), 1).as_set()
    expected = neighbour_boundary(a, 1)
    assert got == expected
    assert len(got) == 8 and (2, 2) not in got


@settings(max_examples=60, deadline=None)
@given(label_maps())
def test_boundary_properties(m):
    for c in range(m.num_classes):
        b = extract_boundary(m, c)
        pts = b.as_set()
        assert pts == neighbour_boundary(m.labels, c)
        assert all(m.labels[y, x] == c for x, y in pts)
        binary = LabelMap((m.labels == c).astype(int), 2)
        assert extract_boundary(binary, 1).as_set() == pts


def test_boundary_mask_all_classes():
    a = np.array([[0, 1], [0, 0]])
    assert boundary_mask(a).tolist() == [[True, True], [False, True]]


def test_erode_square_leaves_centre():
    a = np.zeros((7, 7), int)
    a[2:5, 2:5] = 1
    out = morphological_op(LabelMap(a, 2), 1, "erode", 1)
    assert np.argwhere(out.labels == 1).tolist() == [[3, 3]]
    assert (out.labels[a == 1] != 1).sum() == 8


def test_dilate_single_pixel_gives_square():
    a = np.zeros((5, 5), int)
    a[2, 2] = 1
    out = morphological_op(LabelMap(a, 2), 1, "dilate", 1)
    expected = np.zeros((5, 5), int)
    expected[1:4, 1:4] = 1
    assert np.array_equal(out.labels, expected)


def test_opening_is_anti_extensive_on_disk():
    yy, xx = np.mgrid[:16, :16]
    disk = ((xx - 7.5) ** 2 + (yy - 7.5) ** 2 <= 25).astype(int)
    m = LabelMap(disk, 2)
    opened = morphological_op(morphological_op(m, 1, "erode", 1), 1, "dilate", 1)
    assert not ((opened.labels == 1) & (disk == 0)).any()


def test_erosion_backfill_takes_nearest_class():
    # left half class 0, right half class 2, a 5-wide bar of class 1 between
    a = np.zeros((9, 12), int)
    a[:, 6:] = 2
    a[:, 4:9] = 1
    out = morphological_op(LabelMap(a, 3), 1, "erode", 1)
    row = out.labels[4].tolist()
    assert row == [0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2]


def test_erosion_backfill_tie_goes_to_smaller_id():
    a = np.array([[2, 1, 0]])
    out = morphological_op(LabelMap(a, 3), 1, "erode", 1)
    assert out.labels.tolist() == [[2, 0, 0]]


def test_erosion_can_remove_class():
    a = np.zeros((5, 5), int)
    a[2, 2] = 1
    out = morphological_op(LabelMap(a, 2), 1, "erode", 3)
    assert not (out.labels == 1).any()


@settings(max_examples=40, deadline=None)
@given(label_maps(max_side=12, max_classes=3), st.integers(1, 3), st.integers(1, 3))
def test_morphology_laws(m, a, b):
    mask = m.labels == 1 if m.num_classes > 1 else m.labels == 0
    c = 1 if m.num_classes > 1 else 0
    d_a = morphological_op(m, c, "dilate", a)
    d_ab = morphological_op(d_a, c, "dilate", b)
    d_sum = morphological_op(m, c, "dilate", a + b)
    assert np.array_equal(d_ab.labels == c, d_sum.labels == c)
    assert not (mask & (d_a.labels != c)).any()
    eroded = morphological_op(m, c, "erode", a)
    assert not ((eroded.labels == c) & ~mask).any()


def test_morphology_rejects_bad_arguments():
    m = lm([[0, 1]])
    with pytest.raises(ValueError):
        morphological_op(m, 1, "open", 1)
    with pytest.raises(ValueError):
        morphological_op(m, 1, "erode", 0)
