import math

import numpy as np
import pytest

from wiou.metrics import confusion, evaluate_pair
from wiou.scenes import (Disk, Ellipse, ObjectSpec, Polygon, Rectangle, SceneError, SceneSpec,
                         default_scenes, generate_dataset, generate_equal_error_triplet,
                         generate_scene, object_mask, variant_tags)


def spec_with(*parts, w=64, h=48, bands=((0, 1.0),)):
    return SceneSpec(w, h, bands, ObjectSpec(6, parts))


def test_single_band_no_object_is_uniform():
    m = generate_scene(SceneSpec(20, 10, ((3, 1.0),), None))
    assert (m.labels == 3).all()


def test_rectangle_area():
    m = generate_scene(spec_with(Rectangle(32, 24, 10, 10)))
    assert int(m.mask(6).sum()) == 100


@pytest.mark.parametrize("r", [3, 7.5, 12, 20])
def test_disk_area_bounds(r):
    n = int(object_mask(spec_with(Disk(32, 24, r), w=64, h=64)).sum())
    assert math.pi * (r - 1) ** 2 <= n <= math.pi * (r + 1) ** 2


def test_polygon_triangle():
    tri = Polygon(((10, 10), (30, 10), (10, 30)))
    n = int(object_mask(spec_with(tri)).sum())
    assert abs(n - 200) < 25


def test_ellipse_area():
    n = int(object_mask(spec_with(Ellipse(32, 24, 10, 6))).sum())
    assert abs(n - math.pi * 60) < 2 * math.pi * 16


def test_bands_stack_top_to_bottom():
    m = generate_scene(SceneSpec(4, 10, ((4, 0.3), (0, 0.7)), None))
    assert m.labels[:, 0].tolist() == [4] * 3 + [0] * 7


def test_invalid_specs():
    with pytest.raises(SceneError):
        generate_scene(spec_with(Rectangle(2, 2, 10, 10)))
    with pytest.raises(SceneError):
        generate_scene(SceneSpec(10, 10, ((0, 0.5),), None))
    with pytest.raises(SceneError):
        generate_scene(SceneSpec(10, 10, ((9, 1.0),), None))


def test_spec_dict_roundtrip():
    for spec in default_scenes():
        assert SceneSpec.from_dict(spec.to_dict()) == spec
    tri = spec_with(Polygon(((10, 10), (30, 10), (10, 30))))
    assert SceneSpec.from_dict(tri.to_dict()) == tri


def test_dataset_shape():
    items = generate_dataset()
    assert len(items) == 33
    assert len({it.gt.labels.tobytes() for it in items}) == 3
    assert [it.variant for it in items[:11]] == variant_tags()
    assert all(it.gt.shape == (256, 256) for it in items)


def test_erosion_levels_order_object_area():
    items = generate_dataset()
    for scene in ("scene01", "scene02", "scene03"):
        by_tag = {it.variant: it for it in items if it.scene == scene}
        obj = default_scenes()[int(scene[-1]) - 1].object.class_id
        area = {t: int(by_tag[t].pred.mask(obj).sum()) for t in by_tag}
        assert area["erode5"] < area["erode1"] < area["base"] < area["dilate1"] < area["dilate5"]


def test_dataset_is_seeded():
    a, b, c = generate_dataset(seed=7), generate_dataset(seed=7), generate_dataset(seed=8)
    assert all(np.array_equal(x.pred.labels, y.pred.labels) for x, y in zip(a, b))
    assert any(not np.array_equal(x.pred.labels, y.pred.labels) for x, y in zip(a, c))
    assert all(np.array_equal(x.gt.labels, y.gt.labels) for x, y in zip(a, c))


@pytest.mark.parametrize("spec", default_scenes(), ids=lambda s: s.name)
def test_triplet_equal_error_counts(spec):
    gt = generate_scene(spec)
    members = generate_equal_error_triplet(spec, 600)
    for c in range(gt.num_classes):
        counts = [confusion(gt, m, c) for m in members]
        assert len({(k.tp, k.fp, k.fn) for k in counts}) == 1
    assert sum(confusion(gt, members[0], c).fn for c in range(7)) == 600


@pytest.mark.parametrize("spec", default_scenes(), ids=lambda s: s.name)
def test_triplet_iou_ties_and_wiou_ranks(spec):
    gt = generate_scene(spec)
    boundary, interior, split = (evaluate_pair(gt, m) for m in generate_equal_error_triplet(spec, 600))
    ious = [r.mean("iou") for r in (boundary, interior, split)]
    assert max(ious) - min(ious) < 1e-12
    w = sorted([boundary.mean("wiou", 1), interior.mean("wiou", 1), split.mean("wiou", 1)])
    assert boundary.mean("wiou", 1) == w[0]
    assert w[1] - w[0] > 1e-3 and w[2] - w[1] > 1e-3


def test_triplet_rejects_oversized_error():
    with pytest.raises(SceneError):
        generate_equal_error_triplet(default_scenes()[0], 10**6)
    with pytest.raises(SceneError):
        generate_equal_error_triplet(default_scenes()[0], 0)
