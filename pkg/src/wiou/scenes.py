"""Synthetic road scenes and the perturbed predictions used by the benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .labels import LabelMap, _nearest_class, morphological_op

ROAD, SIDEWALK, BUILDING, VEGETATION, SKY, PERSON, CAR = range(7)


class SceneError(ValueError):
    pass


def _grid(height: int, width: int):
    return np.mgrid[0:height, 0:width]


@dataclass(frozen=True)
class Rectangle:
    cx: float
    cy: float
    width: int
    height: int

    def bbox(self):
        x0 = math.floor(self.cx - self.width / 2 + 0.5)
        y0 = math.floor(self.cy - self.height / 2 + 0.5)
        return x0, y0, x0 + self.width - 1, y0 + self.height - 1

    def mask(self, height: int, width: int) -> np.ndarray:
        x0, y0, x1, y1 = self.bbox()
        m = np.zeros((height, width), dtype=bool)
        m[max(y0, 0):y1 + 1, max(x0, 0):x1 + 1] = True
        return m


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float

    def bbox(self):
        r = self.radius
        return (math.ceil(self.cx - r), math.ceil(self.cy - r),
                math.floor(self.cx + r), math.floor(self.cy + r))

    def mask(self, height: int, width: int) -> np.ndarray:
        yy, xx = _grid(height, width)
        return (xx - self.cx) ** 2 + (yy - self.cy) ** 2 <= self.radius ** 2


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    rx: float
    ry: float

    def bbox(self):
        return (math.ceil(self.cx - self.rx), math.ceil(self.cy - self.ry),
                math.floor(self.cx + self.rx), math.floor(self.cy + self.ry))

    def mask(self, height: int, width: int) -> np.ndarray:
        yy, xx = _grid(height, width)
        return ((xx - self.cx) / self.rx) ** 2 + ((yy - self.cy) / self.ry) ** 2 <= 1.0


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[tuple[float, float], ...]

    def bbox(self):
        v = np.asarray(self.vertices, dtype=float)
        return (math.ceil(v[:, 0].min()), math.ceil(v[:, 1].min()),
                math.floor(v[:, 0].max()), math.floor(v[:, 1].max()))

    def mask(self, height: int, width: int) -> np.ndarray:
        # even-odd rule on pixel centres
        yy, xx = _grid(height, width)
        inside = np.zeros((height, width), dtype=bool)
        v = list(self.vertices)
        for (x1, y1), (x2, y2) in zip(v, v[1:] + v[:1]):
            if y1 == y2:
                continue
            crosses = (yy >= min(y1, y2)) & (yy < max(y1, y2))
            xcross = x1 + (yy - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (xx < xcross)
        return inside


_SHAPES = {"rectangle": Rectangle, "disk": Disk, "ellipse": Ellipse, "polygon": Polygon}


def shape_to_dict(shape) -> dict:
    kind = {v: k for k, v in _SHAPES.items()}[type(shape)]
    d = {"shape": kind, **shape.__dict__}
    if kind == "polygon":
        d["vertices"] = [list(p) for p in shape.vertices]
    return d


def shape_from_dict(d: dict):
    d = dict(d)
    kind = d.pop("shape")
    if kind == "polygon":
        d["vertices"] = tuple(tuple(p) for p in d["vertices"])
    return _SHAPES[kind](**d)


@dataclass(frozen=True)
class ObjectSpec:
    """One object made of the union of one or more primitive shapes."""

    class_id: int
    parts: tuple


@dataclass(frozen=True)
class SceneSpec:
    """Horizontal background bands (top to bottom) with one object painted on top."""

    width: int
    height: int
    bands: tuple[tuple[int, float], ...]
    object: ObjectSpec
    name: str = ""
    num_classes: int = 7

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise SceneError("scene must be at least 1x1")
        if not self.bands:
            raise SceneError("at least one band is required")
        fracs = [f for _, f in self.bands]
        if any(f <= 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise SceneError(f"band fractions must be positive and sum to 1, got {fracs}")
        ids = [c for c, _ in self.bands]
        if self.object is not None:
            ids.append(self.object.class_id)
            for part in self.object.parts:
                x0, y0, x1, y1 = part.bbox()
                if x0 < 0 or y0 < 0 or x1 >= self.width or y1 >= self.height:
                    raise SceneError(f"{part} does not fit in a {self.width}x{self.height} image")
        if any(not 0 <= c < self.num_classes for c in ids):
            raise SceneError(f"class ids {ids} outside 0..{self.num_classes - 1}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "width": self.width,
            "height": self.height,
            "num_classes": self.num_classes,
            "bands": [[c, f] for c, f in self.bands],
            "object": None if self.object is None else {
                "class_id": self.object.class_id,
                "parts": [shape_to_dict(p) for p in self.object.parts],
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> SceneSpec:
        obj = d.get("object")
        if obj is not None:
            obj = ObjectSpec(int(obj["class_id"]), tuple(shape_from_dict(p) for p in obj["parts"]))
        return cls(int(d["width"]), int(d["height"]), tuple((int(c), float(f)) for c, f in d["bands"]),
                   obj, d.get("name", ""), int(d.get("num_classes", 7)))


def object_mask(spec: SceneSpec) -> np.ndarray:
    m = np.zeros((spec.height, spec.width), dtype=bool)
    if spec.object is not None:
        for part in spec.object.parts:
            m |= part.mask(spec.height, spec.width)
    return m


def generate_scene(spec: SceneSpec) -> LabelMap:
    """Rasterise ``spec``: bands first, then the object over them."""
    spec.validate()
    labels = np.zeros((spec.height, spec.width), dtype=np.int32)
    edges = np.rint(np.cumsum([f for _, f in spec.bands]) * spec.height).astype(int)
    top = 0
    for (class_id, _), bottom in zip(spec.bands, edges):
        labels[top:bottom] = class_id
        top = bottom
    if spec.object is not None:
        labels[object_mask(spec)] = spec.object.class_id
    return LabelMap(labels, spec.num_classes)


def default_scenes(width: int = 256, height: int = 256) -> list[SceneSpec]:
    """Three street scenes with a car, a person and a tree in the middle."""
    sx, sy = width / 256, height / 256
    car = ObjectSpec(CAR, (
        Rectangle(128 * sx, 152 * sy, round(124 * sx), round(40 * sy)),
        Disk(128 * sx, 134 * sy, 28 * min(sx, sy)),
    ))
    person = ObjectSpec(PERSON, (Ellipse(128 * sx, 140 * sy, 22 * sx, 64 * sy),))
    tree = ObjectSpec(VEGETATION, (
        Disk(128 * sx, 96 * sy, 48 * min(sx, sy)),
        Rectangle(128 * sx, 172 * sy, round(18 * sx), round(84 * sy)),
    ))
    return [
        SceneSpec(width, height, ((SKY, 0.25), (BUILDING, 0.2), (SIDEWALK, 0.1), (ROAD, 0.45)),
                  car, "scene01"),
        SceneSpec(width, height, ((SKY, 0.3), (BUILDING, 0.3), (SIDEWALK, 0.4)),
                  person, "scene02"),
        SceneSpec(width, height, ((SKY, 0.55), (SIDEWALK, 0.2), (ROAD, 0.25)),
                  tree, "scene03"),
    ]


def jitter_boundary(gt: LabelMap, class_id: int, rng: np.random.Generator,
                    prob: float = 0.3, band: float = 2.0) -> LabelMap:
    """Flip pixels within ``band`` px of the object's edge with probability ``prob``.

    Object pixels flip to the nearest other class, outside pixels to the
    object class.  One uniform draw is taken per image pixel in row-major
    order, so the result depends only on the generator state.
    """
    obj = gt.mask(class_id)
    others = [c for c in gt.classes_present() if c != class_id]
    draws = rng.random(gt.shape)
    if not obj.any() or not others:
        return gt
    b2 = band * band
    inner = obj & (_kernels.squared_euclidean(obj) <= b2)
    outer = ~obj & (_kernels.squared_euclidean(~obj) <= b2)
    flip = (inner | outer) & (draws < prob)
    out = gt.labels.copy()
    fill = _nearest_class(gt.labels, others)
    out[flip & obj] = fill[flip & obj]
    out[flip & outer] = class_id
    return gt.replace(out)


def variant_tags(levels: int = 5) -> list[str]:
    return ([f"erode{k}" for k in range(levels, 0, -1)] + ["base"]
            + [f"dilate{k}" for k in range(1, levels + 1)])


@dataclass(frozen=True)
class DatasetItem:
    scene: str
    variant: str
    gt: LabelMap
    pred: LabelMap


def generate_dataset(specs: list[SceneSpec] | None = None, levels: int = 5,
                     seed: int = 0) -> list[DatasetItem]:
    """(2 * levels + 1) predictions per scene: eroded, jittered base, dilated.

    Ordered scene-major, then erode levels..1, base, dilate 1..levels.
    """
    specs = default_scenes() if specs is None else specs
    items = []
    for index, spec in enumerate(specs):
        gt = generate_scene(spec)
        obj = spec.object.class_id
        rng = np.random.default_rng([seed, index])
        base = jitter_boundary(gt, obj, rng)
        name = spec.name or f"scene{index + 1:02d}"
        for tag in variant_tags(levels):
            if tag == "base":
                pred = base
            else:
                op = "erode" if tag.startswith("erode") else "dilate"
                pred = morphological_op(base, obj, op, int(tag[len(op):]))
            items.append(DatasetItem(name, tag, gt, pred))
    return items


TRIPLET_TAGS = ("boundary", "interior", "split")


def _take(candidates: np.ndarray, key: np.ndarray, n: int) -> np.ndarray:
    """Flat indices of the ``n`` candidates with the smallest key (row-major on ties)."""
    idx = np.flatnonzero(candidates)
    order = np.lexsort((idx, key.ravel()[idx]))
    return idx[order[:n]]


def _blob(candidates: np.ndarray, seed_flat: int, n: int) -> np.ndarray:
    h, w = candidates.shape
    yy, xx = _grid(h, w)
    sy, sx = divmod(seed_flat, w)
    return _take(candidates, (yy - sy) ** 2 + (xx - sx) ** 2, n)


def generate_equal_error_triplet(spec: SceneSpec, error_count: int
                                 ) -> tuple[LabelMap, LabelMap, LabelMap]:
    """Three predictions of one scene with identical per-class error counts.

    Each member mislabels ``ceil(E/2)`` object pixels as the background
    class touching the object most (FN) and ``floor(E/2)`` pixels of that
    class as object (FP).  Only the placement differs:

    - ``boundary``: FN on the object's rim, FP hugging it from outside;
    - ``interior``: FN as a compact hole at the object's deepest point, FP as
      a compact blob deep inside the background region;
    - ``split``: FN on the rim, FP as the detached background blob.
    """
    gt = generate_scene(spec)
    o = spec.object.class_id
    obj = gt.mask(o)
    error_count = int(error_count)
    n_fn = (error_count + 1) // 2
    n_fp = error_count // 2
    if error_count < 1:
        raise SceneError("error_count must be >= 1")

    ring = np.zeros_like(obj)
    ring[:, 1:] |= obj[:, :-1]
    ring[:, :-1] |= obj[:, 1:]
    ring[1:, :] |= obj[:-1, :]
    ring[:-1, :] |= obj[1:, :]
    ring &= ~obj
    touching = np.bincount(gt.labels[ring], minlength=gt.num_classes)
    if touching.sum() == 0:
        raise SceneError("object has no neighbouring class")
    k = int(np.argmax(touching))

    depth_in = _kernels.squared_euclidean(obj)
    depth_out = _kernels.squared_euclidean(~obj)
    background = gt.mask(k)
    # keep the detached blob clear of the object by more than the edge tolerance
    far = background & (depth_out > 36)
    if n_fn >= int(obj.sum()) // 2:
        raise SceneError(f"{n_fn} false negatives do not fit in a {int(obj.sum())}-pixel object")
    if n_fp > int(far.sum()) // 2 or n_fp > int((background & (depth_out <= 36)).sum()):
        raise SceneError(f"{n_fp} false positives do not fit in class {k}")

    fn_rim = _take(obj, depth_in, n_fn)
    fn_hole = _blob(obj, int(np.argmax(np.where(obj, depth_in, -1))), n_fn)
    fp_rim = _take(background, depth_out, n_fp)
    depth_bg = _kernels.squared_euclidean(background)
    fp_blob = _blob(far, int(np.argmax(np.where(far, depth_bg, -1))), n_fp)

    def member(fn_idx, fp_idx):
        out = gt.labels.copy().ravel()
        out[fn_idx] = k
        out[fp_idx] = o
        return gt.replace(out.reshape(gt.shape))

    return member(fn_rim, fp_rim), member(fn_hole, fp_blob), member(fn_rim, fp_blob)

