"""Exact boundary-distance fields, normalised per instance and merged per scene."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .labels import InstanceMap, LabelMap, connected_components
from .pngio import grayscale_png


class NormKind(enum.Enum):
    L1 = 1
    L2 = 2
    LINF = math.inf

    @classmethod
    def parse(cls, value) -> NormKind:
        """Accept a NormKind, a rho value (1, 2, inf) or a name ('l1', 'l2', 'linf')."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            names = {"l1": cls.L1, "manhattan": cls.L1, "l2": cls.L2, "euclidean": cls.L2,
                     "linf": cls.LINF, "chessboard": cls.LINF, "inf": cls.LINF}
            if key in names:
                return names[key]
            raise ValueError(f"unknown norm {value!r}; expected l1, l2 or linf")
        for kind in cls:
            if value == kind.value:
                return kind
        raise ValueError(f"rho must be 1, 2 or inf, got {value!r}")

    @property
    def label(self) -> str:
        return {NormKind.L1: "l1", NormKind.L2: "l2", NormKind.LINF: "linf"}[self]


_TRANSFORMS = {
    NormKind.L1: _kernels.manhattan,
    NormKind.L2: _kernels.squared_euclidean,
    NormKind.LINF: _kernels.chessboard,
}


def exact_transform(fg: np.ndarray, norm=NormKind.L2) -> np.ndarray:
    """Integer distance from each ``True`` pixel to the nearest ``False`` pixel.

    Returns squared distances for L2 and plain distances for L1 / Linf;
    ``False`` pixels are 0.  Pixels with no background anywhere get
    ``_kernels.INF``.
    """
    norm = NormKind.parse(norm)
    fg = np.ascontiguousarray(fg, dtype=bool)
    return _TRANSFORMS[norm](fg)


@dataclass(frozen=True, eq=False)
class RawDistanceMap:
    """Distance of each pixel of ``class_id`` to the nearest pixel of another label.

    ``exact`` holds integers (squared for L2); ``values`` the real distances.
    ``degenerate`` is set when the class covers the whole image.
    """

    exact: np.ndarray = field(repr=False)
    class_id: int
    norm: NormKind
    degenerate: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.exact.shape

    @property
    def values(self) -> np.ndarray:
        if self.degenerate:
            return np.where(self.exact > 0, np.inf, 0.0)
        d = self.exact.astype(np.float64)
        return np.sqrt(d) if self.norm is NormKind.L2 else d


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-pixel normalised distance in [0, 1].

    ``valid`` is False on ignore pixels, which are excluded from evaluation
    and hold 0 in ``values``.
    """

    values: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)
    degenerate_classes: tuple[int, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_png(self) -> bytes:
        """16-bit grayscale rendering (value x 65535); ignore pixels are black."""
        return grayscale_png(np.where(self.valid, self.values, 0.0), bits=16)


def distance_map(lmap: LabelMap, class_id: int, norm=NormKind.L2) -> RawDistanceMap:
    norm = NormKind.parse(norm)
    if not 0 <= class_id < lmap.num_classes:
        raise ValueError(f"class {class_id} not in 0..{lmap.num_classes - 1}")
    fg = lmap.mask(class_id)
    exact = exact_transform(fg, norm)
    degenerate = bool(fg.all())
    if degenerate:
        exact = np.ones_like(exact)
    return RawDistanceMap(exact, class_id, norm, degenerate)


def normalize_per_instance(raw: RawDistanceMap, instances: InstanceMap,
                           shift: bool = False) -> DistanceField:
    """Divide distances by the maximum of the instance each pixel belongs to.

    With ``shift`` the boundary ring maps to 0 instead: (D - 1) / (max - 1),
    with single-ring instances set to 0.
    """
    if raw.shape != instances.shape:
        raise ValueError(f"shape mismatch: {raw.shape} vs {instances.shape}")
    if raw.class_id != instances.class_id:
        raise ValueError("distance map and instances belong to different classes")
    ids = instances.instance_ids
    inside = ids > 0
    if raw.degenerate:
        return DistanceField(inside.astype(np.float64), np.ones(raw.shape, bool), (raw.class_id,))
    d = raw.values
    peak = _kernels.instance_max(d, ids, instances.count)
    out = np.zeros(raw.shape, dtype=np.float64)
    if shift:
        denom = peak - 1.0
        scaled = np.divide(d - 1.0, denom[ids], out=np.zeros_like(d), where=denom[ids] > 0)
        out[inside] = scaled[inside]
    else:
        out[inside] = d[inside] / peak[ids[inside]]
    return DistanceField(out, np.ones(raw.shape, bool))


def combine_fields(fields: dict[int, DistanceField], lmap: LabelMap) -> DistanceField:
    """Merge per-class fields into one scene field, keyed by each pixel's label."""
    valid = lmap.valid
    out = np.zeros(lmap.shape, dtype=np.float64)
    covered = np.zeros(lmap.shape, dtype=bool)
    degenerate: list[int] = []
    for class_id, f in sorted(fields.items()):
        if f.shape != lmap.shape:
            raise ValueError(f"field for class {class_id} has shape {f.shape}, map has {lmap.shape}")
        m = lmap.mask(class_id) & valid
        out[m] = f.values[m]
        covered |= m
        degenerate.extend(f.degenerate_classes)
    missing = valid & ~covered
    if missing.any():
        y, x = np.argwhere(missing)[0]
        raise ValueError(
            f"pixel (x={x}, y={y}) of class {lmap.labels[y, x]} is covered by no field"
        )
    return DistanceField(out, valid, tuple(sorted(set(degenerate))))


def scene_distance_field(gt: LabelMap, norm=NormKind.L2, connectivity: int = 4,
                         shift: bool = False) -> DistanceField:
    """Normalised distance field for every class present in ``gt``."""
    norm = NormKind.parse(norm)
    fields = {}
    for c in gt.classes_present():
        raw = distance_map(gt, c, norm)
        inst = connected_components(gt, c, connectivity)
        fields[c] = normalize_per_instance(raw, inst, shift=shift)
    return combine_fields(fields, gt)
