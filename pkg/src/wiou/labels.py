"""Dense label maps and the image operations the metrics are built on."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels

_SQUARE = np.ones((3, 3), dtype=bool)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    if a.flags.writeable:
        a = a.copy()
        a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabelMap:
    """A height x width grid of class ids, stored row-major (``labels[y, x]``).

    ``ignore_id`` marks pixels excluded from evaluation; it may lie outside
    ``range(num_classes)`` (e.g. 255).
    """

    labels: np.ndarray
    num_classes: int
    ignore_id: int | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or labels.shape[0] < 1 or labels.shape[1] < 1:
            raise ValueError(f"labels must be a non-empty 2-D array, got shape {labels.shape}")
        if not np.issubdtype(labels.dtype, np.integer):
            raise TypeError(f"labels must be integer, got {labels.dtype}")
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        bad = (labels < 0) | (labels >= self.num_classes)
        if self.ignore_id is not None:
            bad &= labels != self.ignore_id
        if bad.any():
            y, x = np.argwhere(bad)[0]
            raise ValueError(
                f"label {labels[y, x]} at (x={x}, y={y}) outside 0..{self.num_classes - 1}"
            )
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int32, copy=False)))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    @property
    def valid(self) -> np.ndarray:
        """Mask of pixels that take part in evaluation."""
        if self.ignore_id is None:
            return np.ones(self.shape, dtype=bool)
        return self.labels != self.ignore_id

    def mask(self, class_id: int) -> np.ndarray:
        return self.labels == class_id

    def classes_present(self) -> list[int]:
        present = np.unique(self.labels)
        return [int(c) for c in present if c != self.ignore_id]

    def replace(self, labels: np.ndarray) -> LabelMap:
        return LabelMap(labels, self.num_classes, self.ignore_id)

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.ignore_id == other.ignore_id
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class InstanceMap:
    """Connected components of one class; id 0 means "not this class"."""

    instance_ids: np.ndarray
    count: int
    class_id: int
    connectivity: int = 4

    @property
    def shape(self) -> tuple[int, int]:
        return self.instance_ids.shape

    @property
    def width(self) -> int:
        return self.instance_ids.shape[1]

    @property
    def height(self) -> int:
        return self.instance_ids.shape[0]


@dataclass(frozen=True)
class BoundarySet:
    """Boundary pixels of one class, as ``(x, y)`` rows sorted row-major."""

    points: np.ndarray = field(repr=False)
    class_id: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.points}


def _check_class(lmap: LabelMap, class_id: int) -> None:
    if not 0 <= class_id < lmap.num_classes:
        raise ValueError(f"class {class_id} not in 0..{lmap.num_classes - 1}")


def _check_connectivity(connectivity: int) -> None:
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")


def connected_components(lmap: LabelMap, class_id: int, connectivity: int = 4) -> InstanceMap:
    """Label the maximal connected regions of ``class_id``.

    Components are numbered 1..count in the row-major order of their first
    pixel, so the output is fully deterministic.
    """
    _check_class(lmap, class_id)
    _check_connectivity(connectivity)
    ids, count = _kernels.label_components(lmap.mask(class_id), connectivity == 8)
    ids = ids.astype(np.int32)
    ids.setflags(write=False)
    return InstanceMap(ids, int(count), class_id, connectivity)


def boundary_mask(labels: np.ndarray, class_id: int | None = None) -> np.ndarray:
    """Pixels with at least one in-image 4-neighbour of a different label.

    With ``class_id`` the result is restricted to pixels of that class.
    """
    differs = np.zeros(labels.shape, dtype=bool)
    horiz = labels[:, 1:] != labels[:, :-1]
    vert = labels[1:, :] != labels[:-1, :]
    differs[:, 1:] |= horiz
    differs[:, :-1] |= horiz
    differs[1:, :] |= vert
    differs[:-1, :] |= vert
    if class_id is not None:
        differs &= labels == class_id
    return differs


def extract_boundary(lmap: LabelMap, class_id: int) -> BoundarySet:
    """Pixels of ``class_id`` touching another label across a 4-neighbour edge.

    The image border itself never makes a pixel a boundary pixel.
    """
    _check_class(lmap, class_id)
    ys, xs = np.nonzero(boundary_mask(lmap.labels, class_id))
    return BoundarySet(np.stack([xs, ys], axis=1).astype(np.int64), class_id)


def _nearest_class(labels: np.ndarray, candidates: list[int]) -> np.ndarray:
    # per pixel, the candidate class whose nearest pixel is closest
    # (squared Euclidean); argmin picks the smallest id on ties
    dists = np.stack([_kernels.squared_euclidean(labels != c) for c in candidates])
    return np.asarray(candidates)[np.argmin(dists, axis=0)]


def morphological_op(lmap: LabelMap, class_id: int, op: str, level: int) -> LabelMap:
    """Erode or dilate one class with ``level`` iterations of a 3x3 square.

    Dilated-into pixels become ``class_id``.  Eroded-away pixels take the
    label of the nearest pixel of another class in the input map; ties go to
    the smallest class id and the ignore label is never used as a fill.
    Pixels beyond the image border count as part of the class, so erosion
    only eats in from inter-class edges.
    """
    _check_class(lmap, class_id)
    if op not in ("erode", "dilate"):
        raise ValueError(f"op must be 'erode' or 'dilate', got {op!r}")
    if int(level) != level or level < 1:
        raise ValueError(f"level must be a positive integer, got {level}")
    mask = lmap.mask(class_id)
    out = lmap.labels.copy()
    if op == "dilate":
        grown = ndimage.binary_dilation(mask, _SQUARE, iterations=int(level))
        out[grown] = class_id
        return lmap.replace(out)

    kept = ndimage.binary_erosion(mask, _SQUARE, iterations=int(level), border_value=1)
    removed = mask & ~kept
    if not removed.any():
        return lmap
    others = [c for c in lmap.classes_present() if c != class_id]
    if not others:
        # nothing else in the scene to reveal
        return lmap
    fill = _nearest_class(lmap.labels, others)
    out[removed] = fill[removed]
    return lmap.replace(out)
