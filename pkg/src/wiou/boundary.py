"""Boundary-based scores: one-to-one matched edge F1 and the thresholded BF score."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import _kernels
from .labels import BoundarySet, LabelMap, boundary_mask, extract_boundary

DEFAULT_THETA = 3.0


class EdgeScores(NamedTuple):
    precision: float | None
    recall: float | None
    f1: float | None


def _ball_offsets(theta: float) -> np.ndarray:
    r = int(np.floor(theta))
    d = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(d, d)
    keep = dx * dx + dy * dy <= theta * theta
    return np.stack([dx[keep], dy[keep]], axis=1)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not theta >= 0 or not np.isfinite(theta):
        raise ValueError(f"theta must be a finite non-negative distance, got {theta}")
    return theta


def candidate_pairs(pred: np.ndarray, gt: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """All (pred index, gt index) pairs at Euclidean distance <= theta.

    Points are integer (x, y) rows; the gt points are bucketed into a dense
    unit grid and each pred point probes the lattice offsets of its theta-ball.
    """
    if len(pred) == 0 or len(gt) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    offsets = _ball_offsets(theta)
    r = int(np.floor(theta))
    lo = np.minimum(pred.min(0), gt.min(0)) - r
    hi = np.maximum(pred.max(0), gt.max(0)) + r
    grid = np.full((hi[1] - lo[1] + 1, hi[0] - lo[0] + 1), -1, dtype=np.int64)
    g = gt - lo
    grid[g[:, 1], g[:, 0]] = np.arange(len(gt))
    p = pred - lo
    rows, cols = [], []
    for dx, dy in offsets:
        hit = grid[p[:, 1] + dy, p[:, 0] + dx]
        m = hit >= 0
        rows.append(np.nonzero(m)[0])
        cols.append(hit[m])
    return np.concatenate(rows), np.concatenate(cols)


def edge_match(gt_edges: BoundarySet | np.ndarray, pred_edges: BoundarySet | np.ndarray,
               theta: float = DEFAULT_THETA) -> tuple[int, int]:
    """Maximum one-to-one matching between edge pixels no further than ``theta`` apart.

    Returns ``(matched_pred, matched_gt)``, which are always equal.
    """
    theta = _check_theta(theta)
    gt = np.asarray(getattr(gt_edges, "points", gt_edges), dtype=np.int64).reshape(-1, 2)
    pred = np.asarray(getattr(pred_edges, "points", pred_edges), dtype=np.int64).reshape(-1, 2)
    rows, cols = candidate_pairs(pred, gt, theta)
    if len(rows) == 0:
        return 0, 0
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(pred), len(gt))
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    n = int((match >= 0).sum())
    return n, n


def _harmonic(p: float | None, r: float | None) -> float | None:
    if p is None and r is None:
        return None
    p = p or 0.0
    r = r or 0.0
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def _same_shape(gt: LabelMap, pred: LabelMap) -> None:
    if gt.shape != pred.shape:
        raise ValueError(f"dimension mismatch: gt {gt.width}x{gt.height}, pred {pred.width}x{pred.height}")


def edge_prf(gt: LabelMap, pred: LabelMap, class_id: int,
             theta: float = DEFAULT_THETA) -> EdgeScores:
    """Edge precision, recall and F1 under one-to-one matching.

    A missing side leaves its ratio undefined (None) and scores F1 as 0;
    with no edges on either side everything is None.
    """
    _same_shape(gt, pred)
    ge = extract_boundary(gt, class_id)
    pe = extract_boundary(pred, class_id)
    matched, _ = edge_match(ge, pe, theta)
    p = _ratio(matched, len(pe))
    r = _ratio(matched, len(ge))
    return EdgeScores(p, r, _harmonic(p, r))


def bf_score(gt: LabelMap, pred: LabelMap, class_id: int,
             theta: float = DEFAULT_THETA) -> float | None:
    """Boundary F-measure with distance thresholding (no one-to-one constraint)."""
    _same_shape(gt, pred)
    theta = _check_theta(theta)
    ge = boundary_mask(gt.labels, class_id)
    pe = boundary_mask(pred.labels, class_id)
    return _bf_from_masks(ge, pe, theta)


def _bf_from_masks(ge: np.ndarray, pe: np.ndarray, theta: float) -> float | None:
    n_gt, n_pred = int(ge.sum()), int(pe.sum())
    if n_gt == 0 and n_pred == 0:
        return None
    if n_gt == 0 or n_pred == 0:
        return 0.0
    t2 = theta * theta
    # squared distance of every pixel to the nearest edge pixel of the other map
    near_gt = _kernels.squared_euclidean(~ge) <= t2
    near_pred = _kernels.squared_euclidean(~pe) <= t2
    p = int((pe & near_gt).sum()) / n_pred
    r = int((ge & near_pred).sum()) / n_gt
    return _harmonic(p, r)
