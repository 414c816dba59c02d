"""Region metrics, weighted IoU, and the per-pair metric report."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .boundary import DEFAULT_THETA, _bf_from_masks, _check_theta, _harmonic, _ratio, _same_shape, edge_match
from .distance import DistanceField, NormKind, scene_distance_field
from .labels import LabelMap, boundary_mask
from .weighting import WeightMap, check_alpha, weight_map

METRIC_KEYS = ("iou", "precision", "recall", "f1",
               "edge_precision", "edge_recall", "edge_f1", "bf_score")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class WeightedConfusion:
    tp_w: float
    fp_w: float
    fn_w: float


def precision(c: ConfusionCounts) -> float | None:
    return _ratio(c.tp, c.tp + c.fp)


def recall(c: ConfusionCounts) -> float | None:
    return _ratio(c.tp, c.tp + c.fn)


def f1_score(c: ConfusionCounts) -> float | None:
    """2TP / (2TP + FN + FP); None when the class is absent from both maps."""
    return _ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp)


def iou(c: ConfusionCounts) -> float | None:
    """TP / (TP + FN + FP); None when the class is absent from both maps."""
    return _ratio(c.tp, c.tp + c.fn + c.fp)


def confusion(gt: LabelMap, pred: LabelMap, class_id: int) -> ConfusionCounts:
    """Pixel counts for one class, one-vs-rest; pixels ignored in gt are skipped."""
    _same_shape(gt, pred)
    valid = gt.valid
    g = gt.labels[valid] == class_id
    p = pred.labels[valid] == class_id
    tp = int(np.count_nonzero(g & p))
    fn = int(np.count_nonzero(g)) - tp
    fp = int(np.count_nonzero(p)) - tp
    return ConfusionCounts(tp, fp, fn, int(g.size) - tp - fn - fp)


def weighted_confusion(gt: LabelMap, pred: LabelMap, wmap: WeightMap,
                       class_id: int) -> WeightedConfusion:
    _same_shape(gt, pred)
    if wmap.shape != gt.shape:
        raise ValueError(f"weight map shape {wmap.shape} != map shape {gt.shape}")
    valid = gt.valid
    g = (gt.labels == class_id) & valid
    p = (pred.labels == class_id) & valid
    w = wmap.weights
    return WeightedConfusion(_seqsum(w[g & p]), _seqsum(w[p & ~g]), _seqsum(w[g & ~p]))


def _seqsum(x: np.ndarray) -> float:
    # left-to-right in row-major order, matching the bincount sums in evaluate_pair
    return float(np.cumsum(x)[-1]) if x.size else 0.0


def wiou(gt: LabelMap, pred: LabelMap, wmap: WeightMap, class_id: int) -> float | None:
    """Weighted IoU of one class.

    Each pixel contributes its weight (taken from the ground-truth weight map)
    to the intersection and union masses.  ``wmap`` must have been built from
    ``gt``.  Returns None if the class is in neither map or its union carries
    no weight.
    """
    wc = weighted_confusion(gt, pred, wmap, class_id)
    den = wc.tp_w + wc.fn_w + wc.fp_w
    if den == 0:
        return None
    return wc.tp_w / den


def alpha_key(alpha: float) -> str:
    return f"{alpha:g}"


def _fmt(v):
    return None if v is None else float(f"{v:.12g}")


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


@dataclass
class MetricReport:
    """Per-class and class-mean scores of one (gt, pred) pair.

    ``per_class[c]`` maps metric names to values (None = undefined); the
    ``"wiou"`` entry is itself keyed by alpha.  ``aggregate`` averages every
    metric over the classes present in the ground truth.
    """

    alphas: tuple[float, ...]
    theta: float
    norm: str
    per_class: dict[int, dict] = field(default_factory=dict)
    aggregate: dict = field(default_factory=dict)
    gt_classes: tuple[int, ...] = ()
    warnings: list[str] = field(default_factory=list)
    class_names: dict[int, str] = field(default_factory=dict)

    def mean(self, metric: str, alpha: float | None = None) -> float | None:
        if metric == "wiou":
            return self.aggregate["wiou"][alpha_key(alpha)]
        return self.aggregate[metric]

    def to_dict(self) -> dict:
        def clean(entry):
            out = {k: _fmt(entry[k]) for k in METRIC_KEYS}
            out["wiou"] = {a: _fmt(v) for a, v in entry["wiou"].items()}
            return out

        return {
            "alphas": [_fmt(a) for a in self.alphas],
            "theta": _fmt(self.theta),
            "norm": self.norm,
            "gt_classes": list(self.gt_classes),
            "aggregate": clean(self.aggregate),
            "per_class": {
                str(c): {"name": self.class_names.get(c, str(c)), **clean(e)}
                for c, e in sorted(self.per_class.items())
            },
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "name", "alpha", "wiou", *METRIC_KEYS])
        rows = [(str(c), self.class_names.get(c, str(c)), e) for c, e in sorted(self.per_class.items())]
        rows.append(("mean", "mean", self.aggregate))
        for cid, name, e in rows:
            for a in self.alphas:
                vals = [e["wiou"][alpha_key(a)], *(e[k] for k in METRIC_KEYS)]
                w.writerow([cid, name, alpha_key(a), *("" if v is None else f"{v:.12g}" for v in vals)])
        return buf.getvalue()

    def summary_line(self) -> str:
        def s(v):
            return "undefined" if v is None else f"{v:.12g}"

        parts = [f"mIoU={s(self.aggregate['iou'])}"]
        parts += [f"mwIoU[a={alpha_key(a)}]={s(self.aggregate['wiou'][alpha_key(a)])}" for a in self.alphas]
        parts.append(f"edgeF1={s(self.aggregate['edge_f1'])}")
        return " ".join(parts)


def evaluate_pair(gt: LabelMap, pred: LabelMap, alphas=(1.0,), theta: float = DEFAULT_THETA,
                  norm=NormKind.L2, connectivity: int = 4, shift: bool = False,
                  class_names: dict[int, str] | None = None,
                  dfield: DistanceField | None = None) -> MetricReport:
    """Score ``pred`` against ``gt`` with every metric.

    The distance field (and hence every weight map) depends on ``gt`` only;
    pass ``dfield`` to reuse one computed earlier for the same ground truth.
    """
    _same_shape(gt, pred)
    alphas = tuple(check_alpha(a) for a in alphas)
    if not alphas:
        raise ValueError("at least one alpha is required")
    theta = _check_theta(theta)
    norm = NormKind.parse(norm)
    if dfield is None:
        dfield = scene_distance_field(gt, norm, connectivity, shift)
    wmaps = [weight_map(dfield, a) for a in alphas]

    valid = gt.valid
    gv = gt.labels[valid]
    pv = pred.labels[valid]
    eq = gv == pv
    n_bins = max(gt.num_classes, pred.num_classes, int(pv.max(initial=0)) + 1, int(gv.max(initial=0)) + 1)
    tp = np.bincount(gv[eq], minlength=n_bins)
    gt_count = np.bincount(gv, minlength=n_bins)
    pred_count = np.bincount(pv, minlength=n_bins)
    wsums = []
    for wm in wmaps:
        wv = wm.weights[valid]
        wsums.append((
            np.bincount(gv[eq], weights=wv[eq], minlength=n_bins),
            np.bincount(gv[~eq], weights=wv[~eq], minlength=n_bins),
            np.bincount(pv[~eq], weights=wv[~eq], minlength=n_bins),
        ))

    warnings: list[str] = [
        f"class {c} covers the whole image; its distance field is set to 1" for c in dfield.degenerate_classes
    ]
    gt_present = tuple(int(c) for c in np.nonzero(gt_count)[0] if c != gt.ignore_id)
    n_valid = int(gv.size)
    per_class = {}
    for c in range(gt.num_classes):
        if c == gt.ignore_id:
            continue
        t = int(tp[c])
        counts = ConfusionCounts(t, int(pred_count[c]) - t, int(gt_count[c]) - t,
                                 n_valid - int(gt_count[c]) - int(pred_count[c]) + t)
        entry = {"iou": iou(counts), "precision": precision(counts), "recall": recall(counts),
                 "f1": f1_score(counts), "wiou": {}}
        for a, (tw, fnw, fpw) in zip(alphas, wsums):
            den = tw[c] + fnw[c] + fpw[c]
            if den > 0:
                entry["wiou"][alpha_key(a)] = float(tw[c] / den)
            else:
                entry["wiou"][alpha_key(a)] = None
                if counts.tp + counts.fp + counts.fn > 0:
                    warnings.append(f"class {c}: weighted union is 0 at alpha={alpha_key(a)}")
        if counts.tp + counts.fp + counts.fn == 0:
            entry.update(edge_precision=None, edge_recall=None, edge_f1=None, bf_score=None)
            warnings.append(f"class {c} absent from both maps; metrics undefined")
        else:
            ge = boundary_mask(gt.labels, c)
            pe = boundary_mask(pred.labels, c)
            gpts = np.argwhere(ge)[:, ::-1]
            ppts = np.argwhere(pe)[:, ::-1]
            m, _ = edge_match(gpts, ppts, theta)
            ep, er = _ratio(m, len(ppts)), _ratio(m, len(gpts))
            entry.update(edge_precision=ep, edge_recall=er, edge_f1=_harmonic(ep, er),
                         bf_score=_bf_from_masks(ge, pe, theta))
        per_class[c] = entry

    aggregate = {k: _mean(per_class[c][k] for c in gt_present) for k in METRIC_KEYS}
    aggregate["wiou"] = {
        alpha_key(a): _mean(per_class[c]["wiou"][alpha_key(a)] for c in gt_present) for a in alphas
    }
    return MetricReport(alphas, theta, norm.label, per_class, aggregate, gt_present, warnings,
                        dict(class_names or {}))
