"""Metric sweep over the synthetic dataset and cross-metric comparison."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boundary import DEFAULT_THETA
from .distance import NormKind, scene_distance_field
from .metrics import alpha_key, confusion, evaluate_pair
from .pngio import KITTI_PALETTE, Palette, decode_label_image, encode_label_image
from .scenes import (TRIPLET_TAGS, DatasetItem, SceneSpec, default_scenes,
                     generate_dataset, generate_equal_error_triplet, generate_scene)
from .weighting import DEFAULT_ALPHAS

DEFAULT_ERROR_COUNT = 600


@dataclass(frozen=True)
class MetricSeries:
    name: str
    values: tuple[float, ...]


@dataclass
class ComparisonMatrix:
    """Pairwise Pearson correlation and mean absolute difference between series.

    Entries involving a constant series have no correlation and hold None;
    those series are listed in ``undefined``.
    """

    labels: list[str]
    correlations: list[list[float | None]]
    mean_abs_diff: list[list[float]]
    undefined: list[str]

    def corr(self, a: str, b: str) -> float | None:
        return self.correlations[self.labels.index(a)][self.labels.index(b)]

    def diff(self, a: str, b: str) -> float:
        return self.mean_abs_diff[self.labels.index(a)][self.labels.index(b)]

    def to_dict(self) -> dict:
        r = lambda v: None if v is None else float(f"{v:.12g}")  # noqa: E731
        return {
            "labels": list(self.labels),
            "correlation": [[r(v) for v in row] for row in self.correlations],
            "mean_abs_diff": [[r(v) for v in row] for row in self.mean_abs_diff],
            "undefined_correlation": list(self.undefined),
        }


def compare_metrics(series: list[MetricSeries]) -> ComparisonMatrix:
    """Population Pearson correlation cov(X, Y) / (sd X * sd Y) and E|X - Y|."""
    if len(series) < 2:
        raise ValueError("need at least two series")
    n = len(series[0].values)
    if n < 3 or any(len(s.values) != n for s in series):
        raise ValueError("series must share a length of at least 3")
    x = np.array([s.values for s in series], dtype=np.float64)
    centred = x - x.mean(axis=1, keepdims=True)
    sd = np.sqrt((centred * centred).mean(axis=1))
    m = len(series)
    corr: list[list[float | None]] = [[None] * m for _ in range(m)]
    diff = [[0.0] * m for _ in range(m)]
    for i in range(m):
        if sd[i] > 0:
            corr[i][i] = 1.0
        for j in range(i + 1, m):
            if sd[i] > 0 and sd[j] > 0:
                cov = float(np.dot(centred[i], centred[j])) / n
                corr[i][j] = corr[j][i] = cov / (float(sd[i]) * float(sd[j]))
            diff[i][j] = diff[j][i] = float(np.abs(x[i] - x[j]).mean())
    return ComparisonMatrix([s.name for s in series], corr, diff,
                            [s.name for s, v in zip(series, sd) if v == 0])


def series_labels(alphas=DEFAULT_ALPHAS) -> list[str]:
    return ["IoU", *(f"wIoU@{alpha_key(a)}" for a in alphas), "edgeF1"]


def _row(report, alphas) -> dict:
    row = {"IoU": report.mean("iou")}
    for a in alphas:
        row[f"wIoU@{alpha_key(a)}"] = report.mean("wiou", a)
    row["edgeF1"] = report.mean("edge_f1")
    row["edge_recall"] = report.mean("edge_recall")
    row["bf_score"] = report.mean("bf_score")
    return row


def _map_ordered(fn, items, threads: int):
    if threads == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, items))


def run_benchmark(dataset: list[DatasetItem], alphas=DEFAULT_ALPHAS, theta: float = DEFAULT_THETA,
                  norm=NormKind.L2, connectivity: int = 4, threads: int = 1
                  ) -> tuple[ComparisonMatrix, list[dict]]:
    """Evaluate every pair and compare the per-image class-mean scores.

    Returns the comparison over IoU, wIoU at each alpha, and edge F1, plus
    one row per image (in dataset order).  ``threads=0`` picks a pool size
    automatically; results never depend on it.
    """
    if not dataset:
        raise ValueError("empty dataset")
    alphas = tuple(alphas)
    fields = {}
    for it in dataset:
        if it.scene not in fields:
            fields[it.scene] = scene_distance_field(it.gt, norm, connectivity)

    def one(it):
        rep = evaluate_pair(it.gt, it.pred, alphas, theta, norm, connectivity,
                            dfield=fields[it.scene])
        return {"scene": it.scene, "variant": it.variant, **_row(rep, alphas)}

    rows = _map_ordered(one, dataset, threads)
    labels = series_labels(alphas)
    undefined = [(r["scene"], r["variant"], k) for r in rows for k in labels if r[k] is None]
    if undefined:
        raise ValueError(f"undefined metric values in series: {undefined[:3]}")
    matrix = compare_metrics([MetricSeries(k, tuple(r[k] for r in rows)) for k in labels])
    return matrix, rows


def run_triplet(spec: SceneSpec, error_count: int = DEFAULT_ERROR_COUNT, alphas=DEFAULT_ALPHAS,
                theta: float = DEFAULT_THETA, norm=NormKind.L2, connectivity: int = 4) -> list[dict]:
    """Scores of the three equal-error predictions of ``spec``."""
    gt = generate_scene(spec)
    dfield = scene_distance_field(gt, norm, connectivity)
    rows = []
    for tag, pred in zip(TRIPLET_TAGS, generate_equal_error_triplet(spec, error_count)):
        rep = evaluate_pair(gt, pred, alphas, theta, norm, connectivity, dfield=dfield)
        errors = sum(confusion(gt, pred, c).fp for c in rep.gt_classes)
        rows.append({"member": tag, "error_pixels": errors, **_row(rep, alphas)})
    return rows


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, float) else ("" if v is None else v) for v in r.values()])
    return buf.getvalue()


# -- dataset on disk ---------------------------------------------------------

def write_dataset(items: list[DatasetItem], out_dir: str | Path, specs: list[SceneSpec],
                  seed: int, levels: int = 5, palette: Palette = KITTI_PALETTE) -> Path:
    """Write ``scene##/variant##/{gt,pred}.png``, ``palette.json`` and ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "palette.json").write_text(palette.to_json())
    scene_index = {}
    entries = []
    for it in items:
        s = scene_index.setdefault(it.scene, len(scene_index) + 1)
        v = sum(1 for e in entries if e["scene"] == it.scene)
        rel = f"scene{s:02d}/variant{v:02d}"
        d = out / rel
        d.mkdir(parents=True, exist_ok=True)
        (d / "gt.png").write_bytes(encode_label_image(it.gt, palette))
        (d / "pred.png").write_bytes(encode_label_image(it.pred, palette))
        entries.append({"scene": it.scene, "variant": it.variant, "path": rel})
    manifest = {
        "seed": seed,
        "levels": levels,
        "palette": "palette.json",
        "scenes": [s.to_dict() for s in specs],
        "items": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def build_dataset(out_dir: str | Path, seed: int = 0, levels: int = 5) -> Path:
    specs = default_scenes()
    return write_dataset(generate_dataset(specs, levels, seed), out_dir, specs, seed, levels)


def read_dataset(root: str | Path) -> tuple[list[DatasetItem], list[SceneSpec], Palette]:
    root = Path(root)
    manifest = json.loads((root / "manifest.json").read_text())
    palette = Palette.load(root / manifest.get("palette", "palette.json"))
    specs = [SceneSpec.from_dict(d) for d in manifest.get("scenes", [])]
    items = []
    for e in manifest["items"]:
        d = root / e["path"]
        gt = decode_label_image((d / "gt.png").read_bytes(), palette)
        pred = decode_label_image((d / "pred.png").read_bytes(), palette)
        items.append(DatasetItem(e["scene"], e["variant"], gt, pred))
    return items, specs, palette


def write_benchmark(out_dir: str | Path, matrix: ComparisonMatrix, rows: list[dict],
                    triplet: list[dict] | None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.json").write_text(json.dumps(matrix.to_dict(), indent=2) + "\n")
    (out / "per_image.csv").write_text(_csv(rows))
    if triplet:
        (out / "triplet.csv").write_text(_csv(triplet))

