"""Weighted IoU (wIoU) for semantic segmentation, with the usual baselines.

Typical use::

    from wiou import evaluate_pair
    report = evaluate_pair(gt, pred, alphas=(0.01, 1, 100))
    report.mean("wiou", 1)
"""

from .boundary import EdgeScores, bf_score, edge_match, edge_prf
from .distance import (DistanceField, NormKind, RawDistanceMap, combine_fields, distance_map,
                       normalize_per_instance, scene_distance_field)
from .labels import (BoundarySet, InstanceMap, LabelMap, connected_components, extract_boundary,
                     morphological_op)
from .metrics import (ConfusionCounts, MetricReport, WeightedConfusion, confusion, evaluate_pair,
                      f1_score, iou, precision, recall, weighted_confusion, wiou)
from .pngio import (KITTI_PALETTE, LabelImageError, Palette, PaletteError, decode_label_image,
                    encode_label_image)
from .weighting import DEFAULT_ALPHAS, WeightMap, export_weight_png, weight_map

__version__ = "0.1.0"

__all__ = [
    "BoundarySet", "ConfusionCounts", "DEFAULT_ALPHAS", "DistanceField", "EdgeScores",
    "InstanceMap", "KITTI_PALETTE", "LabelImageError", "LabelMap", "MetricReport", "NormKind",
    "Palette", "PaletteError", "RawDistanceMap", "WeightMap", "WeightedConfusion", "bf_score",
    "combine_fields", "confusion", "connected_components", "decode_label_image", "distance_map",
    "edge_match", "edge_prf", "encode_label_image", "evaluate_pair", "export_weight_png",
    "extract_boundary", "f1_score", "iou", "morphological_op", "normalize_per_instance",
    "precision", "recall", "scene_distance_field", "weight_map", "weighted_confusion", "wiou",
]
