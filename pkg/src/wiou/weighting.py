"""Exponential boundary weight maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distance import DistanceField
from .pngio import grayscale_png

# boundary importance factors swept by the benchmark
DEFAULT_ALPHAS = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True, eq=False)
class WeightMap:
    """Per-pixel weights exp(-alpha * distance); 0 on ignore pixels."""

    weights: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)
    alpha: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


def check_alpha(alpha) -> float:
    try:
        a = float(alpha)
    except (TypeError, ValueError):
        raise ValueError(f"alpha must be a number, got {alpha!r}") from None
    if not math.isfinite(a) or a <= 0:
        raise ValueError(f"alpha must be a positive finite number, got {alpha!r}")
    return a


def weight_map(dfield: DistanceField, alpha: float) -> WeightMap:
    alpha = check_alpha(alpha)
    w = np.exp(-alpha * dfield.values)
    w[~dfield.valid] = 0.0
    return WeightMap(w, dfield.valid, alpha)


def export_weight_png(wmap: WeightMap) -> bytes:
    """8-bit grayscale PNG, pixel = round(255 * weight)."""
    return grayscale_png(wmap.weights, bits=8)
