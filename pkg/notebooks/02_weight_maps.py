"""
Weight maps and the boundary importance factor
==============================================

W = exp(-alpha * D).  Small alpha gives an almost flat map; large alpha
keeps weight only next to class boundaries.
"""

import numpy as np

from wiou import DEFAULT_ALPHAS, export_weight_png, scene_distance_field, weight_map
from wiou.scenes import default_scenes, generate_scene

spec = default_scenes()[0]
gt = generate_scene(spec)
field = scene_distance_field(gt)

for alpha in DEFAULT_ALPHAS:
    w = weight_map(field, alpha).weights
    print(f"alpha={alpha:<6g} min={w.min():.4f} mean={w.mean():.4f} max={w.max():.4f}")
    with open(f"weights_a{alpha:g}.png", "wb") as f:
        f.write(export_weight_png(weight_map(field, alpha)))

# at alpha=0.01 the spread can never exceed 1 - exp(-0.01)
w = weight_map(field, 0.01).weights
print("spread at 0.01:", w.max() - w.min(), "bound:", 1 - np.exp(-0.01))
