"""
Same error count, different placement
=====================================

Three predictions of one scene mislabel exactly the same number of pixels
per class, so IoU cannot tell them apart.  The weighted score can.
"""

from wiou import evaluate_pair
from wiou.scenes import default_scenes, generate_equal_error_triplet, generate_scene

spec = default_scenes()[0]
gt = generate_scene(spec)
members = generate_equal_error_triplet(spec, 600)

for tag, pred in zip(("boundary", "interior", "split"), members):
    rep = evaluate_pair(gt, pred, alphas=(0.1, 1.0, 10.0))
    print(f"{tag:9s}", rep.summary_line())

# errors hugging the object edge cost the most once alpha is large enough
