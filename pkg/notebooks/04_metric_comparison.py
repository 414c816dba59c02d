"""
How the metrics relate across 33 predictions
============================================

Three scenes, each predicted eleven ways (eroded, jittered, dilated).
For each pair of metrics: Pearson correlation and mean absolute gap.
"""

from wiou.benchmark import run_benchmark
from wiou.scenes import generate_dataset

matrix, rows = run_benchmark(generate_dataset(seed=0))

labels = matrix.labels
print("correlation")
print(" " * 11 + "".join(f"{k:>11s}" for k in labels))
for k, row in zip(labels, matrix.correlations):
    print(f"{k:>11s}" + "".join(f"{v:11.4f}" for v in row))

print("\nmean |difference|")
print(" " * 11 + "".join(f"{k:>11s}" for k in labels))
for k, row in zip(labels, matrix.mean_abs_diff):
    print(f"{k:>11s}" + "".join(f"{v:11.4f}" for v in row))

# small alpha tracks IoU; large alpha moves toward the edge score
print("\nrho(wIoU@0.01, IoU) =", round(matrix.corr("wIoU@0.01", "IoU"), 6))
print("rho(wIoU@100, IoU)  =", round(matrix.corr("wIoU@100", "IoU"), 6))
print("D(wIoU@100, edgeF1) =", round(matrix.diff("wIoU@100", "edgeF1"), 4))
print("D(wIoU@0.01, edgeF1)=", round(matrix.diff("wIoU@0.01", "edgeF1"), 4))
