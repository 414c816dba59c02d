"""
Distance to the nearest other class
===================================

Every pixel gets its distance to the closest pixel of a different class,
then each connected object is scaled so its deepest pixel reads 1.
"""

import numpy as np

from wiou import LabelMap, NormKind, distance_map, scene_distance_field

# a small road scene: sky on top, road below, a 6x8 car sitting on the road
labels = np.full((12, 16), 4)
labels[6:] = 0
labels[5:11, 4:12] = 6
scene = LabelMap(labels, 7)

# raw distances for the car, under the three supported norms
for norm in (NormKind.L1, NormKind.L2, NormKind.LINF):
    raw = distance_map(scene, 6, norm)
    print(norm.label, "max depth inside the car:", raw.values.max())

# the combined field: 0 between classes, 1 at the centre of every object
field = scene_distance_field(scene)
np.set_printoptions(precision=2, linewidth=120)
print(field.values)

# pixels that touch another class sit at 1/max, not 0
print("car rim value:", field.values[5, 4], " car centre:", field.values[7:9, 7:9].max())

# write a 16-bit preview next to this script
with open("distance_field.png", "wb") as f:
    f.write(field.to_png())
