"""Stage 1 walkthrough: derive a binary suitability map from semantic
labels, then cross-validate it against a map layer.

Run: python3 demos/01_suitability_and_cross_validation.py
"""

import numpy as np

from elss import (
    ClassMapping,
    CrossValidationPolicy,
    cross_validate,
    derive_suitability,
)
from elss.raster import LabelRaster, RasterKind, RasterMeta, SuitabilityRaster

# A toy 8x8 scene: mostly buildings (1), with a grassy background patch (0)
# and a misclassified forest corner the segmentation model read as
# background even though the map knows it is woodland.
classes = {0: "background", 1: "building", 2: "tree"}
grid = np.ones((8, 8), dtype=np.uint8)
grid[1:5, 1:5] = 0  # the real lawn
grid[5:8, 5:8] = 0  # forest misread as background

meta = RasterMeta(
    gsd=0.5, origin=(0.0, 0.0), crs_label="local-m", kind=RasterKind.labels, classes=classes
)
labels = LabelRaster(width=8, height=8, data=grid, meta=meta)

suitability = derive_suitability(labels, ClassMapping(frozenset({"background"})))
print("segmentation-only suitability:")
print(suitability.data)

# The map layer knows the lower-right corner is forest.
map_grid = suitability.data.copy()
map_grid[5:8, 5:8] = 0
map_layer = SuitabilityRaster(width=8, height=8, data=map_grid, meta=suitability.meta)

validated = cross_validate(suitability, map_layer, CrossValidationPolicy.intersection)
print("\nafter intersection cross-validation (forest corner removed):")
print(validated.data)
