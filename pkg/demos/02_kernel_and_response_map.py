"""Stage 2 building blocks: the radially decaying kernel and the response
map it produces over a suitability grid.

Run: python3 demos/02_kernel_and_response_map.py
"""

import numpy as np

from elss import build_kernel, compute_response
from elss.raster import RasterKind, RasterMeta, SuitabilityRaster

kernel = build_kernel(2)
print("kernel (d=2), center weight 1, corner weights 0:")
print(np.round(kernel.weights, 3))
print(f"kernel mass = {kernel.mass:.3f}")

# Two suitable blobs, one compact and one fragmented. The response map
# rewards the compact one.
grid = np.zeros((16, 16), dtype=np.uint8)
grid[2:9, 2:9] = 1  # compact block
grid[11:15, 11:15] = 1
grid[12, 12] = 0  # fragment the second blob
grid[13, 13] = 0

meta = RasterMeta(gsd=0.5, origin=(0.0, 0.0), crs_label="local-m", kind=RasterKind.suitability)
raster = SuitabilityRaster(width=16, height=16, data=grid, meta=meta)
response = compute_response(raster, kernel)

peak = np.unravel_index(np.argmax(response.values), response.values.shape)
print(f"\nresponse peak at (col, row) = ({peak[1]}, {peak[0]}), "
      f"value {response.values[peak]:.2f} (compact blob wins)")
print("response map (rounded):")
print(np.round(response.values, 1))
