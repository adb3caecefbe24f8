"""The iterative propose-and-verify loop with the dual tabu mechanism:
accepted sites get their neighborhood zeroed (hard suppression), rejected
ones get the radial soft penalty so nearby terrain stays in play.

Run: python3 demos/03_propose_and_verify_loop.py
"""

import numpy as np

from elss import LoopConfig, run_proposal_loop
from elss.raster import RasterKind, RasterMeta, SuitabilityRaster
from elss.verify import HazardLayer, RuleOracleVerifier

# Two suitable regions; a parked vehicle (hazard) sits on the first one, so
# the oracle rejects the first proposal and the soft penalty steers the
# search to the hazard-free part of the same region.
grid = np.zeros((24, 24), dtype=np.uint8)
grid[2:12, 2:22] = 1
grid[15:22, 4:20] = 1

hazards = np.zeros((24, 24), dtype=np.uint8)
hazards[6:8, 11:13] = 1  # the vehicle

meta = RasterMeta(gsd=0.5, origin=(0.0, 0.0), crs_label="local-m", kind=RasterKind.suitability)
raster = SuitabilityRaster(width=24, height=24, data=grid, meta=meta)

config = LoopConfig(d=3, max_accepted=2, max_iterations=12, response_floor=2.0)
result = run_proposal_loop(raster, RuleOracleVerifier(HazardLayer(grid=hazards)), config)

for record in result.records:
    print(
        f"iter {record.iteration}: center {record.center_px} "
        f"response {record.response:6.2f} -> {record.verdict:6s} "
        f"({record.action}); {record.reason}"
    )
print(f"\naccepted sites: {[c.center for c, v in result.accepted]}")
