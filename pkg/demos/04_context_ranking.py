"""Stage 3 walkthrough: the same flat playground is a poor choice at 10:00
on a Tuesday (school in session, inside the 1:1 buffer) but fine at
midnight. Also prints the four-stream ranking prompt.

Run: python3 demos/04_context_ranking.py
"""

from datetime import datetime

from elss import (
    ActiveHours,
    DynamicContext,
    LandingSite,
    PoiRecord,
    RegulatoryConfig,
    build_ranking_prompt,
    score_sites,
)
from elss.proposal import Candidate
from elss.verify import Verdict


def make_site(name, bbox_world, center):
    return LandingSite(
        candidate=Candidate(center=center, response=40.0, bbox=(0, 0, 21, 21), iteration=0),
        verdict=Verdict(label="safe", reason=f"{name}: flat, no obstacles"),
        bbox_world=bbox_world,
    )


playground = make_site("playground", (0.0, 0.0, 20.0, 20.0), (20, 20))
parking_lot = make_site("parking lot", (120.0, 0.0, 140.0, 20.0), (260, 20))

school = PoiRecord(
    category="school",
    position=(32.0, 10.0),  # 12 m east of the playground
    name="North Primary",
    active_hours=(ActiveHours(weekdays=frozenset(range(5)), start_hour=8, end_hour=16),),
)
reg = RegulatoryConfig(operating_altitude_m=30.0)

for label, ts in (
    ("Tuesday 10:00", datetime(2025, 6, 3, 10, 0)),
    ("Tuesday 00:00", datetime(2025, 6, 3, 0, 0)),
):
    ctx = DynamicContext(timestamp=ts)
    ranked = score_sites([playground, parking_lot], [school], reg, ctx)
    print(f"--- {label} ---")
    for site in ranked:
        print(f"  sigma={site.sigma:.3f}  {site.justification}")
    print()

print("ranking prompt sent to an optional MLLM backend:")
print(build_ranking_prompt([playground, parking_lot], [school],
                           DynamicContext(timestamp=datetime(2025, 6, 3, 10, 0)), reg))
