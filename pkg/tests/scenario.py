"""Builds the demo 256x256 scenario used by the CLI and acceptance tests:
two geometrically identical suitable regions, one adjacent to a school POI
with weekday business hours, the other clear.
"""

import json

import numpy as np

from elss.raster import LabelRaster, RasterKind, RasterMeta, save_raster

CLASSES = {0: "background", 1: "building", 2: "tree", 3: "impervious"}

# 50x50 suitable squares; gsd 0.5 m/px so the world frame is 128x128 m.
REGION_A = (slice(30, 80), slice(30, 80))  # rows, cols; near the school
REGION_B = (slice(170, 220), slice(170, 220))  # clear
GSD = 0.5

# Region A spans world (15, 15)-(40, 40); 12 m east of its edge, well
# inside the 30 m buffer. Region B is > 180 m away from it.
SCHOOL_WORLD = (52.0, 27.0)


def write_labels(path):
    grid = np.full((256, 256), 1, dtype=np.uint8)
    grid[::7, :] = 2  # sprinkle trees so the background is not uniform
    grid[REGION_A] = 0
    grid[REGION_B] = 0
    labels = LabelRaster(
        width=256,
        height=256,
        data=grid,
        meta=RasterMeta(
            gsd=GSD,
            origin=(0.0, 0.0),
            crs_label="local-m",
            kind=RasterKind.labels,
            classes=CLASSES,
        ),
    )
    save_raster(labels, path)
    return path


def write_pois(path):
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": list(SCHOOL_WORLD)},
                "properties": {
                    "category": "school",
                    "name": "North Primary",
                    "active_hours": [
                        {
                            "days": ["mon", "tue", "wed", "thu", "fri"],
                            "start": 8,
                            "end": 16,
                        }
                    ],
                },
            }
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
    return path


def write_config(directory, timestamp="2025-06-03T10:00:00", **overrides):
    """Write labels + POIs + a pipeline config into ``directory``."""
    directory = str(directory)
    labels = write_labels(f"{directory}/labels.pgm")
    pois = write_pois(f"{directory}/pois.geojson")
    config = {
        "labels_path": str(labels),
        "poi_path": str(pois),
        "suitable_classes": ["background"],
        "required_landing_radius_m": 10.0,
        "max_accepted": 2,
        "max_iterations": 10,
        "backend": "oracle",
        "timestamp": timestamp,
        "operating_altitude_m": 30.0,
        "out_report": f"{directory}/report.json",
        "out_trace": f"{directory}/trace.jsonl",
    }
    config.update(overrides)
    path = f"{directory}/config.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
    return path, config
