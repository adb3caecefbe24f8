import json

import numpy as np
import pytest

from elss.raster import (
    LabelRaster,
    RasterKind,
    RasterMeta,
    SuitabilityRaster,
    save_raster,
)


def make_meta(kind=RasterKind.suitability, gsd=0.5, origin=(0.0, 0.0), classes=None):
    return RasterMeta(
        gsd=gsd,
        origin=origin,
        crs_label="local-m",
        kind=kind,
        classes=classes or {},
    )


def make_suitability(grid, gsd=0.5, origin=(0.0, 0.0)):
    data = np.asarray(grid, dtype=np.uint8)
    height, width = data.shape
    return SuitabilityRaster(
        width=width, height=height, data=data, meta=make_meta(gsd=gsd, origin=origin)
    )


def make_labels(grid, classes, gsd=0.5, origin=(0.0, 0.0)):
    data = np.asarray(grid, dtype=np.uint8)
    height, width = data.shape
    return LabelRaster(
        width=width,
        height=height,
        data=data,
        meta=make_meta(kind=RasterKind.labels, gsd=gsd, origin=origin, classes=classes),
    )


@pytest.fixture
def write_raster(tmp_path):
    def _write(name, raster):
        path = tmp_path / name
        save_raster(raster, path)
        return path

    return _write


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path
