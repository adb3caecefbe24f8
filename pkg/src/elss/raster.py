"""Label and suitability rasters: loading, class mapping, map cross-validation,
and pixel/world coordinate conversion.

File format ("ELSSR-1"): the raster payload is a binary PGM ("P5", maxval 255)
and the georeferencing lives in a JSON sidecar named ``<raster>.meta.json``.
For label rasters each byte is the class index; for suitability rasters 255
encodes 1 and 0 encodes 0.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatch,
    MalformedHeader,
    MissingSidecar,
    OutOfBounds,
    ShapeMismatch,
    UnknownClassIndex,
    UnresolvableClassName,
)

FORMAT_TAG = "ELSSR-1"


class RasterKind(str, Enum):
    labels = "labels"
    suitability = "suitability"


@dataclass(frozen=True)
class RasterMeta:
    """Georeferencing for a raster grid.

    ``origin`` is the world position (planar meters) of pixel (0, 0); pixel
    coordinates are (col, row) with origin at the top-left corner.
    """

    gsd: float
    origin: tuple[float, float]
    crs_label: str
    kind: RasterKind
    classes: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.gsd <= 0:
            raise ValueError(f"gsd must be positive, got {self.gsd}")


@dataclass(frozen=True)
class LabelRaster:
    width: int
    height: int
    data: np.ndarray  # uint8, shape (height, width), class indices
    meta: RasterMeta

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise DimensionMismatch(
                f"data shape {self.data.shape} != ({self.height}, {self.width})"
            )
        present = set(np.unique(self.data).tolist())
        unknown = present - set(self.meta.classes)
        if unknown:
            raise UnknownClassIndex(f"class indices {sorted(unknown)} missing from meta.classes")
        self.data.setflags(write=False)


@dataclass(frozen=True)
class SuitabilityRaster:
    width: int
    height: int
    data: np.ndarray  # uint8 in {0, 1}, shape (height, width)
    meta: RasterMeta

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise DimensionMismatch(
                f"data shape {self.data.shape} != ({self.height}, {self.width})"
            )
        if self.data.size and not np.isin(self.data, (0, 1)).all():
            raise ValueError("suitability values must be 0 or 1")
        self.data.setflags(write=False)


@dataclass(frozen=True)
class ClassMapping:
    """Names (not indices) of classes considered landable."""

    suitable_classes: frozenset[str]
    profile_name: str = "custom"

    def __post_init__(self):
        if not self.suitable_classes:
            raise ValueError("suitable_classes must be nonempty")


# Profiles used in the two study regions.
POTSDAM_PROFILE = ClassMapping(
    frozenset({"background", "impervious"}), profile_name="potsdam"
)
LOVEDA_PROFILE = ClassMapping(
    frozenset({"background", "barren"}), profile_name="loveda"
)
PROFILES = {"potsdam": POTSDAM_PROFILE, "loveda": LOVEDA_PROFILE}


class CrossValidationPolicy(str, Enum):
    intersection = "intersection"
    union = "union"
    map_priority = "map_priority"
    seg_priority = "seg_priority"


# --- file I/O -------------------------------------------------------------

def _sidecar_path(path):
    return f"{path}.meta.json"


def _read_pgm(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P5"):
        raise MalformedHeader(f"{path}: not a binary PGM (P5)")
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed between them.
    tokens = []
    i = 2
    while len(tokens) < 3:
        while i < len(blob) and blob[i : i + 1].isspace():
            i += 1
        if i < len(blob) and blob[i : i + 1] == b"#":
            while i < len(blob) and blob[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(blob) and not blob[j : j + 1].isspace():
            j += 1
        if j == i:
            raise MalformedHeader(f"{path}: truncated PGM header")
        tokens.append(blob[i:j])
        i = j
    i += 1  # single whitespace byte terminates the header
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeader(f"{path}: non-numeric PGM header fields") from None
    if maxval != 255:
        raise MalformedHeader(f"{path}: maxval must be 255, got {maxval}")
    payload = blob[i:]
    if len(payload) != width * height:
        raise DimensionMismatch(
            f"{path}: payload of {len(payload)} bytes declared {width}x{height}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def _write_pgm(path, data):
    height, width = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(data, dtype=np.uint8).tobytes())


def _load_sidecar(path):
    sidecar = _sidecar_path(path)
    if not os.path.exists(sidecar):
        raise MissingSidecar(f"sidecar not found: {sidecar}")
    with open(sidecar, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_TAG:
        raise MalformedHeader(f"{sidecar}: unsupported format tag {doc.get('format')!r}")
    try:
        meta = RasterMeta(
            gsd=float(doc["gsd_m_per_px"]),
            origin=(float(doc["origin"][0]), float(doc["origin"][1])),
            crs_label=str(doc["crs"]),
            kind=RasterKind(doc["kind"]),
            classes={int(k): str(v) for k, v in doc.get("classes", {}).items()},
        )
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise MalformedHeader(f"{sidecar}: {exc}") from exc
    return meta, int(doc["width"]), int(doc["height"])


def load_label_raster(path) -> LabelRaster:
    """Load an ELSSR-1 label raster (payload + sidecar)."""
    meta, width, height = _load_sidecar(path)
    if meta.kind is not RasterKind.labels:
        raise MalformedHeader(f"{path}: sidecar kind is {meta.kind.value}, expected labels")
    data = _read_pgm(path)
    if data.shape != (height, width):
        raise DimensionMismatch(
            f"{path}: payload {data.shape[1]}x{data.shape[0]} != sidecar {width}x{height}"
        )
    return LabelRaster(width=width, height=height, data=data, meta=meta)


def load_suitability_raster(path) -> SuitabilityRaster:
    """Load an ELSSR-1 suitability raster (255 -> 1, 0 -> 0)."""
    meta, width, height = _load_sidecar(path)
    if meta.kind is not RasterKind.suitability:
        raise MalformedHeader(f"{path}: sidecar kind is {meta.kind.value}, expected suitability")
    raw = _read_pgm(path)
    if raw.shape != (height, width):
        raise DimensionMismatch(
            f"{path}: payload {raw.shape[1]}x{raw.shape[0]} != sidecar {width}x{height}"
        )
    return SuitabilityRaster(
        width=width, height=height, data=(raw != 0).astype(np.uint8), meta=meta
    )


def save_raster(raster, path):
    """Write payload + sidecar; suitability 1 is stored as byte 255."""
    data = raster.data
    if raster.meta.kind is RasterKind.suitability:
        data = data * np.uint8(255)
    _write_pgm(path, data)
    doc = {
        "format": FORMAT_TAG,
        "kind": raster.meta.kind.value,
        "width": raster.width,
        "height": raster.height,
        "gsd_m_per_px": raster.meta.gsd,
        "origin": list(raster.meta.origin),
        "crs": raster.meta.crs_label,
        "classes": {str(k): v for k, v in sorted(raster.meta.classes.items())},
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- derivation and cross-validation --------------------------------------

def derive_suitability(labels: LabelRaster, mapping: ClassMapping) -> SuitabilityRaster:
    """Binary map: pixel is 1 iff its class name is in the mapping."""
    known = set(labels.meta.classes.values())
    missing = set(mapping.suitable_classes) - known
    if missing:
        raise UnresolvableClassName(
            f"classes {sorted(missing)} not present in raster class table {sorted(known)}"
        )
    suitable_indices = [
        idx for idx, name in labels.meta.classes.items() if name in mapping.suitable_classes
    ]
    out = np.isin(labels.data, suitable_indices).astype(np.uint8)
    meta = replace(labels.meta, kind=RasterKind.suitability)
    return SuitabilityRaster(width=labels.width, height=labels.height, data=out, meta=meta)


def cross_validate(
    seg: SuitabilityRaster,
    map_layer: SuitabilityRaster,
    policy: CrossValidationPolicy = CrossValidationPolicy.intersection,
) -> SuitabilityRaster:
    """Combine segmentation-derived suitability with a pre-rasterized map layer."""
    if (seg.width, seg.height) != (map_layer.width, map_layer.height):
        raise ShapeMismatch(
            f"seg {seg.width}x{seg.height} vs map {map_layer.width}x{map_layer.height}"
        )
    if seg.meta.gsd != map_layer.meta.gsd:
        raise ShapeMismatch(f"gsd mismatch: {seg.meta.gsd} vs {map_layer.meta.gsd}")
    a, b = seg.data, map_layer.data
    if policy is CrossValidationPolicy.intersection:
        out = a & b
    elif policy is CrossValidationPolicy.union:
        out = a | b
    elif policy is CrossValidationPolicy.map_priority:
        out = b.copy()
    else:  # seg_priority: seg wins every disagreement
        out = a.copy()
    return SuitabilityRaster(width=seg.width, height=seg.height, data=out, meta=seg.meta)


# --- coordinate conversion ------------------------------------------------

def pixel_to_world(p: tuple[int, int], meta: RasterMeta, *, width: int, height: int):
    """World position (meters) of pixel (col, row); axis-aligned affine."""
    x, y = p
    if not (0 <= x < width and 0 <= y < height):
        raise OutOfBounds(f"pixel {p} outside {width}x{height}")
    return (meta.origin[0] + x * meta.gsd, meta.origin[1] + y * meta.gsd)


def world_to_pixel(w: tuple[float, float], meta: RasterMeta, *, width: int, height: int):
    """Inverse of pixel_to_world up to floor rounding."""
    # Epsilon absorbs division round-off so exact pixel corners map back
    # to themselves.
    x = math.floor((w[0] - meta.origin[0]) / meta.gsd + 1e-9)
    y = math.floor((w[1] - meta.origin[1]) / meta.gsd + 1e-9)
    if not (0 <= x < width and 0 <= y < height):
        raise OutOfBounds(f"world {w} maps to pixel ({x}, {y}) outside {width}x{height}")
    return (x, y)
