"""Model loading, inference, and ELSSR-1 export.

Model specifiers:
  - ``constant:<index>``   stub that labels every pixel with one class
  - a filesystem path      TorchScript checkpoint loaded with torch.jit.load;
                           the module maps a (1, 3, H, W) float image in
                           [0, 1] to (1, C, H, W) logits, argmaxed per pixel
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image


class AdapterError(Exception):
    pass


class ModelLoadError(AdapterError):
    pass


class InferenceError(AdapterError):
    pass


class ExportError(AdapterError):
    pass


@dataclass
class AdapterConfig:
    model: str  # "constant:<idx>" or checkpoint path
    input_path: str
    output_path: str
    classes: dict[int, str]  # must cover every index the model can emit
    gsd: float
    origin: tuple[float, float] = (0.0, 0.0)
    crs_label: str = "local-m"

    def __post_init__(self):
        if self.gsd <= 0:
            raise ValueError(f"gsd must be positive, got {self.gsd}")
        if not self.classes:
            raise ValueError("class table must be nonempty")


def load_class_table(path) -> dict[int, str]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return {int(k): str(v) for k, v in doc.items()}


def _load_image(path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    except (OSError, ValueError) as exc:
        raise InferenceError(f"cannot read input image {path}: {exc}") from exc


def _run_model(config: AdapterConfig, image: np.ndarray) -> np.ndarray:
    """Per-pixel class indices for the input image, same height/width."""
    if config.model.startswith("constant:"):
        try:
            index = int(config.model.split(":", 1)[1])
        except ValueError:
            raise ModelLoadError(f"bad stub specifier {config.model!r}") from None
        return np.full(image.shape[:2], index, dtype=np.int64)

    if not os.path.exists(config.model):
        raise ModelLoadError(f"checkpoint not found: {config.model}")
    import torch

    try:
        module = torch.jit.load(config.model, map_location="cpu")
    except (RuntimeError, ValueError) as exc:
        raise ModelLoadError(f"cannot load TorchScript checkpoint {config.model}: {exc}") from exc
    module.eval()
    tensor = torch.from_numpy(image).permute(2, 0, 1).unsqueeze(0)
    try:
        with torch.no_grad():
            logits = module(tensor)
    except RuntimeError as exc:
        raise InferenceError(f"model forward pass failed: {exc}") from exc
    if logits.ndim != 4 or logits.shape[0] != 1:
        raise InferenceError(f"expected (1, C, H, W) logits, got {tuple(logits.shape)}")
    labels = logits.argmax(dim=1).squeeze(0).cpu().numpy()
    if labels.shape != image.shape[:2]:
        raise InferenceError(
            f"label map {labels.shape} does not match image {image.shape[:2]}"
        )
    return labels


def _write_elssr1(config: AdapterConfig, labels: np.ndarray):
    emitted = set(np.unique(labels).tolist())
    missing = emitted - set(config.classes)
    if missing:
        raise ExportError(f"model emitted class indices {sorted(missing)} missing from table")
    if emitted and max(emitted) > 255:
        raise ExportError("class indices above 255 cannot be encoded in a PGM byte")
    height, width = labels.shape
    try:
        with open(config.output_path, "wb") as fh:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(labels.astype(np.uint8).tobytes())
        sidecar = {
            "format": "ELSSR-1",
            "kind": "labels",
            "width": width,
            "height": height,
            "gsd_m_per_px": config.gsd,
            "origin": list(config.origin),
            "crs": config.crs_label,
            "classes": {str(k): v for k, v in sorted(config.classes.items())},
        }
        with open(f"{config.output_path}.meta.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise ExportError(f"cannot write {config.output_path}: {exc}") from exc


def segment_and_export(config: AdapterConfig) -> tuple[str, str]:
    """Run inference and write the raster + sidecar; returns both paths."""
    image = _load_image(config.input_path)
    labels = _run_model(config, image)
    _write_elssr1(config, labels)
    return config.output_path, f"{config.output_path}.meta.json"
