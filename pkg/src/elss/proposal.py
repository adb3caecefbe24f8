"""Candidate proposal: radial kernel, response map, argmax proposals, and the
dual tabu mechanism (hard suppression / soft radial penalty) driving the
iterative propose-and-verify loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import (
    BelowFloor,
    EmptyResponse,
    InvalidHalfWidth,
    LoopAborted,
    OutOfBounds,
    RasterTooSmall,
    VerifierTransportError,
)
from .raster import SuitabilityRaster, pixel_to_world


@dataclass(frozen=True)
class Kernel:
    """(2d+1) x (2d+1) radially decaying weight matrix.

    weights[i][j] = 1 - ((i-d)^2 + (j-d)^2) / (2 d^2); the center weight is
    exactly 1 and the four corners are exactly 0.
    """

    d: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class ResponseMap:
    width: int
    height: int
    values: np.ndarray  # float64, shape (height, width), all >= 0

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class Candidate:
    """A proposed landing center with its clipped (2d+1)-square bounding box.

    ``bbox`` is half-open pixel extent (x0, y0, x1, y1).
    """

    center: tuple[int, int]
    response: float
    bbox: tuple[int, int, int, int]
    iteration: int


@dataclass(frozen=True)
class LoopConfig:
    d: int
    max_accepted: int
    max_iterations: int
    response_floor: float

    def __post_init__(self):
        if self.d < 1:
            raise InvalidHalfWidth(f"d must be >= 1, got {self.d}")
        if self.max_accepted < 1:
            raise ValueError("max_accepted must be >= 1")
        if self.max_iterations < self.max_accepted:
            raise ValueError("max_iterations must be >= max_accepted")
        if self.response_floor < 0:
            raise ValueError("response_floor must be >= 0")


def build_kernel(d: int) -> Kernel:
    if d < 1:
        raise InvalidHalfWidth(f"kernel half-width must be >= 1, got {d}")
    idx = np.arange(2 * d + 1, dtype=np.float64)
    di, dj = np.meshgrid((idx - d) ** 2, (idx - d) ** 2, indexing="ij")
    weights = 1.0 - (di + dj) / (2.0 * d * d)
    return Kernel(d=d, weights=weights)


def default_half_width(required_landing_radius_m: float, gsd: float) -> int:
    """d = ceil(radius / gsd), never below 1."""
    return max(1, math.ceil(required_landing_radius_m / gsd))


def default_response_floor(kernel: Kernel) -> float:
    """Require at least half the footprint mass to be suitable."""
    return 0.5 * kernel.mass


def compute_response(raster: SuitabilityRaster, kernel: Kernel) -> ResponseMap:
    """Cross-correlation of the binary grid with the kernel, zero-padded."""
    size = 2 * kernel.d + 1
    if raster.width < size or raster.height < size:
        raise RasterTooSmall(
            f"raster {raster.width}x{raster.height} smaller than kernel footprint {size}"
        )
    values = ndimage.correlate(
        raster.data.astype(np.float64), kernel.weights, mode="constant", cval=0.0
    )
    # Tiny negative dust can appear only through float error; the exact sum
    # of nonnegative products is nonnegative, and ndimage sums directly, so
    # no clamp is needed.
    return ResponseMap(width=raster.width, height=raster.height, values=values)


def _clipped_bbox(center, d, width, height):
    x, y = center
    return (max(0, x - d), max(0, y - d), min(width, x + d + 1), min(height, y + d + 1))


def propose(response: ResponseMap, d: int, floor: float = 0.0, iteration: int = 0) -> Candidate:
    """Global argmax of the response map; ties break row-major (smallest row,
    then smallest column). Raises BelowFloor when max <= floor."""
    if response.values.size == 0:
        raise EmptyResponse("response map is empty")
    flat = int(np.argmax(response.values))
    y, x = divmod(flat, response.width)
    best = float(response.values[y, x])
    if best <= floor:
        raise BelowFloor(f"max response {best} <= floor {floor}")
    return Candidate(
        center=(x, y),
        response=best,
        bbox=_clipped_bbox((x, y), d, response.width, response.height),
        iteration=iteration,
    )


def _check_bounds(response, center):
    x, y = center
    if not (0 <= x < response.width and 0 <= y < response.height):
        raise OutOfBounds(f"center {center} outside {response.width}x{response.height}")


def suppress_hard(response: ResponseMap, center: tuple[int, int], d: int) -> ResponseMap:
    """Zero the (2d+1)-square neighborhood around an accepted center."""
    _check_bounds(response, center)
    x0, y0, x1, y1 = _clipped_bbox(center, d, response.width, response.height)
    values = response.values.copy()
    values[y0:y1, x0:x1] = 0.0
    return ResponseMap(width=response.width, height=response.height, values=values)


def penalize_soft(response: ResponseMap, center: tuple[int, int], d: int) -> ResponseMap:
    """Multiply the neighborhood by the radial factor r^2 / (2 d^2), which is
    0 at the rejected center and exactly 1 at the square's corners."""
    _check_bounds(response, center)
    cx, cy = center
    x0, y0, x1, y1 = _clipped_bbox(center, d, response.width, response.height)
    xs = np.arange(x0, x1, dtype=np.float64) - cx
    ys = np.arange(y0, y1, dtype=np.float64) - cy
    factor = (ys[:, None] ** 2 + xs[None, :] ** 2) / (2.0 * d * d)
    values = response.values.copy()
    values[y0:y1, x0:x1] *= factor
    return ResponseMap(width=response.width, height=response.height, values=values)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    center_px: tuple[int, int]
    response: float
    verdict: str  # "safe" | "unsafe"
    reason: str
    action: str  # "hard_suppress" | "soft_penalty"

    def to_dict(self):
        return {
            "iteration": self.iteration,
            "center_px": list(self.center_px),
            "response": self.response,
            "verdict": self.verdict,
            "reason": self.reason,
            "action": self.action,
        }


@dataclass
class LoopResult:
    trace: list = field(default_factory=list)  # [(Candidate, Verdict)]
    records: list = field(default_factory=list)  # [TraceRecord]

    @property
    def accepted(self):
        return [(c, v) for c, v in self.trace if v.label == "safe"]


def run_proposal_loop(raster: SuitabilityRaster, verifier, config: LoopConfig) -> LoopResult:
    """Propose -> verify -> suppress/penalize until max_accepted sites are
    accepted, the response floor is reached, or max_iterations elapse.

    ``verifier`` is any callable mapping a PatchRequest to a Verdict.
    Deterministic given a deterministic verifier.
    """
    from .verify import PatchRequest  # local import to avoid a cycle

    kernel = build_kernel(config.d)
    response = compute_response(raster, kernel)
    result = LoopResult()
    accepted = 0
    for iteration in range(config.max_iterations):
        try:
            candidate = propose(response, config.d, config.response_floor, iteration)
        except BelowFloor:
            break
        x0, y0, x1, y1 = candidate.bbox
        patch = raster.data[y0:y1, x0:x1]
        request = PatchRequest(
            image_bytes=_encode_patch(patch),
            center_world=pixel_to_world(
                candidate.center, raster.meta, width=raster.width, height=raster.height
            ),
            bbox_px=candidate.bbox,
            gsd=raster.meta.gsd,
        )
        try:
            verdict = verifier(request)
        except VerifierTransportError as exc:
            exc.candidate = candidate
            raise LoopAborted(exc, result) from exc
        result.trace.append((candidate, verdict))
        if verdict.label == "safe":
            response = suppress_hard(response, candidate.center, config.d)
            action = "hard_suppress"
            accepted += 1
        else:
            response = penalize_soft(response, candidate.center, config.d)
            action = "soft_penalty"
        result.records.append(
            TraceRecord(
                iteration=iteration,
                center_px=candidate.center,
                response=candidate.response,
                verdict=verdict.label,
                reason=verdict.reason,
                action=action,
            )
        )
        if accepted >= config.max_accepted:
            break
    return result


def _encode_patch(patch: np.ndarray) -> bytes:
    """PGM-encode a binary patch crop (1 -> 255) for the verifier request."""
    height, width = patch.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + (patch * np.uint8(255)).tobytes()
