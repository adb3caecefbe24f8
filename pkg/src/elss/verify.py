"""Safe/unsafe verdicts for candidate patches: the verification prompt,
reply parsing, a deterministic hazard-grid oracle for offline use, and a
remote vision-language API client.
"""

from __future__ import annotations

import base64
import os
import re
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import requests

from .errors import AuthFailure, MalformedResponse, OutOfBounds, VerifierTimeout

PATCH_PROMPT = (
    "Inspect this satellite image patch. Is the surface smooth and free of "
    "dynamic obstacles or structural hazards? Answer [Safe/Unsafe] and "
    "provide a 1-sentence reason."
)

API_KEY_ENV = "ELSS_VLM_API_KEY"

_FALLBACK_REASON = "unparseable model reply"


@dataclass(frozen=True)
class Verdict:
    label: str  # "safe" | "unsafe"
    reason: str
    source: str = "rule_oracle"  # "rule_oracle" | "remote_model"
    model_name: Optional[str] = None

    def __post_init__(self):
        if self.label not in ("safe", "unsafe"):
            raise ValueError(f"bad verdict label {self.label!r}")
        if not self.reason:
            raise ValueError("verdict reason must be nonempty")


@dataclass(frozen=True)
class PatchRequest:
    image_bytes: bytes
    center_world: tuple[float, float]
    bbox_px: tuple[int, int, int, int]  # half-open (x0, y0, x1, y1)
    gsd: float


@dataclass(frozen=True)
class HazardLayer:
    """Binary grid aligned to the pipeline raster; 1 marks a hazard that the
    segmentation stage cannot see (vehicles, rubble, crowds)."""

    grid: np.ndarray

    def __post_init__(self):
        self.grid.setflags(write=False)

    @classmethod
    def empty(cls, width, height):
        return cls(grid=np.zeros((height, width), dtype=np.uint8))


def build_patch_prompt() -> str:
    return PATCH_PROMPT


_TOKEN_RE = re.compile(r"safe", re.IGNORECASE)


def parse_verdict(model_text: str, source="remote_model", model_name=None) -> Verdict:
    """Total parser: the first safe/unsafe token decides; a "safe" preceded by
    "un" counts as unsafe. No recognizable token falls back to unsafe."""
    for match in _TOKEN_RE.finditer(model_text):
        start = match.start()
        unsafe = model_text[max(0, start - 2) : start].lower() == "un"
        rest = model_text[match.end() :]
        reason = rest.splitlines()[0] if rest else ""
        reason = reason.strip().lstrip("].,:;)!-–— \t").strip()
        if not reason:
            reason = _FALLBACK_REASON
        return Verdict(
            label="unsafe" if unsafe else "safe",
            reason=reason,
            source=source,
            model_name=model_name,
        )
    return Verdict(
        label="unsafe", reason=_FALLBACK_REASON, source=source, model_name=model_name
    )


class RuleOracleVerifier:
    """Deterministic verifier: unsafe iff any hazard pixel intersects the
    candidate box. Callable with a PatchRequest."""

    def __init__(self, hazards: HazardLayer):
        self.hazards = hazards

    def __call__(self, request: PatchRequest) -> Verdict:
        return rule_oracle_verify(request, self.hazards)


def rule_oracle_verify(request: PatchRequest, hazards: HazardLayer) -> Verdict:
    x0, y0, x1, y1 = request.bbox_px
    height, width = hazards.grid.shape
    if x0 < 0 or y0 < 0 or x1 > width or y1 > height or x0 >= x1 or y0 >= y1:
        raise OutOfBounds(f"bbox {request.bbox_px} outside hazard grid {width}x{height}")
    count = int(hazards.grid[y0:y1, x0:x1].sum())
    if count:
        return Verdict(
            label="unsafe",
            reason=f"{count} hazard pixel(s) inside the candidate box",
            source="rule_oracle",
        )
    return Verdict(
        label="safe",
        reason="no hazards intersect the candidate box",
        source="rule_oracle",
    )


@dataclass(frozen=True)
class EndpointConfig:
    endpoint_url: str
    model_name: str
    max_retries: int = 3
    timeout_s: float = 30.0


class RemoteVerifier:
    """HTTP client for a generic vision-language endpoint.

    Request body: {"model", "prompt", "image_base64"}; response: {"text"}.
    Retries transient transport failures with exponential backoff (1s, 2s,
    4s by default); the API key comes from the ELSS_VLM_API_KEY env var.
    """

    def __init__(self, config: EndpointConfig, *, session=None, sleep=time.sleep):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep

    def __call__(self, request: PatchRequest) -> Verdict:
        return self.verify(request)

    def verify(self, request: PatchRequest) -> Verdict:
        api_key = os.environ.get(API_KEY_ENV)
        if not api_key:
            raise AuthFailure(f"{API_KEY_ENV} is not set; refusing to call the endpoint")
        body = {
            "model": self.config.model_name,
            "prompt": build_patch_prompt(),
            "image_base64": base64.b64encode(request.image_bytes).decode("ascii"),
        }
        last_error = None
        for attempt in range(self.config.max_retries):
            if attempt:
                self._sleep(2.0 ** (attempt - 1))
            try:
                reply = self._session.post(
                    self.config.endpoint_url,
                    json=body,
                    headers={"Authorization": f"Bearer {api_key}"},
                    timeout=self.config.timeout_s,
                )
            except requests.RequestException as exc:
                last_error = VerifierTimeout(f"transport failure: {exc}")
                continue
            if reply.status_code in (401, 403):
                raise AuthFailure(f"endpoint rejected credentials (HTTP {reply.status_code})")
            if reply.status_code >= 500:
                last_error = VerifierTimeout(f"endpoint error HTTP {reply.status_code}")
                continue
            if reply.status_code != 200:
                raise MalformedResponse(f"unexpected HTTP {reply.status_code}")
            try:
                text = reply.json()["text"]
            except (ValueError, KeyError) as exc:
                raise MalformedResponse(f"reply body missing 'text': {exc}") from exc
            return parse_verdict(text, source="remote_model", model_name=self.config.model_name)
        raise last_error


def remote_verify(request: PatchRequest, config: EndpointConfig) -> Verdict:
    return RemoteVerifier(config).verify(request)
