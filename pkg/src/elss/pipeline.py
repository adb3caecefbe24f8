"""End-to-end orchestration: Stage 1 (suitability + cross-validation),
Stage 2 (propose-and-verify loop), Stage 3 (context-aware ranking), with a
JSON config, deterministic report/trace serialization, and atomic writes.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

from . import proposal, ranking, raster, verify
from .errors import ConfigError


@dataclass
class PipelineConfig:
    labels_path: str
    poi_path: Optional[str] = None
    map_layer_path: Optional[str] = None
    hazards_path: Optional[str] = None
    profile: Optional[str] = None  # named class-mapping profile
    suitable_classes: Optional[list] = None  # overrides the profile
    policy: str = "intersection"
    required_landing_radius_m: float = 10.0
    d: Optional[int] = None  # default: ceil(radius / gsd)
    max_accepted: int = 3
    max_iterations: int = 20
    response_floor: Optional[float] = None  # default: half the kernel mass
    backend: str = "oracle"  # "oracle" | "remote"
    endpoint_url: Optional[str] = None
    model_name: Optional[str] = None
    max_retries: int = 3
    timeout_s: float = 30.0
    timestamp: str = "2025-06-02T10:00:00"
    weather: str = "clear"
    events: list = field(default_factory=list)
    operating_altitude_m: float = 30.0
    sensitive_categories: Optional[dict] = None
    event_multipliers: Optional[dict] = None
    out_report: str = "report.json"
    out_trace: str = "trace.jsonl"
    seed: int = 0  # reserved; the core is deterministic

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**doc)

    def validate(self):
        if not os.path.exists(self.labels_path):
            raise ConfigError(f"labels raster not found: {self.labels_path}")
        for label, path in (
            ("map layer", self.map_layer_path),
            ("POI file", self.poi_path),
            ("hazard layer", self.hazards_path),
        ):
            if path and not os.path.exists(path):
                raise ConfigError(f"{label} not found: {path}")
        if self.profile is None and not self.suitable_classes:
            raise ConfigError("either profile or suitable_classes must be set")
        if self.profile is not None and self.profile not in raster.PROFILES:
            raise ConfigError(
                f"unknown profile {self.profile!r}; known: {sorted(raster.PROFILES)}"
            )
        try:
            raster.CrossValidationPolicy(self.policy)
        except ValueError:
            raise ConfigError(f"unknown cross-validation policy {self.policy!r}") from None
        if self.backend not in ("oracle", "remote"):
            raise ConfigError(f"backend must be 'oracle' or 'remote', got {self.backend!r}")
        if self.backend == "remote" and not (self.endpoint_url and self.model_name):
            raise ConfigError("remote backend requires endpoint_url and model_name")
        if self.d is not None and self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if self.max_accepted < 1 or self.max_iterations < self.max_accepted:
            raise ConfigError("need max_accepted >= 1 and max_iterations >= max_accepted")
        try:
            datetime.fromisoformat(self.timestamp)
        except ValueError:
            raise ConfigError(f"timestamp not ISO-8601: {self.timestamp!r}") from None
        try:
            ranking.Weather(self.weather)
        except ValueError:
            raise ConfigError(f"unknown weather {self.weather!r}") from None
        return self

    def class_mapping(self):
        if self.suitable_classes:
            return raster.ClassMapping(frozenset(self.suitable_classes))
        return raster.PROFILES[self.profile]

    def digest(self) -> str:
        doc = {k: getattr(self, k) for k in sorted(self.__dataclass_fields__)}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def atomic_write_text(path, text):
    """Write via temp file + rename so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".elss-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def serialize_trace(records) -> str:
    """One JSON record per line, in iteration order."""
    return "".join(
        json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
        for r in records
    )


def _make_verifier(config, suitability):
    if config.backend == "oracle":
        if config.hazards_path:
            hazard_raster = raster.load_suitability_raster(config.hazards_path)
            if hazard_raster.data.shape != suitability.data.shape:
                raise ConfigError("hazard layer dimensions do not match the pipeline raster")
            hazards = verify.HazardLayer(grid=hazard_raster.data.copy())
        else:
            hazards = verify.HazardLayer.empty(suitability.width, suitability.height)
        return verify.RuleOracleVerifier(hazards)
    endpoint = verify.EndpointConfig(
        endpoint_url=config.endpoint_url,
        model_name=config.model_name,
        max_retries=config.max_retries,
        timeout_s=config.timeout_s,
    )
    return verify.RemoteVerifier(endpoint)


def run_pipeline(config: PipelineConfig):
    """Stage 1 -> Stage 2 -> Stage 3; returns (report dict, trace records)."""
    config.validate()

    # Stage 1: suitability derivation and optional map cross-validation.
    labels = raster.load_label_raster(config.labels_path)
    suitability = raster.derive_suitability(labels, config.class_mapping())
    if config.map_layer_path:
        map_layer = raster.load_suitability_raster(config.map_layer_path)
        suitability = raster.cross_validate(
            suitability, map_layer, raster.CrossValidationPolicy(config.policy)
        )

    # Stage 2: iterative propose-and-verify.
    d = config.d or proposal.default_half_width(
        config.required_landing_radius_m, suitability.meta.gsd
    )
    kernel = proposal.build_kernel(d)
    floor = (
        config.response_floor
        if config.response_floor is not None
        else proposal.default_response_floor(kernel)
    )
    loop_config = proposal.LoopConfig(
        d=d,
        max_accepted=config.max_accepted,
        max_iterations=config.max_iterations,
        response_floor=floor,
    )
    verifier = _make_verifier(config, suitability)
    result = proposal.run_proposal_loop(suitability, verifier, loop_config)

    # Stage 3: context-aware scoring and ranking of accepted sites.
    pois = ranking.load_pois(config.poi_path) if config.poi_path else []
    ctx = ranking.DynamicContext(
        timestamp=datetime.fromisoformat(config.timestamp),
        weather=ranking.Weather(config.weather),
        events=tuple(config.events),
    )
    reg_kwargs = {"operating_altitude_m": config.operating_altitude_m}
    if config.sensitive_categories is not None:
        reg_kwargs["sensitive_categories"] = dict(config.sensitive_categories)
    if config.event_multipliers is not None:
        reg_kwargs["event_multipliers"] = dict(config.event_multipliers)
    reg = ranking.RegulatoryConfig(**reg_kwargs)

    sites = []
    for candidate, verdict in result.accepted:
        x0, y0, x1, y1 = candidate.bbox
        meta = suitability.meta
        bbox_world = (
            meta.origin[0] + x0 * meta.gsd,
            meta.origin[1] + y0 * meta.gsd,
            meta.origin[0] + x1 * meta.gsd,
            meta.origin[1] + y1 * meta.gsd,
        )
        sites.append(
            ranking.LandingSite(candidate=candidate, verdict=verdict, bbox_world=bbox_world)
        )
    ranked = ranking.score_sites(sites, pois, reg, ctx) if sites else []

    report = {
        "sites": [
            {
                "rank": s.rank,
                "center_px": list(s.candidate.center),
                "bbox_world": list(s.bbox_world),
                "sigma": s.sigma,
                "justification": s.justification,
                "evidence": {
                    "visual": {
                        "label": s.verdict.label,
                        "reason": s.verdict.reason,
                        "source": s.verdict.source,
                    },
                    "poi_violations": [
                        {
                            "category": v.poi.category,
                            "name": v.poi.name,
                            "distance_m": v.distance_m,
                            "required_buffer_m": v.required_buffer_m,
                        }
                        for v in s.poi_violations
                    ],
                    "dynamic_factors": list(s.dynamic_factors),
                },
            }
            for s in ranked
        ],
        "context": {
            "timestamp": config.timestamp,
            "weather": config.weather,
            "events": list(config.events),
        },
        "config_digest": config.digest(),
    }
    return report, result.records


def write_outputs(config: PipelineConfig, report, records):
    atomic_write_text(
        config.out_report, json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    atomic_write_text(config.out_trace, serialize_trace(records))
