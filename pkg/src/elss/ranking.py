"""Context-aware ranking of verified candidates: POI proximity, active-hours
gating, regulatory buffer checks, safety scores, strict ranking, and
deterministic natural-language justifications. Also assembles the
four-stream ranking prompt for an optional vision-language backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Optional

from .errors import EmptyInput, FrameMismatch
from .proposal import Candidate
from .verify import Verdict

WEEKDAY_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")


@dataclass(frozen=True)
class ActiveHours:
    """Weekly recurring activity window: civil hours [start, end) on the
    given weekdays (0 = Monday)."""

    weekdays: frozenset[int]
    start_hour: float
    end_hour: float

    def __post_init__(self):
        if not (0 <= self.start_hour < self.end_hour <= 24):
            raise ValueError(f"bad hour range [{self.start_hour}, {self.end_hour})")

    def contains(self, ts: datetime) -> bool:
        hour = ts.hour + ts.minute / 60.0 + ts.second / 3600.0
        return ts.weekday() in self.weekdays and self.start_hour <= hour < self.end_hour


@dataclass(frozen=True)
class PoiRecord:
    category: str
    position: tuple[float, float]  # planar world meters
    name: Optional[str] = None
    active_hours: tuple[ActiveHours, ...] = ()
    frame: str = "local"

    def __post_init__(self):
        if not self.category:
            raise ValueError("POI category must be nonempty")

    def is_active(self, ts: datetime) -> bool:
        """A POI with no hours is always active (permanent hazard)."""
        if not self.active_hours:
            return True
        return any(h.contains(ts) for h in self.active_hours)


class Weather(str, Enum):
    clear = "clear"
    rain = "rain"
    fog = "fog"
    wind = "wind"


@dataclass(frozen=True)
class DynamicContext:
    timestamp: datetime
    weather: Weather = Weather.clear
    events: tuple[str, ...] = ()

    @property
    def weekday(self) -> int:
        return self.timestamp.weekday()


DEFAULT_SENSITIVE_CATEGORIES = {
    "school": 1.0,
    "gas_station": 1.0,
    "power_line": 0.9,
    "crowd": 1.0,
    "hospital": 0.8,
}

DEFAULT_EVENT_MULTIPLIERS = {
    "rush_hour": 0.6,
    "public_holiday": 0.8,
}


@dataclass(frozen=True)
class RegulatoryConfig:
    """The 1:1 rule: lateral buffer distance equals operating altitude."""

    operating_altitude_m: float
    sensitive_categories: dict = field(
        default_factory=lambda: dict(DEFAULT_SENSITIVE_CATEGORIES)
    )
    event_multipliers: dict = field(
        default_factory=lambda: dict(DEFAULT_EVENT_MULTIPLIERS)
    )

    def __post_init__(self):
        if self.operating_altitude_m <= 0:
            raise ValueError("operating_altitude_m must be positive")
        for cat, w in self.sensitive_categories.items():
            if not (0 < w <= 1):
                raise ValueError(f"weight for {cat!r} must be in (0, 1], got {w}")

    @property
    def buffer_m(self) -> float:
        return self.operating_altitude_m


@dataclass(frozen=True)
class Violation:
    poi: PoiRecord
    distance_m: float
    required_buffer_m: float


@dataclass
class LandingSite:
    candidate: Candidate
    verdict: Verdict
    bbox_world: tuple[float, float, float, float]  # (x0, y0, x1, y1) meters
    frame: str = "local"
    sigma: float = 0.0
    rank: int = 0
    justification: str = ""
    poi_violations: list = field(default_factory=list)
    dynamic_factors: list = field(default_factory=list)


def poi_distance(site: LandingSite, poi: PoiRecord) -> float:
    """Euclidean distance from the site box boundary to the POI (0 inside)."""
    if site.frame != poi.frame:
        raise FrameMismatch(f"site frame {site.frame!r} != poi frame {poi.frame!r}")
    x0, y0, x1, y1 = site.bbox_world
    px, py = poi.position
    dx = max(x0 - px, 0.0, px - x1)
    dy = max(y0 - py, 0.0, py - y1)
    return math.hypot(dx, dy)


def regulatory_check(
    site: LandingSite,
    pois: list[PoiRecord],
    reg: RegulatoryConfig,
    ctx: DynamicContext,
) -> list[Violation]:
    """Buffer violations: sensitive, currently active POIs closer than the
    1:1 buffer distance."""
    violations = []
    for poi in pois:
        if poi.category not in reg.sensitive_categories:
            continue
        if not poi.is_active(ctx.timestamp):
            continue
        dist = poi_distance(site, poi)
        if dist < reg.buffer_m:
            violations.append(Violation(poi=poi, distance_m=dist, required_buffer_m=reg.buffer_m))
    return violations


def safety_score(
    site: LandingSite,
    pois: list[PoiRecord],
    reg: RegulatoryConfig,
    ctx: DynamicContext,
) -> float:
    """sigma = v * (1 - poi_penalty) * dyn, clamped to [0, 1].

    v gates on the visual verdict; poi_penalty is the worst active
    sensitive-POI proximity term weight * max(0, 1 - distance/buffer); dyn
    is the product of the configured event multipliers.
    """
    if site.verdict.label != "safe":
        return 0.0
    penalty = 0.0
    for poi in pois:
        weight = reg.sensitive_categories.get(poi.category)
        if weight is None or not poi.is_active(ctx.timestamp):
            continue
        dist = poi_distance(site, poi)
        penalty = max(penalty, weight * max(0.0, 1.0 - dist / reg.buffer_m))
    dyn = 1.0
    for event in ctx.events:
        dyn *= reg.event_multipliers.get(event, 1.0)
    return min(1.0, max(0.0, (1.0 - penalty) * dyn))


def score_sites(
    sites: list[LandingSite],
    pois: list[PoiRecord],
    reg: RegulatoryConfig,
    ctx: DynamicContext,
) -> list[LandingSite]:
    """Score, rank, and attach justifications; returns sites in rank order."""
    for site in sites:
        site.poi_violations = regulatory_check(site, pois, reg, ctx)
        site.dynamic_factors = [
            e for e in ctx.events if e in reg.event_multipliers
        ]
        site.sigma = safety_score(site, pois, reg, ctx)
    ranked = rank_sites(sites)
    for site in ranked:
        site.justification = render_justification(site, site.poi_violations, ctx)
    return ranked


def rank_sites(sites: list[LandingSite]) -> list[LandingSite]:
    """Sort by sigma descending; ties break by larger response, then
    row-major center. Ranks are assigned 1..m."""
    if not sites:
        raise EmptyInput("no sites to rank")
    ranked = sorted(
        sites,
        key=lambda s: (
            -s.sigma,
            -s.candidate.response,
            s.candidate.center[1],
            s.candidate.center[0],
        ),
    )
    for i, site in enumerate(ranked, start=1):
        site.rank = i
    return ranked


def _poi_clause(violations) -> str:
    if not violations:
        return "no sensitive facilities within the required buffer"
    parts = []
    for v in violations:
        label = v.poi.name or v.poi.category
        parts.append(
            f"{v.poi.category} '{label}' at {v.distance_m:.1f} m "
            f"(buffer {v.required_buffer_m:.0f} m)"
        )
    return "violates buffer: " + ", ".join(parts)


def _dynamic_clause(site, ctx) -> str:
    if site.dynamic_factors:
        return "elevated dynamic risk (" + ", ".join(site.dynamic_factors) + ")"
    return "low dynamic risk"


def render_justification(site: LandingSite, violations, ctx: DynamicContext) -> str:
    cx, cy = site.candidate.center
    surface = f"candidate surface at pixel ({cx}, {cy})"
    return (
        f"Rank {site.rank}: {surface}. "
        f"Justification: {site.verdict.reason}; "
        f"{_poi_clause(violations)}; {_dynamic_clause(site, ctx)}."
    )


def load_pois(path) -> list[PoiRecord]:
    """Read a GeoJSON FeatureCollection of Point features with properties
    {category, name, active_hours}. ``active_hours`` is a list of
    {"days": ["mon", ...], "start": h, "end": h} objects."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a FeatureCollection")
    pois = []
    for feature in doc.get("features", []):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Point":
            continue
        props = feature.get("properties") or {}
        hours = tuple(
            ActiveHours(
                weekdays=frozenset(WEEKDAY_NAMES.index(d.lower()) for d in h["days"]),
                start_hour=float(h["start"]),
                end_hour=float(h["end"]),
            )
            for h in props.get("active_hours", [])
        )
        pois.append(
            PoiRecord(
                category=props["category"],
                position=(float(geom["coordinates"][0]), float(geom["coordinates"][1])),
                name=props.get("name"),
                active_hours=hours,
            )
        )
    return pois


RANKING_INSTRUCTION = (
    "Produce a strict ranking of the candidate sites from safest to least "
    "safe, with a one-sentence justification per site."
)

REGULATORY_RULE_TEXT = (
    "Maintain 1:1 buffer distance from people: lateral separation in meters "
    "must be at least the operating altitude."
)


def build_ranking_prompt(
    sites: list[LandingSite],
    pois: list[PoiRecord],
    ctx: DynamicContext,
    reg: RegulatoryConfig,
) -> str:
    """Single prompt fusing the four information streams, byte-stable for
    fixed inputs."""
    if not sites:
        raise EmptyInput("no sites for ranking prompt")
    lines = ["## Visual Evidence"]
    for i, site in enumerate(sites, start=1):
        x0, y0, x1, y1 = site.candidate.bbox
        lines.append(
            f"- Site {i}: patch bbox px ({x0}, {y0})-({x1}, {y1}), "
            f"verifier says {site.verdict.label}: {site.verdict.reason}"
        )
    lines.append("")
    lines.append("## Spatial Context")
    if pois:
        lines.append("| POI | category | distances to sites (m) |")
        lines.append("|-----|----------|------------------------|")
        for poi in pois:
            dists = ", ".join(f"{poi_distance(s, poi):.1f}" for s in sites)
            lines.append(f"| {poi.name or '-'} | {poi.category} | {dists} |")
    else:
        lines.append("No points of interest in range.")
    lines.append("")
    lines.append("## Dynamic Context")
    lines.append(f"- timestamp: {ctx.timestamp.isoformat()}")
    lines.append(f"- weekday: {WEEKDAY_NAMES[ctx.weekday]}")
    lines.append(f"- weather: {ctx.weather.value}")
    lines.append(f"- events: {', '.join(ctx.events) if ctx.events else 'none'}")
    lines.append("")
    lines.append("## Regulatory Constraints")
    lines.append(f"- {REGULATORY_RULE_TEXT}")
    lines.append(f"- Operating altitude: {reg.operating_altitude_m:.0f} m.")
    lines.append("")
    lines.append(RANKING_INSTRUCTION)
    return "\n".join(lines)
