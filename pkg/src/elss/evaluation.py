"""Metric arithmetic for the evaluation tables: passing rate, precision /
recall / positive ratio, and Right/False/Other ranking rates, plus loaders
for verdict logs (JSONL) and the ELSS-B1 benchmark file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import (
    IdMismatch,
    MissingGroundTruth,
    NoMatchingEntries,
    NotFourCandidates,
    SchemaViolation,
    UndefinedMetric,
)

BENCHMARK_SCHEMA_TAG = "ELSS-B1"


def round_half_up(x: float) -> int:
    """Integer rounding matching the tables (0.5 rounds away from zero)."""
    import math

    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class VerdictEntry:
    candidate_id: str
    strategy: str  # "random" | "semantic"
    verdict: str  # "safe" | "unsafe"
    model_name: str
    gt_label: Optional[str] = None  # "safe" | "unsafe"


@dataclass(frozen=True)
class VerdictLog:
    entries: tuple[VerdictEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            key = (e.strategy, e.model_name, e.candidate_id)
            if key in seen:
                raise SchemaViolation(f"duplicate candidate_id {key}")
            seen.add(key)


def load_verdict_log(path) -> VerdictLog:
    """Line-delimited JSON: trace-record fields plus candidate_id, strategy,
    model_name, and optional gt_label."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            try:
                entries.append(
                    VerdictEntry(
                        candidate_id=str(rec["candidate_id"]),
                        strategy=rec["strategy"],
                        verdict=rec["verdict"],
                        model_name=rec["model_name"],
                        gt_label=rec.get("gt_label"),
                    )
                )
            except KeyError as exc:
                raise SchemaViolation(f"{path}:{lineno}: missing field {exc}") from exc
            if entries[-1].strategy not in ("random", "semantic"):
                raise SchemaViolation(f"{path}:{lineno}: bad strategy {entries[-1].strategy!r}")
            if entries[-1].verdict not in ("safe", "unsafe"):
                raise SchemaViolation(f"{path}:{lineno}: bad verdict {entries[-1].verdict!r}")
    return VerdictLog(entries=tuple(entries))


def passing_rate(log: VerdictLog, strategy: str, model: str) -> int:
    """Percent of matching entries verified safe, to integer percent."""
    matching = [e for e in log.entries if e.strategy == strategy and e.model_name == model]
    if not matching:
        raise NoMatchingEntries(f"no entries for strategy={strategy!r} model={model!r}")
    safe = sum(1 for e in matching if e.verdict == "safe")
    return round_half_up(100.0 * safe / len(matching))


def precision_recall_posratio(log: VerdictLog) -> dict:
    """Confusion metrics with "safe" as the positive class.

    ``positive_ratio`` is the ground-truth-positive share; the share the
    verifier itself deemed positive is emitted separately as
    ``predicted_positive_ratio`` (the two readings of the table column).
    """
    if not log.entries:
        raise NoMatchingEntries("empty verdict log")
    for e in log.entries:
        if e.gt_label is None:
            raise MissingGroundTruth(f"entry {e.candidate_id} lacks gt_label")
    tp = sum(1 for e in log.entries if e.verdict == "safe" and e.gt_label == "safe")
    fp = sum(1 for e in log.entries if e.verdict == "safe" and e.gt_label == "unsafe")
    fn = sum(1 for e in log.entries if e.verdict == "unsafe" and e.gt_label == "safe")
    total = len(log.entries)
    if tp + fp == 0:
        raise UndefinedMetric("precision undefined: no predicted positives")
    if tp + fn == 0:
        raise UndefinedMetric("recall undefined: no ground-truth positives")
    return {
        "precision": round_half_up(100.0 * tp / (tp + fp)),
        "recall": round_half_up(100.0 * tp / (tp + fn)),
        "positive_ratio": round_half_up(100.0 * (tp + fn) / total),
        "predicted_positive_ratio": round_half_up(100.0 * (tp + fp) / total),
    }


@dataclass(frozen=True)
class BenchmarkCandidate:
    candidate_id: str
    image_path: str
    bbox: tuple[float, float, float, float]
    pois: tuple = ()


@dataclass(frozen=True)
class BenchmarkQuery:
    query_id: str
    region: str
    candidates: tuple[BenchmarkCandidate, ...]
    best: str
    worst: str
    labels: dict  # candidate_id -> "safe" | "unsafe"

    def __post_init__(self):
        if len(self.candidates) != 4:
            raise NotFourCandidates(
                f"query {self.query_id}: {len(self.candidates)} candidates, expected 4"
            )
        ids = {c.candidate_id for c in self.candidates}
        if self.best == self.worst:
            raise SchemaViolation(f"query {self.query_id}: best == worst")
        if self.best not in ids or self.worst not in ids:
            raise SchemaViolation(f"query {self.query_id}: best/worst not among candidate ids")


@dataclass(frozen=True)
class RankingOutcome:
    query_id: str
    predicted_best: Optional[str] = None
    predicted_worst: Optional[str] = None
    abstained: bool = False

    def __post_init__(self):
        if self.abstained and (self.predicted_best or self.predicted_worst):
            raise SchemaViolation(
                f"outcome {self.query_id}: abstained outcomes carry no predictions"
            )


def load_benchmark(path) -> list[BenchmarkQuery]:
    """Read an ELSS-B1 benchmark document; queries returned in file order."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != BENCHMARK_SCHEMA_TAG:
        raise SchemaViolation(f"{path}: schema tag {doc.get('schema')!r} != {BENCHMARK_SCHEMA_TAG!r}")
    queries = []
    for q in doc.get("queries", []):
        qid = q.get("query_id", "<missing>")
        try:
            candidates = tuple(
                BenchmarkCandidate(
                    candidate_id=str(c["id"]),
                    image_path=str(c.get("image", "")),
                    bbox=tuple(float(v) for v in c["bbox"]),
                    pois=tuple(c.get("pois", [])),
                )
                for c in q["candidates"]
            )
            gt = q["ground_truth"]
            queries.append(
                BenchmarkQuery(
                    query_id=str(qid),
                    region=str(q.get("region", "")),
                    candidates=candidates,
                    best=str(gt["best"]),
                    worst=str(gt["worst"]),
                    labels={str(k): v for k, v in gt.get("labels", {}).items()},
                )
            )
        except KeyError as exc:
            raise SchemaViolation(f"query {qid}: missing field {exc}") from exc
    return queries


def ranking_metrics(outcomes: list[RankingOutcome], queries: list[BenchmarkQuery]) -> dict:
    """Right = both extremes correct; False = a best/worst inversion; Other =
    everything else including abstentions. Integer percents."""
    by_id = {q.query_id: q for q in queries}
    if len(by_id) != len(queries):
        raise IdMismatch("duplicate query_id in benchmark")
    if {o.query_id for o in outcomes} != set(by_id):
        raise IdMismatch("outcome query ids do not match benchmark query ids")
    right = false = other = 0
    for outcome in outcomes:
        q = by_id[outcome.query_id]
        if outcome.abstained:
            other += 1
        elif outcome.predicted_best == q.best and outcome.predicted_worst == q.worst:
            right += 1
        elif outcome.predicted_best == q.worst or outcome.predicted_worst == q.best:
            false += 1
        else:
            other += 1
    n = len(outcomes)
    if n == 0:
        raise NoMatchingEntries("no ranking outcomes")
    return {
        "right_rate": round_half_up(100.0 * right / n),
        "false_rate": round_half_up(100.0 * false / n),
        "other": round_half_up(100.0 * other / n),
    }
