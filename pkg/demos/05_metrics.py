"""Evaluation harness walkthrough: passing rate, precision / recall /
positive ratio, and Right/False/Other ranking rates from fixture logs.

Run: python3 demos/05_metrics.py
"""

from elss.evaluation import (
    BenchmarkCandidate,
    BenchmarkQuery,
    RankingOutcome,
    VerdictEntry,
    VerdictLog,
    passing_rate,
    precision_recall_posratio,
    ranking_metrics,
)


def entries(safe, total, strategy):
    return tuple(
        VerdictEntry(
            candidate_id=f"{strategy}-{i}",
            strategy=strategy,
            verdict="safe" if i < safe else "unsafe",
            model_name="demo-model",
            gt_label="safe" if (i + strategy.startswith("s")) % 3 else "unsafe",
        )
        for i in range(total)
    )


log = VerdictLog(entries=entries(19, 100, "random") + entries(57, 100, "semantic"))
print("passing rate, random sampling:  ",
      passing_rate(log, "random", "demo-model"), "%")
print("passing rate, semantic proposal:",
      passing_rate(log, "semantic", "demo-model"), "%")

print("\nfilter quality (safe = positive class):")
for key, value in precision_recall_posratio(log).items():
    print(f"  {key}: {value} %")


def query(qid):
    return BenchmarkQuery(
        query_id=qid,
        region="demo",
        candidates=tuple(
            BenchmarkCandidate(candidate_id=c, image_path="", bbox=(0, 0, 1, 1))
            for c in "abcd"
        ),
        best="a",
        worst="d",
        labels={},
    )


queries = [query(f"q{i}") for i in range(10)]
outcomes = (
    [RankingOutcome(f"q{i}", "a", "d") for i in range(7)]  # both extremes right
    + [RankingOutcome("q7", "d", "b")]  # picked the worst as best
    + [RankingOutcome("q8", "b", "c")]  # wrong but not inverted
    + [RankingOutcome("q9", abstained=True)]
)
print("\nranking rates over 10 demo queries:")
for key, value in ranking_metrics(outcomes, queries).items():
    print(f"  {key}: {value} %")
