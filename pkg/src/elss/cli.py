"""Command-line entry points: kernel-dump | propose | pipeline | eval |
validate-config.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 verifier
transport error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import evaluation, pipeline, proposal
from .errors import (
    ConfigError,
    ElssError,
    InvalidHalfWidth,
    LoopAborted,
    SchemaViolation,
    VerifierTransportError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TRANSPORT = 4


def _build_parser():
    parser = argparse.ArgumentParser(prog="elss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-dump", help="print the radial kernel weight matrix")
    p.add_argument("--d", type=int, required=True, help="kernel half-width in pixels")
    p.add_argument("--out", help="write the matrix as JSON instead of stdout")

    p = sub.add_parser("propose", help="run Stage 2 only and write the trace")
    _add_pipeline_args(p)

    p = sub.add_parser("pipeline", help="run the full Stage 1-3 pipeline")
    _add_pipeline_args(p)

    p = sub.add_parser("eval", help="compute metrics from logs/benchmarks")
    p.add_argument("--log", help="verdict log (JSONL)")
    p.add_argument("--strategy", choices=["random", "semantic"])
    p.add_argument("--model")
    p.add_argument("--benchmark", help="ELSS-B1 benchmark file")
    p.add_argument("--outcomes", help="ranking outcomes (JSONL)")
    p.add_argument(
        "--metrics",
        default="all",
        choices=["all", "passing-rate", "prf", "ranking"],
    )
    p.add_argument("--out", help="write the metrics document to this path")

    p = sub.add_parser("validate-config", help="check a pipeline config file")
    p.add_argument("--config", required=True)
    return parser


def _add_pipeline_args(p):
    p.add_argument("--config", required=True, help="pipeline config (JSON)")
    p.add_argument("--out", help="override report output path")
    p.add_argument("--trace", help="override trace output path")
    p.add_argument("--backend", choices=["oracle", "remote"])
    p.add_argument("--d", type=int)
    p.add_argument("--max-accepted", type=int)
    p.add_argument("--policy")


def _load_config(args):
    config = pipeline.PipelineConfig.from_file(args.config)
    for attr, key in (
        ("out", "out_report"),
        ("trace", "out_trace"),
        ("backend", "backend"),
        ("d", "d"),
        ("max_accepted", "max_accepted"),
        ("policy", "policy"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(config, key, value)
    return config


def cmd_kernel_dump(args):
    try:
        kernel = proposal.build_kernel(args.d)
    except InvalidHalfWidth as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    doc = {"d": kernel.d, "weights": kernel.weights.tolist()}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        pipeline.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_pipeline(args, trace_only=False):
    config = _load_config(args)
    report, records = pipeline.run_pipeline(config)
    if trace_only:
        pipeline.atomic_write_text(config.out_trace, pipeline.serialize_trace(records))
    else:
        pipeline.write_outputs(config, report, records)
    return EXIT_OK


def cmd_eval(args):
    doc = {}
    want = args.metrics
    if args.log and want in ("all", "passing-rate"):
        log = evaluation.load_verdict_log(args.log)
        if args.strategy and args.model:
            doc["passing_rate"] = {
                f"{args.strategy}/{args.model}": evaluation.passing_rate(
                    log, args.strategy, args.model
                )
            }
        else:
            rates = {}
            for key in sorted({(e.strategy, e.model_name) for e in log.entries}):
                rates["/".join(key)] = evaluation.passing_rate(log, *key)
            doc["passing_rate"] = rates
    if args.log and want in ("all", "prf"):
        log = evaluation.load_verdict_log(args.log)
        if all(e.gt_label is not None for e in log.entries):
            doc["filter_metrics"] = evaluation.precision_recall_posratio(log)
    if args.benchmark and args.outcomes and want in ("all", "ranking"):
        queries = evaluation.load_benchmark(args.benchmark)
        outcomes = _load_outcomes(args.outcomes)
        doc["ranking_metrics"] = evaluation.ranking_metrics(outcomes, queries)
    if not doc:
        raise ConfigError("no metrics selected; pass --log and/or --benchmark/--outcomes")
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        pipeline.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load_outcomes(path):
    outcomes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                outcomes.append(
                    evaluation.RankingOutcome(
                        query_id=str(rec["query_id"]),
                        predicted_best=rec.get("predicted_best"),
                        predicted_worst=rec.get("predicted_worst"),
                        abstained=bool(rec.get("abstained", False)),
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise SchemaViolation(f"{path}:{lineno}: {exc}") from exc
    return outcomes


def cmd_validate_config(args):
    pipeline.PipelineConfig.from_file(args.config).validate()
    print("config OK")
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "kernel-dump":
            return cmd_kernel_dump(args)
        if args.command == "propose":
            return cmd_pipeline(args, trace_only=True)
        if args.command == "pipeline":
            return cmd_pipeline(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "validate-config":
            return cmd_validate_config(args)
    except (ConfigError, SchemaViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LoopAborted as exc:
        print(f"verifier transport error: {exc.cause}", file=sys.stderr)
        return EXIT_TRANSPORT
    except VerifierTransportError as exc:
        print(f"verifier transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ElssError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
