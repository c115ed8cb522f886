"""Command-line entry point: perturb, score, rank, align, stats, judge.

Every subcommand resolves its configuration up front, logs it to stderr as
one JSON line, and (for directory outputs) writes it to ``config.json``.
Outputs are deterministic: re-running with identical inputs produces
byte-identical files.  Exit codes: 0 success, 1 runtime or data error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import defaultdict
from pathlib import Path

from . import __version__
from .corpus import EmptyCorpus, LoadReport, corpus_stats, load_corpus
from .judge import JudgeClient, JudgeUnreachable, OfflineJudge, judge_corpus
from .logic import LEConfig
from .perturb import PerturbationKind, perturb
from .ranking import CoverageMismatch, RankVector, rank, rmse_alignment
from .scoring import (
    SHORT_NAMES, MetricEngine, ScoringConfig, canonical_metric, combine_all,
    score_corpus,
)
from .semantic import FallbackProvider, ProviderUnavailable, RemoteProvider
from .syntax import ParseError, parse_text, print_formula
from .textmetrics import TextMetricConfig

_KIND_OF_FLAG = {k.value: k for k in PerturbationKind}


class UsageError(ValueError):
    pass


def _emit_config(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    config["version"] = __version__
    print(json.dumps({"config": config}, sort_keys=True), file=sys.stderr)
    return config


def _write_config(outdir: Path, config: dict) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load(path: str, fmt: str) -> LoadReport:
    report = load_corpus(path, fmt)
    for err in report.errors:
        print(f"schema error at {path}:{err.line_number}: {err.message}",
              file=sys.stderr)
    return report


def _dump_jsonl(path: Path, objects: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _format_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _parse_kinds(flag: str) -> list[PerturbationKind]:
    if flag == "all":
        return list(PerturbationKind)
    kinds = []
    for part in flag.split(","):
        part = part.strip()
        if part not in _KIND_OF_FLAG:
            raise UsageError(f"unknown perturbation kind: {part!r} "
                             f"(choose from {', '.join(_KIND_OF_FLAG)})")
        kinds.append(_KIND_OF_FLAG[part])
    return kinds


def _parse_metrics(flag: str) -> list[str]:
    if flag == "all":
        return ["bleu", "rouge", "meteor", "le", "bertscore", "smatchpp"]
    try:
        return [canonical_metric(m) for m in flag.split(",") if m.strip()]
    except ValueError as err:
        raise UsageError(str(err)) from err


def _parse_combos(flag: str | None) -> list[tuple[str, str]]:
    if not flag:
        return []
    combos = []
    for part in flag.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split("+")
        if len(pieces) != 2:
            raise UsageError(f"combination must be metric+metric: {part!r}")
        try:
            combos.append((canonical_metric(pieces[0]), canonical_metric(pieces[1])))
        except ValueError as err:
            raise UsageError(str(err)) from err
    return combos


def _make_provider(args: argparse.Namespace):
    if args.provider == "fallback":
        return FallbackProvider()
    if not args.endpoint:
        raise UsageError("--provider remote requires --endpoint")
    provider = RemoteProvider(args.endpoint, model=args.model,
                              batch_size=args.batch_size)
    provider.health()  # fail fast before any batch work
    return provider


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_perturb(args: argparse.Namespace) -> int:
    config = _emit_config(args)
    kinds = _parse_kinds(args.kinds)
    report = _load(args.infile, args.format)
    if not report.records:
        raise EmptyCorpus("no usable records in input")
    outdir = Path(args.out)
    _write_config(outdir, config)

    parsed: dict[str, object] = {}
    parse_failures: list[str] = []
    for rec in report.records:
        try:
            parsed[rec.id] = parse_text(rec.gold, args.notation)
        except (ParseError, ValueError):
            parse_failures.append(rec.id)

    applicability: dict[str, float] = {}
    for kind in kinds:
        lines = []
        applied_count = 0
        for rec in report.records:
            f = parsed.get(rec.id)
            outcome = perturb(f, kind) if f is not None else None
            applied = outcome is not None and outcome.applied
            applied_count += applied
            lines.append({
                "id": rec.id,
                "nl": rec.nl,
                "gold": rec.gold,
                "samples": [print_formula(outcome.result)] if applied else [],
                "applied": applied,
                "sites": outcome.sites if outcome else 0,
            })
        applicability[kind.value] = round(100.0 * applied_count / len(report.records), 2)
        _dump_jsonl(outdir / f"perturbed_{kind.value}.jsonl", lines)

    _dump_jsonl(outdir / "applicability.jsonl",
                [{"kind": k, "percent": v} for k, v in applicability.items()])
    headers = ["corpus"] + [k.value for k in kinds]
    row = [Path(args.infile).stem] + [f"{applicability[k.value]:.2f}" for k in kinds]
    (outdir / "applicability.txt").write_text(_format_table(headers, [row]),
                                              encoding="utf-8")
    report_obj = {"records": len(report.records), "parse_failures": parse_failures,
                  "schema_errors": len(report.errors)}
    (outdir / "perturb_report.json").write_text(
        json.dumps(report_obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def _scoring_config(args: argparse.Namespace) -> ScoringConfig:
    return ScoringConfig(
        text=TextMetricConfig(split_camel_case=args.split_camel_case),
        le=LEConfig(seed=args.seed),
        smatch_restarts=args.restarts,
        seed=args.seed,
        notation=args.notation,
        workers=args.workers,
    )


def cmd_score(args: argparse.Namespace) -> int:
    config = _emit_config(args)
    metrics = _parse_metrics(args.metrics)
    combos = _parse_combos(args.combine)
    for a, b in combos:
        for m in (a, b):
            if m not in metrics:
                raise UsageError(f"combined metric {m!r} must also be scored "
                                 f"(add it to --metrics)")
    cfg = _scoring_config(args)
    provider = _make_provider(args)
    outdir = Path(args.out)
    _write_config(outdir, config)

    mean_rows = []
    for infile in args.infile:
        report = _load(infile, args.format)
        records = [r for r in report.records if r.samples]
        label = Path(infile).stem
        if not records:
            print(f"{infile}: no records with samples; skipping", file=sys.stderr)
            continue
        engine = MetricEngine(cfg, provider)
        scores = score_corpus(records, metrics, cfg, engine=engine)
        scores += combine_all(scores, combos, weight=args.weight)
        _dump_jsonl(outdir / f"scores_{label}.jsonl", [
            {"record_id": s.record_id, "metric": s.metric,
             "sample_index": s.sample_index, "raw": s.raw,
             "normalized": s.normalized, "flags": list(s.flags)}
            for s in scores
        ])
        by_metric: dict[str, list[float]] = defaultdict(list)
        raw_by_metric: dict[str, list[float]] = defaultdict(list)
        for s in scores:
            by_metric[s.metric].append(s.normalized)
            raw_by_metric[s.metric].append(s.raw)
        mean_rows.append({
            "corpus": label,
            "means": {m: sum(v) / len(v) for m, v in sorted(by_metric.items())},
            "raw_means": {m: sum(v) / len(v) for m, v in sorted(raw_by_metric.items())},
            "n_pairs": sum(len(r.samples) for r in records),
        })

    _dump_jsonl(outdir / "means.jsonl", mean_rows)
    if mean_rows:
        all_metrics = sorted({m for row in mean_rows for m in row["means"]})
        headers = ["corpus"] + [SHORT_NAMES.get(m, m) for m in all_metrics]
        table_rows = [
            [row["corpus"]] + [f"{row['means'].get(m, float('nan')):.2f}"
                               for m in all_metrics]
            for row in mean_rows
        ]
        (outdir / "means.txt").write_text(_format_table(headers, table_rows),
                                          encoding="utf-8")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    config = _emit_config(args)
    outdir = Path(args.out)
    _write_config(outdir, config)
    groups: dict[tuple[str, str], dict[int, float]] = defaultdict(dict)
    with Path(args.scores).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            groups[(obj["metric"], obj["record_id"])][int(obj["sample_index"])] = \
                float(obj["normalized"])
    by_ranker: dict[str, list[RankVector]] = defaultdict(list)
    for (metric, record_id), by_index in sorted(groups.items()):
        scores = [by_index[i] for i in sorted(by_index)]
        by_ranker[metric].append(rank(record_id, metric, scores, args.tolerance))
    for metric, vectors in sorted(by_ranker.items()):
        _dump_jsonl(outdir / f"ranks_{metric}.jsonl", [
            {"record_id": v.record_id, "ranker": v.ranker, "ranks": list(v.ranks)}
            for v in vectors
        ])
    return 0


def _read_ranks(path: str) -> list[RankVector]:
    vectors = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            vectors.append(RankVector(str(obj["record_id"]), str(obj["ranker"]),
                                      tuple(int(r) for r in obj["ranks"])))
    if not vectors:
        raise ValueError(f"no rank vectors in {path}")
    return vectors


def cmd_align(args: argparse.Namespace) -> int:
    _emit_config(args)
    report = rmse_alignment(_read_ranks(args.a), _read_ranks(args.b))
    obj = {"ranker_a": report.ranker_a, "ranker_b": report.ranker_b,
           "rmse": report.rmse, "n_pairs": report.n_pairs,
           "excluded": report.excluded, "pooling": report.pooling}
    text = json.dumps(obj, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    _emit_config(args)
    report = _load(args.infile, args.format)
    stats = corpus_stats(report.records, args.notation)
    stats["schema_errors"] = len(report.errors)
    text = json.dumps(stats, indent=2, sort_keys=True)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "stats.json").write_text(text + "\n", encoding="utf-8")
        hist = stats["operator_histogram"]
        table = _format_table(["operators", "records"],
                              [[k, str(v)] for k, v in hist.items()])
        (outdir / "histogram.txt").write_text(table, encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_judge(args: argparse.Namespace) -> int:
    config = _emit_config(args)
    if bool(args.offline) == bool(args.endpoint):
        raise UsageError("judge needs exactly one of --offline or --endpoint")
    report = _load(args.infile, args.format)
    records = [r for r in report.records if len(r.samples) == 3]
    skipped = [r.id for r in report.records if len(r.samples) != 3]
    judge = OfflineJudge(args.offline) if args.offline else JudgeClient(
        args.endpoint, model=args.model)
    run = judge_corpus(records, judge)
    outdir = Path(args.out)
    _write_config(outdir, config)
    _dump_jsonl(outdir / "ranks_judge.jsonl", [
        {"record_id": v.record_id, "ranker": v.ranker, "ranks": list(v.ranks)}
        for v in run.ranks
    ])
    (outdir / "judge_report.json").write_text(json.dumps({
        "ranked": len(run.ranks),
        "missing": run.missing,
        "skipped_not_three_samples": skipped,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["records", "flat-fol"], default="records")
    p.add_argument("--notation", choices=["unicode", "ascii", "mixed"],
                   default="mixed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foleval",
        description="FOL closeness metrics, perturbations, and rank alignment")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perturb", help="apply perturbations to gold formulas")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kinds", default="all",
                   help="'all' or comma list: " + ", ".join(_KIND_OF_FLAG))
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("score", help="score candidate samples against gold")
    p.add_argument("--in", dest="infile", nargs="+", required=True,
                   help="one or more record files; each becomes a table row")
    p.add_argument("--metrics", default="all")
    p.add_argument("--combine", default=None,
                   help="comma list of metric pairs, e.g. le+bs,bl+sp")
    p.add_argument("--weight", type=float, default=0.5,
                   help="interpolation weight for the first metric of each pair")
    p.add_argument("--provider", choices=["fallback", "remote"], default="fallback")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--model", default="default")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=17)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="harness pool size; outputs are independent of it")
    p.add_argument("--split-camel-case", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="turn score files into tie-aware rank files")
    p.add_argument("--scores", required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("align", help="pooled rank RMSE between two rank files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("stats", help="operator and applicability statistics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("judge", help="rank samples with an external judge")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--offline", default=None,
                   help="pre-recorded rankings file (record_id + ranks)")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--model", default="judge")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_judge)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except (FileNotFoundError, EmptyCorpus, CoverageMismatch, ValueError,
            ProviderUnavailable, JudgeUnreachable, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
