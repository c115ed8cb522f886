"""Corpus ingestion (JSONL records) and descriptive statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .perturb import applicability_report
from .syntax import ParseError, parse_text, profile


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    id: str
    nl: str
    gold: str
    samples: tuple[str, ...] = ()


@dataclass(frozen=True)
class SchemaError:
    line_number: int
    message: str


@dataclass
class LoadReport:
    records: list[Record] = field(default_factory=list)
    errors: list[SchemaError] = field(default_factory=list)


def _dedupe(samples: list[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for s in samples:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return tuple(out)


def parse_record_line(obj: dict, fmt: str) -> Record:
    if fmt == "records":
        rid = obj["id"]
        gold = obj["gold"]
        samples = obj.get("samples", [])
        if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
            raise ValueError("samples must be a list of strings")
        record = Record(str(rid), str(obj.get("nl", "")), str(gold), _dedupe(samples))
    elif fmt == "flat-fol":
        record = Record(str(obj["id"]), "", str(obj["gold"]), ())
    else:
        raise ValueError(f"unknown corpus format: {fmt!r}")
    if not record.gold:
        raise ValueError("gold formula must be nonempty")
    return record


def load_corpus(path: str | Path, fmt: str = "records") -> LoadReport:
    """Read one JSON object per line; malformed lines become SchemaErrors."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    report = LoadReport()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("line is not a JSON object")
                report.records.append(parse_record_line(obj, fmt))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
                report.errors.append(SchemaError(lineno, str(err)))
    return report


def corpus_stats(records: list[Record], notation: str = "mixed") -> dict:
    """Operator-count histogram (0..7+), perturbation applicability, parse failures."""
    if not records:
        raise EmptyCorpus("stats over an empty corpus")
    histogram = {str(i): 0 for i in range(7)}
    histogram["7+"] = 0
    parsed = []
    failures = 0
    for rec in records:
        try:
            f = parse_text(rec.gold, notation)
        except (ParseError, ValueError):
            failures += 1
            continue
        parsed.append(f)
        total = profile(f).total
        histogram[str(total) if total < 7 else "7+"] += 1
    applicability = {}
    if parsed:
        applicability = {
            kind.value: pct
            for kind, pct in applicability_report(parsed).items()
        }
    return {
        "records": len(records),
        "parse_failures": failures,
        "operator_histogram": histogram,
        "applicability": applicability,
    }
