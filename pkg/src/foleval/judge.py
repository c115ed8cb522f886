"""External judge: rank three candidate formulas against a gold label.

The live mode fills a fixed three-sample prompt template, posts it to a
chat-completion endpoint, and extracts the first bracketed integer triple
from the reply, retrying once on an unparseable answer.  The offline mode
reads pre-recorded rankings keyed by record id.  Records the judge cannot
rank are reported as missing, never imputed.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

import httpx

from .corpus import Record
from .ranking import RankVector

JUDGE_KEY_ENV = "FOLEVAL_JUDGE_KEY"

DEFAULT_JUDGE_TEMPLATE = (
    "Given a ground truth first-order logic statement and three variations of "
    "samples, your task is to rank the samples in order of similarity with the "
    "label. The output should be a single list with 3 integers, including "
    "[1, 2, 3], where 1 represents the closest match and 3 is the least match. "
    "Do not include any other explanation and the output form is "
    "[rank_sample1, rank_sample2, rank_sample3].\n"
    "\n"
    "Label: {label}\n"
    "Sample 1: {sample1}\n"
    "Sample 2: {sample2}\n"
    "Sample 3: {sample3}\n"
    "Output:"
)

_TRIPLE_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]")


class JudgeUnreachable(RuntimeError):
    pass


class UnparseableReply(ValueError):
    def __init__(self, raw_text: str):
        super().__init__(f"no rank triple found in reply: {raw_text!r}")
        self.raw_text = raw_text


def parse_rank_reply(text: str) -> tuple[int, int, int]:
    """First bracketed integer triple with every entry in {1, 2, 3}."""
    for match in _TRIPLE_RE.finditer(text):
        ranks = tuple(int(g) for g in match.groups())
        if all(r in (1, 2, 3) for r in ranks):
            return ranks
    raise UnparseableReply(text)


def fill_template(record: Record, template: str = DEFAULT_JUDGE_TEMPLATE) -> str:
    if len(record.samples) != 3:
        raise ValueError(
            f"judge template is fixed to 3 samples; record {record.id!r} has "
            f"{len(record.samples)}")
    return template.format(label=record.gold, sample1=record.samples[0],
                           sample2=record.samples[1], sample3=record.samples[2])


class JudgeClient:
    """Chat-completion-style judge endpoint client."""

    def __init__(self, endpoint: str, model: str = "judge",
                 template: str = DEFAULT_JUDGE_TEMPLATE, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.model = model
        self.template = template
        headers = {}
        key = os.environ.get(JUDGE_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._client = httpx.Client(timeout=timeout, headers=headers,
                                    transport=transport)

    def _ask(self, prompt: str) -> str:
        body = {"model": self.model,
                "messages": [{"role": "user", "content": prompt}]}
        try:
            resp = self._client.post(self.endpoint, json=body)
            resp.raise_for_status()
        except httpx.HTTPError as err:
            raise JudgeUnreachable(f"judge endpoint failed: {err}") from err
        payload = resp.json()
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as err:
            raise UnparseableReply(json.dumps(payload)) from err

    def judge_rank(self, record: Record) -> RankVector:
        """Rank one record; retries once when the reply cannot be parsed."""
        prompt = fill_template(record, self.template)
        try:
            ranks = parse_rank_reply(self._ask(prompt))
        except UnparseableReply:
            ranks = parse_rank_reply(self._ask(prompt))
        return RankVector(record.id, "judge", ranks)

    def close(self) -> None:
        self._client.close()


class OfflineJudge:
    """Pre-recorded rankings, one {"record_id", "ranks"} object per line."""

    def __init__(self, path: str | Path):
        self.ranks: dict[str, tuple[int, ...]] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                self.ranks[str(obj["record_id"])] = tuple(int(r) for r in obj["ranks"])

    def judge_rank(self, record: Record) -> RankVector:
        if record.id not in self.ranks:
            raise UnparseableReply(f"no offline ranking for record {record.id!r}")
        return RankVector(record.id, "judge", self.ranks[record.id])


@dataclass
class JudgeRun:
    ranks: list[RankVector]
    missing: list[str]


def judge_corpus(records: list[Record], judge) -> JudgeRun:
    """Rank every record, collecting unusable ones as missing."""
    ranks: list[RankVector] = []
    missing: list[str] = []
    for record in records:
        try:
            ranks.append(judge.judge_rank(record))
        except UnparseableReply:
            missing.append(record.id)
    return JudgeRun(ranks, missing)
