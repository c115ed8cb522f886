"""Tie-aware competition ranking, pooled rank RMSE, and score disagreement."""

from __future__ import annotations

import math
from dataclasses import dataclass


class LengthMismatch(ValueError):
    pass


class CoverageMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RankVector:
    record_id: str
    ranker: str
    ranks: tuple[int, ...]


@dataclass(frozen=True)
class AlignmentReport:
    ranker_a: str
    ranker_b: str
    rmse: float
    n_pairs: int
    excluded: int = 0
    pooling: str = "pooled"


def competition_ranks(scores: list[float], tolerance: float = 1e-6) -> list[int]:
    """Higher score is better; equal scores share the lower rank and the
    following rank is skipped, e.g. [1, 1, 3].

    Scores within ``tolerance`` of each other tie; tie groups close under
    chaining so the result never depends on input order.
    """
    if not scores:
        return []
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    ranks = [0] * len(scores)
    group_start = 0
    ranks[order[0]] = 1
    for pos in range(1, len(order)):
        prev, here = order[pos - 1], order[pos]
        if abs(scores[prev] - scores[here]) <= tolerance:
            ranks[here] = ranks[order[group_start]]
        else:
            group_start = pos
            ranks[here] = pos + 1
    return ranks


def rank(record_id: str, ranker: str, scores: list[float],
         tolerance: float = 1e-6) -> RankVector:
    return RankVector(record_id, ranker, tuple(competition_ranks(scores, tolerance)))


def rmse_alignment(ranks_a: list[RankVector], ranks_b: list[RankVector]) -> AlignmentReport:
    """Pooled RMSE over all (record, sample) rank pairs shared by both sides.

    Records present on only one side are excluded and counted; a shared
    record with differing sample counts is a coverage error.
    """
    by_a = {rv.record_id: rv for rv in ranks_a}
    by_b = {rv.record_id: rv for rv in ranks_b}
    shared = sorted(set(by_a) & set(by_b))
    excluded = len(set(by_a) ^ set(by_b))
    if not shared:
        raise CoverageMismatch("no shared record ids between the two rankers")
    total = 0.0
    n = 0
    for rid in shared:
        ra, rb = by_a[rid], by_b[rid]
        if len(ra.ranks) != len(rb.ranks):
            raise CoverageMismatch(
                f"record {rid!r} has {len(ra.ranks)} vs {len(rb.ranks)} samples")
        for x, y in zip(ra.ranks, rb.ranks):
            total += (x - y) ** 2
            n += 1
    ranker_a = ranks_a[0].ranker if ranks_a else "a"
    ranker_b = ranks_b[0].ranker if ranks_b else "b"
    return AlignmentReport(ranker_a, ranker_b, math.sqrt(total / n), n, excluded)


def disagreement(scores_a: list[float], scores_b: list[float]) -> float:
    """Mean absolute difference between two score lists."""
    if len(scores_a) != len(scores_b):
        raise LengthMismatch(f"lengths differ: {len(scores_a)} != {len(scores_b)}")
    if not scores_a:
        raise LengthMismatch("score lists must be nonempty")
    return sum(abs(a - b) for a, b in zip(scores_a, scores_b)) / len(scores_a)
