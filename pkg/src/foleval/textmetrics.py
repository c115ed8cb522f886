"""Sentence-level n-gram and alignment metrics over FOL token sequences.

BLEU is the geometric mean of clipped n-gram precisions times a brevity
penalty; ROUGE is the LCS-based F-measure; METEOR aligns unigrams exactly
(no stemming or synonyms, FOL tokens are not words) and applies a
fragmentation penalty.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass

TokenSeq = list[str]

ROUGE_VARIANT = "lcs-f1"


class EmptySequence(ValueError):
    pass


@dataclass(frozen=True)
class TextMetricConfig:
    bleu_max_n: int = 4
    bleu_smoothing_k: float = 1.0
    meteor_alpha: float = 0.9
    meteor_beta: float = 3.0
    meteor_gamma: float = 0.5
    split_camel_case: bool = False

    def __post_init__(self):
        if self.bleu_max_n < 1:
            raise ValueError("bleu_max_n must be >= 1")
        if not 0.0 < self.meteor_alpha < 1.0:
            raise ValueError("meteor_alpha must be in (0, 1)")
        if self.bleu_smoothing_k < 0.0:
            raise ValueError("bleu_smoothing_k must be >= 0")


DEFAULT_TEXT_CONFIG = TextMetricConfig()

_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+|\d+")


def split_camel_case(token: str) -> list[str]:
    parts = _CAMEL_RE.findall(token)
    return parts if parts else [token]


def apply_token_config(tokens: TokenSeq, cfg: TextMetricConfig) -> TokenSeq:
    if not cfg.split_camel_case:
        return list(tokens)
    out: list[str] = []
    for tok in tokens:
        if tok and tok[0].isalpha():
            out.extend(split_camel_case(tok))
        else:
            out.append(tok)
    return out


def _require_nonempty(reference: TokenSeq, candidate: TokenSeq) -> None:
    if not reference or not candidate:
        raise EmptySequence("reference and candidate must be nonempty")


def _ngrams(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(reference: TokenSeq, candidate: TokenSeq,
         cfg: TextMetricConfig = DEFAULT_TEXT_CONFIG) -> float:
    """Sentence BLEU with add-k smoothed higher-order precisions.

    Unigram precision is raw, falling back to the add-k value only when it
    would otherwise be zero, so disjoint pairs score small but nonzero.
    """
    _require_nonempty(reference, candidate)
    k = cfg.bleu_smoothing_k
    log_sum = 0.0
    for n in range(1, cfg.bleu_max_n + 1):
        cand_counts = _ngrams(candidate, n)
        ref_counts = _ngrams(reference, n)
        total = sum(cand_counts.values())
        clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        if n == 1:
            p = clipped / total if clipped > 0 else k / (total + k) if k > 0 else 0.0
        else:
            p = (clipped + k) / (total + k) if (total + k) > 0 else 0.0
        if p <= 0.0:
            return 0.0
        log_sum += math.log(p)
    geo_mean = math.exp(log_sum / cfg.bleu_max_n)
    bp = min(1.0, math.exp(1.0 - len(reference) / len(candidate)))
    return bp * geo_mean


def lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    """Longest common subsequence length, O(len(a) * len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge(reference: TokenSeq, candidate: TokenSeq,
          cfg: TextMetricConfig = DEFAULT_TEXT_CONFIG) -> float:
    """LCS-based F-measure with equal precision/recall weighting."""
    _require_nonempty(reference, candidate)
    lcs = lcs_length(reference, candidate)
    if lcs == 0:
        return 0.0
    p = lcs / len(candidate)
    r = lcs / len(reference)
    return 2.0 * p * r / (p + r)


# ---------------------------------------------------------------------------
# METEOR
# ---------------------------------------------------------------------------

_EXACT_SEARCH_BUDGET = 200_000
_BEAM_WIDTH = 64


def _max_matches(reference: TokenSeq, candidate: TokenSeq) -> int:
    ref_counts = Counter(reference)
    cand_counts = Counter(candidate)
    return sum(min(c, ref_counts[t]) for t, c in cand_counts.items())


def _min_chunks(reference: TokenSeq, candidate: TokenSeq, matches: int) -> int:
    """Fewest chunks over maximum-match exact alignments.

    Exhaustive depth-first search with pruning when the branch budget allows,
    otherwise a deterministic beam search; both walk candidate positions left
    to right.  Chunk minimization over all maximum alignments is hard in
    general, so long repetitive inputs get the (deterministic) beam answer.
    """
    ref_positions: dict[str, list[int]] = defaultdict(list)
    for j, tok in enumerate(reference):
        ref_positions[tok].append(j)
    cand_counts = Counter(candidate)
    quota = {t: min(len(ref_positions[t]), c) for t, c in cand_counts.items()}

    # Candidate occurrences of each token strictly after position i, used to
    # decide whether skipping an occurrence still lets the quota be met.
    remaining: list[Counter] = [Counter() for _ in range(len(candidate) + 1)]
    for i in range(len(candidate) - 1, -1, -1):
        remaining[i] = remaining[i + 1].copy()
        remaining[i][candidate[i]] += 1

    branch_budget = 1.0
    for t, c in cand_counts.items():
        options = len(ref_positions[t])
        if options > 1:
            branch_budget *= float(options) ** min(c, options)
        if branch_budget > _EXACT_SEARCH_BUDGET:
            return _min_chunks_beam(candidate, ref_positions, quota, remaining)
    return _min_chunks_exact(candidate, ref_positions, quota, remaining, matches)


def _min_chunks_exact(candidate, ref_positions, quota, remaining, matches) -> int:
    best = matches + 1  # any alignment has at most one chunk per match
    n = len(candidate)
    need = dict(quota)
    used: set[int] = set()

    def dfs(i: int, last_cand: int, last_ref: int, chunks: int) -> None:
        nonlocal best
        if chunks >= best:
            return
        if i == n:
            best = chunks  # skip rule guarantees all quotas are met here
            return
        tok = candidate[i]
        needed = need.get(tok, 0)
        if needed > 0:
            for j in ref_positions[tok]:
                if j in used:
                    continue
                inc = 0 if (i == last_cand + 1 and j == last_ref + 1) else 1
                used.add(j)
                need[tok] = needed - 1
                dfs(i + 1, i, j, chunks + inc)
                need[tok] = needed
                used.discard(j)
        if remaining[i + 1][tok] >= needed:
            dfs(i + 1, last_cand, last_ref, chunks)

    dfs(0, -2, -2, 0)
    return best


def _min_chunks_beam(candidate, ref_positions, quota, remaining) -> int:
    # State: key (adjacent: bool, last_ref, used) -> fewest chunks so far.
    n = len(candidate)
    states: dict[tuple[bool, int, frozenset], int] = {(False, -2, frozenset()): 0}
    for i in range(n):
        tok = candidate[i]
        slots = ref_positions[tok]
        refset = set(slots)
        nxt: dict[tuple[bool, int, frozenset], int] = {}

        def consider(key, chunks):
            old = nxt.get(key)
            if old is None or chunks < old:
                nxt[key] = chunks

        for (adjacent, last_ref, used), chunks in states.items():
            needed = quota.get(tok, 0) - len(used & refset)
            if remaining[i + 1][tok] >= needed:
                consider((False, last_ref, used), chunks)
            if needed > 0:
                for j in slots:
                    if j in used:
                        continue
                    inc = 0 if (adjacent and j == last_ref + 1) else 1
                    consider((True, j, used | {j}), chunks + inc)
        ranked = sorted(nxt.items(), key=lambda kv: (kv[1], kv[0][1], sorted(kv[0][2])))
        states = dict(ranked[:_BEAM_WIDTH])
    return min(states.values()) if states else sum(quota.values())


def meteor(reference: TokenSeq, candidate: TokenSeq,
           cfg: TextMetricConfig = DEFAULT_TEXT_CONFIG) -> float:
    """Exact-match METEOR: F_alpha mean discounted by a fragmentation penalty."""
    _require_nonempty(reference, candidate)
    matches = _max_matches(reference, candidate)
    if matches == 0:
        return 0.0
    p = matches / len(candidate)
    r = matches / len(reference)
    f_mean = p * r / (cfg.meteor_alpha * p + (1.0 - cfg.meteor_alpha) * r)
    chunks = _min_chunks(reference, candidate, matches)
    penalty = cfg.meteor_gamma * (chunks / matches) ** cfg.meteor_beta
    return f_mean * (1.0 - penalty)
