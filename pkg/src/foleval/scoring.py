"""Corpus scoring: raw metric values, self-match normalization, combination.

Normalization divides each raw score by the metric's self-match value on the
same record's gold formula, clamped to [0, 1], so a sample identical to the
gold always normalizes to exactly 1.0.  ``self_match_constant`` additionally
reports the corpus-level mean self-match, the divisor's corpus summary.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import graphs, logic, semantic, textmetrics
from .corpus import EmptyCorpus, Record
from .logic import LEConfig, SyntaxInvalid
from .semantic import FallbackProvider
from .syntax import LexError, ParseError, parse_text, tokenize
from .textmetrics import TextMetricConfig

METRICS = ("bleu", "rouge", "meteor", "le", "bertscore", "smatchpp")

SHORT_NAMES = {
    "bleu": "BL", "rouge": "RO", "meteor": "ME",
    "le": "LE", "bertscore": "BS", "smatchpp": "SP",
}

_ALIASES = {
    "bl": "bleu", "ro": "rouge", "me": "meteor",
    "le": "le", "bs": "bertscore", "sp": "smatchpp",
}


class MismatchedPair(ValueError):
    pass


def canonical_metric(name: str) -> str:
    low = name.strip().lower()
    if low in METRICS:
        return low
    if low in _ALIASES:
        return _ALIASES[low]
    raise ValueError(f"unknown metric: {name!r}")


@dataclass(frozen=True)
class ScoreRecord:
    record_id: str
    metric: str
    sample_index: int
    raw: float
    normalized: float
    flags: tuple[str, ...] = ()


@dataclass
class ScoringConfig:
    text: TextMetricConfig = field(default_factory=TextMetricConfig)
    le: LEConfig = field(default_factory=LEConfig)
    smatch_restarts: int = 4
    seed: int = 17
    notation: str = "mixed"
    workers: int = 1


DEFAULT_SCORING_CONFIG = ScoringConfig()


class MetricEngine:
    """Caches parses, token lists, graphs, and embeddings per source text.

    Metrics that need a parse (le, smatchpp) score 0 with a flag when the
    candidate does not parse; le additionally requires every quantified
    variable to be used.  Text and embedding metrics only need the lexer.
    """

    def __init__(self, cfg: ScoringConfig = DEFAULT_SCORING_CONFIG, provider=None):
        self.cfg = cfg
        self.provider = provider if provider is not None else FallbackProvider()
        self._tokens: dict[str, list[str] | None] = {}
        self._formulas: dict[str, object] = {}
        self._graphs: dict[str, object] = {}
        self._embeddings: dict[str, object] = {}

    def tokens(self, text: str) -> list[str] | None:
        if text not in self._tokens:
            try:
                toks = [t.text for t in tokenize(text, self.cfg.notation)]
                self._tokens[text] = textmetrics.apply_token_config(toks, self.cfg.text) or None
            except LexError:
                self._tokens[text] = None
        return self._tokens[text]

    def formula(self, text: str):
        if text not in self._formulas:
            try:
                self._formulas[text] = parse_text(text, self.cfg.notation)
            except (ParseError, LexError, ValueError):
                self._formulas[text] = None
        return self._formulas[text]

    def graph(self, text: str):
        if text not in self._graphs:
            f = self.formula(text)
            self._graphs[text] = graphs.fol_to_triples(f) if f is not None else None
        return self._graphs[text]

    def embeddings(self, text: str):
        if text not in self._embeddings:
            toks = self.tokens(text)
            if toks is None:
                self._embeddings[text] = None
            else:
                self._embeddings[text] = semantic.embed(toks, self.provider)
        return self._embeddings[text]

    def prepare_embeddings(self, texts: list[str]) -> None:
        """Warm the embedding cache in provider-sized batches (one pass,
        deterministic order) so scoring itself makes no remote calls."""
        fresh = []
        seen = set()
        for text in texts:
            if text in self._embeddings or text in seen:
                continue
            if self.tokens(text) is not None:
                seen.add(text)
                fresh.append(text)
            else:
                self._embeddings[text] = None
        if not fresh:
            return
        embedded = semantic.embed_many([self.tokens(t) for t in fresh], self.provider)
        for text, emb in zip(fresh, embedded):
            self._embeddings[text] = emb

    # -- per-pair raw scores -------------------------------------------------

    def score_pair(self, metric: str, gold: str, cand: str) -> tuple[float, tuple[str, ...]]:
        metric = canonical_metric(metric)
        if metric in ("bleu", "rouge", "meteor", "bertscore"):
            return self._score_token_metric(metric, gold, cand)
        if metric == "le":
            return self._score_le(gold, cand)
        return self._score_smatch(gold, cand)

    def _score_token_metric(self, metric, gold, cand):
        gt = self.tokens(gold)
        ct = self.tokens(cand)
        if gt is None or ct is None:
            return 0.0, ("lex-error",)
        if metric == "bleu":
            return textmetrics.bleu(gt, ct, self.cfg.text), ()
        if metric == "rouge":
            return textmetrics.rouge(gt, ct, self.cfg.text), ()
        if metric == "meteor":
            return textmetrics.meteor(gt, ct, self.cfg.text), ()
        ge = self.embeddings(gold)
        ce = self.embeddings(cand)
        if ge is None or ce is None:
            return 0.0, ("lex-error",)
        return semantic.bertscore(ge, ce).score, ()

    def _score_le(self, gold, cand):
        gf = self.formula(gold)
        cf = self.formula(cand)
        try:
            if gf is not None:
                logic.check_formula(gf)
        except SyntaxInvalid:
            gf = None
        try:
            if cf is not None:
                logic.check_formula(cf)
        except SyntaxInvalid:
            cf = None
        if gf is None:
            return 0.0, ("gold-syntax-invalid",)
        if cf is None:
            return 0.0, ("syntax-invalid",)
        if gf == cf:
            return 1.0, ()
        return logic.le_score(gf, cf, self.cfg.le), ()

    def _score_smatch(self, gold, cand):
        gg = self.graph(gold)
        if gg is None:
            return 0.0, ("gold-parse-error",)
        cg = self.graph(cand)
        if cg is None:
            return 0.0, ("parse-error",)
        result = graphs.smatch_score(gg, cg, restarts=self.cfg.smatch_restarts,
                                     seed=self.cfg.seed)
        return result.f1, ()


def self_match_raw(engine: MetricEngine, metric: str, record: Record) -> float:
    raw, _flags = engine.score_pair(metric, record.gold, record.gold)
    return raw


def self_match_constant(metric: str, corpus: list[Record],
                        cfg: ScoringConfig = DEFAULT_SCORING_CONFIG,
                        provider=None, engine: MetricEngine | None = None) -> float:
    """Mean self-match raw score of ``metric`` over the corpus."""
    if not corpus:
        raise EmptyCorpus("self-match over an empty corpus")
    engine = engine or MetricEngine(cfg, provider)
    metric = canonical_metric(metric)
    return sum(self_match_raw(engine, metric, rec) for rec in corpus) / len(corpus)


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def score_corpus(corpus: list[Record], metrics: list[str],
                 cfg: ScoringConfig = DEFAULT_SCORING_CONFIG,
                 provider=None, engine: MetricEngine | None = None) -> list[ScoreRecord]:
    """One ScoreRecord per (record, metric, sample), sorted deterministically."""
    if not metrics:
        raise ValueError("metrics list must be nonempty")
    if not corpus:
        raise EmptyCorpus("scoring an empty corpus")
    metrics = [canonical_metric(m) for m in metrics]
    engine = engine or MetricEngine(cfg, provider)

    if "bertscore" in metrics:
        texts = [r.gold for r in corpus] + [s for r in corpus for s in r.samples]
        engine.prepare_embeddings(texts)

    def score_one(record: Record) -> list[ScoreRecord]:
        out = []
        for metric in metrics:
            divisor = self_match_raw(engine, metric, record)
            flags_extra: tuple[str, ...] = ()
            if divisor <= 0.0:
                divisor = 1.0
                flags_extra = ("self-match-degenerate",)
            for idx, sample in enumerate(record.samples):
                raw, flags = engine.score_pair(metric, record.gold, sample)
                out.append(ScoreRecord(record.id, metric, idx, raw,
                                       _clamp01(raw / divisor), flags + flags_extra))
        return out

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(score_one, corpus))
    else:
        chunks = [score_one(r) for r in corpus]

    scores = [s for chunk in chunks for s in chunk]
    scores.sort(key=lambda s: (s.record_id, s.metric, s.sample_index))
    return scores


def combined_metric_id(metric_a: str, metric_b: str) -> str:
    return "-".join(sorted((canonical_metric(metric_a), canonical_metric(metric_b))))


def combine(a: ScoreRecord, b: ScoreRecord, weight: float = 0.5) -> ScoreRecord:
    """Interpolate two normalized scores for the same (record, sample).

    ``weight`` applies to the alphabetically first metric so the operation
    stays symmetric in its arguments.
    """
    if (a.record_id, a.sample_index) != (b.record_id, b.sample_index):
        raise MismatchedPair(
            f"cannot combine {a.record_id}/{a.sample_index} with {b.record_id}/{b.sample_index}")
    first, second = sorted((a, b), key=lambda s: s.metric)
    value = weight * first.normalized + (1.0 - weight) * second.normalized
    return ScoreRecord(a.record_id, combined_metric_id(a.metric, b.metric),
                       a.sample_index, value, value,
                       tuple(sorted(set(a.flags) | set(b.flags))))


def combine_all(scores: list[ScoreRecord], pairs: list[tuple[str, str]],
                weight: float = 0.5) -> list[ScoreRecord]:
    by_key: dict[tuple[str, int, str], ScoreRecord] = {
        (s.record_id, s.sample_index, s.metric): s for s in scores
    }
    out: list[ScoreRecord] = []
    combos = {tuple(sorted((canonical_metric(a), canonical_metric(b)))) for a, b in pairs}
    keys = sorted({(s.record_id, s.sample_index) for s in scores})
    for ma, mb in sorted(combos):
        for record_id, idx in keys:
            sa = by_key.get((record_id, idx, ma))
            sb = by_key.get((record_id, idx, mb))
            if sa is not None and sb is not None:
                out.append(combine(sa, sb, weight))
    out.sort(key=lambda s: (s.record_id, s.metric, s.sample_index))
    return out
