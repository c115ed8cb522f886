import pytest

from foleval.corpus import EmptyCorpus, Record
from foleval.scoring import (
    MetricEngine, MismatchedPair, ScoreRecord, ScoringConfig,
    canonical_metric, combine, combine_all, combined_metric_id, score_corpus,
    self_match_constant,
)

ALL_METRICS = ["bleu", "rouge", "meteor", "le", "bertscore", "smatchpp"]


def make_record(rid="r1", gold="∀x (Eel(x) → Fish(x))", samples=()):
    return Record(rid, "", gold, tuple(samples))


class TestMetricNames:
    def test_short_aliases(self):
        assert canonical_metric("BL") == "bleu"
        assert canonical_metric("sp") == "smatchpp"
        assert canonical_metric("bertscore") == "bertscore"

    def test_unknown(self):
        with pytest.raises(ValueError):
            canonical_metric("glue")

    def test_combined_id_alphabetical(self):
        assert combined_metric_id("le", "bs") == "bertscore-le"
        assert combined_metric_id("bl", "sp") == "bleu-smatchpp"


class TestSelfMatch:
    def test_bleu_rouge_le_exactly_one(self, fixture_records):
        corpus = [make_record(r["id"], r["gold"]) for r in fixture_records[:10]]
        for metric in ("bleu", "rouge", "le", "smatchpp", "bertscore"):
            assert self_match_constant(metric, corpus) == 1.0

    def test_meteor_mean_of_closed_forms(self):
        from foleval.syntax import tokenize
        corpus = [make_record("a", "P ∧ Q"), make_record("b", "∀x (P(x) → Q(x))")]
        expected = 0.0
        for rec in corpus:
            n = len(tokenize(rec.gold))
            expected += 1.0 - 0.5 * (1.0 / n) ** 3.0
        expected /= 2
        assert self_match_constant("meteor", corpus) == pytest.approx(expected)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            self_match_constant("bleu", [])


class TestScoreCorpus:
    def test_shape_and_order(self):
        corpus = [
            make_record("r2", samples=["∀x (Eel(x) → Fish(x))", "P"]),
            make_record("r1", samples=["∀x (IsEel(x) → IsFish(x))"]),
        ]
        scores = score_corpus(corpus, ["bleu", "le"])
        assert len(scores) == 3 * 2
        keys = [(s.record_id, s.metric, s.sample_index) for s in scores]
        assert keys == sorted(keys)

    def test_record_count_arithmetic(self):
        corpus = [make_record(f"r{i}", samples=["P ∧ Q", "P ∨ Q", "P"])
                  for i in range(4)]
        scores = score_corpus(corpus, ALL_METRICS)
        assert len(scores) == 4 * 3 * 6

    def test_identical_sample_normalizes_to_one(self):
        gold = "∀x (¬WantToBeAddictedTo(x, caffeine) → AwareThatDrug(x, caffeine))"
        corpus = [make_record("r1", gold, samples=[gold])]
        scores = score_corpus(corpus, ALL_METRICS)
        assert all(s.normalized == 1.0 for s in scores)

    def test_empty_metric_list(self):
        with pytest.raises(ValueError):
            score_corpus([make_record()], [])

    def test_syntax_gate_le_only(self):
        corpus = [make_record("r1", samples=["∀x (Eel(x", "∀x (Eel(y))"])]
        scores = {(s.metric, s.sample_index): s
                  for s in score_corpus(corpus, ["le", "bleu"])}
        # unparseable candidate: LE gated to 0, BLEU still scores the tokens
        assert scores[("le", 0)].raw == 0.0
        assert "syntax-invalid" in scores[("le", 0)].flags
        assert scores[("bleu", 0)].raw > 0.0
        # unused quantified variable: LE-invalid but parseable
        assert scores[("le", 1)].raw == 0.0
        assert scores[("bleu", 1)].raw > 0.0

    def test_smatch_gated_on_parse(self):
        corpus = [make_record("r1", samples=["∀x (Eel(x"])]
        (score,) = score_corpus(corpus, ["smatchpp"])
        assert score.raw == 0.0
        assert "parse-error" in score.flags

    def test_worker_counts_equivalent(self, fixture_records):
        corpus = [make_record(r["id"], r["gold"], samples=[r["gold"], "P ∧ Q"])
                  for r in fixture_records[:8]]
        one = score_corpus(corpus, ALL_METRICS, ScoringConfig(workers=1))
        four = score_corpus(corpus, ALL_METRICS, ScoringConfig(workers=4))
        assert one == four

    def test_argmax_invariant_under_normalization(self):
        corpus = [make_record("r1", "P ∧ Q",
                              samples=["P ∧ Q", "P ∨ Q", "R ∨ S"])]
        scores = score_corpus(corpus, ["bleu"])
        raw_order = sorted(range(3), key=lambda i: -scores[i].raw)
        norm_order = sorted(range(3), key=lambda i: -scores[i].normalized)
        assert raw_order == norm_order


class TestCombine:
    def test_arithmetic_mean(self):
        a = ScoreRecord("r1", "le", 0, 0.4, 0.4)
        b = ScoreRecord("r1", "bertscore", 0, 0.8, 0.8)
        combined = combine(a, b)
        assert combined.normalized == pytest.approx(0.6)
        assert combined.metric == "bertscore-le"

    def test_idempotent_on_equal_scores(self):
        a = ScoreRecord("r1", "bleu", 1, 0.7, 0.7)
        b = ScoreRecord("r1", "smatchpp", 1, 0.7, 0.7)
        assert combine(a, b).normalized == pytest.approx(0.7)

    def test_symmetry(self):
        a = ScoreRecord("r1", "le", 0, 0.2, 0.2)
        b = ScoreRecord("r1", "bertscore", 0, 0.9, 0.9)
        ab, ba = combine(a, b), combine(b, a)
        assert ab.normalized == ba.normalized
        assert ab.metric == ba.metric

    def test_mismatched_pair(self):
        a = ScoreRecord("r1", "le", 0, 0.2, 0.2)
        b = ScoreRecord("r2", "bertscore", 0, 0.9, 0.9)
        with pytest.raises(MismatchedPair):
            combine(a, b)

    def test_combine_all(self):
        corpus = [make_record("r1", "P ∧ Q", samples=["P ∧ Q", "P ∨ Q"])]
        scores = score_corpus(corpus, ["le", "bertscore"])
        combos = combine_all(scores, [("le", "bs")])
        assert len(combos) == 2
        assert all(c.metric == "bertscore-le" for c in combos)
