import json
from pathlib import Path

import pytest

from foleval.cli import main

from conftest import DATA_DIR

FIXTURE = str(DATA_DIR / "fixture50.jsonl")


def read_jsonl(path):
    with Path(path).open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_jsonl(path, objects):
    with Path(path).open("w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


@pytest.fixture()
def small_corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_jsonl(path, [
        {"id": "r1", "nl": "", "gold": "∀x (Eel(x) → Fish(x))",
         "samples": ["∀x (Eel(x) → Fish(x))", "∀x (E(x) → F(x))",
                      "∃x (Eel(x) → Fish(x))"]},
        {"id": "r2", "nl": "", "gold": "P ∧ Q",
         "samples": ["P ∧ Q", "P ∨ Q", "¬P ∧ Q"]},
    ])
    return str(path)


class TestPerturbCommand:
    def test_writes_per_kind_files_with_equal_line_counts(self, tmp_path):
        out = tmp_path / "pert"
        code = main(["perturb", "--in", FIXTURE, "--format", "flat-fol",
                     "--kinds", "op-quantifier,op-negation", "--out", str(out)])
        assert code == 0
        for kind in ("op-quantifier", "op-negation"):
            lines = read_jsonl(out / f"perturbed_{kind}.jsonl")
            assert len(lines) == 50
        applic = {row["kind"]: row["percent"]
                  for row in read_jsonl(out / "applicability.jsonl")}
        assert applic["op-negation"] == 100.0
        assert 0 < applic["op-quantifier"] < 100.0

    def test_andor_zero_on_implication_corpus(self, tmp_path):
        corpus = tmp_path / "impl.jsonl"
        write_jsonl(corpus, [{"id": "a", "gold": "∀x (P(x) → Q(x))"},
                             {"id": "b", "gold": "P → Q"}])
        out = tmp_path / "pert"
        code = main(["perturb", "--in", str(corpus), "--format", "flat-fol",
                     "--kinds", "op-andor", "--out", str(out)])
        assert code == 0
        applic = read_jsonl(out / "applicability.jsonl")
        assert applic[0]["percent"] == 0.0

    def test_bad_kind_is_usage_error(self, tmp_path):
        code = main(["perturb", "--in", FIXTURE, "--format", "flat-fol",
                     "--kinds", "op-bogus", "--out", str(tmp_path / "x")])
        assert code == 2

    def test_missing_file_is_runtime_error(self, tmp_path):
        code = main(["perturb", "--in", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "x")])
        assert code == 1


class TestScoreCommand:
    def test_self_scoring_all_ones(self, tmp_path):
        corpus = tmp_path / "self.jsonl"
        write_jsonl(corpus, [
            {"id": "r1", "nl": "", "gold": "∀x (Eel(x) → Fish(x))",
             "samples": ["∀x (Eel(x) → Fish(x))"]},
        ])
        out = tmp_path / "scores"
        code = main(["score", "--in", str(corpus), "--metrics", "all",
                     "--out", str(out)])
        assert code == 0
        scores = read_jsonl(out / "scores_self.jsonl")
        assert len(scores) == 6
        assert all(s["normalized"] == 1.0 for s in scores)

    def test_combined_metrics_emitted(self, small_corpus, tmp_path):
        out = tmp_path / "scores"
        code = main(["score", "--in", small_corpus,
                     "--metrics", "bleu,le,bertscore,smatchpp",
                     "--combine", "le+bs,bl+sp", "--out", str(out)])
        assert code == 0
        scores = read_jsonl(out / "scores_corpus.jsonl")
        metrics = {s["metric"] for s in scores}
        assert "bertscore-le" in metrics
        assert "bleu-smatchpp" in metrics
        table = (out / "means.txt").read_text(encoding="utf-8")
        assert "BL" in table and "corpus" in table

    def test_remote_provider_down_exits_one(self, small_corpus, tmp_path):
        code = main(["score", "--in", small_corpus, "--metrics", "bertscore",
                     "--provider", "remote", "--endpoint", "http://127.0.0.1:1",
                     "--out", str(tmp_path / "x")])
        assert code == 1

    def test_remote_without_endpoint_usage_error(self, small_corpus, tmp_path):
        code = main(["score", "--in", small_corpus, "--provider", "remote",
                     "--out", str(tmp_path / "x")])
        assert code == 2

    def test_idempotent_outputs(self, small_corpus, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(["score", "--in", small_corpus, "--metrics",
                         "bleu,rouge,meteor,le,bertscore,smatchpp",
                         "--out", str(out)]) == 0
        a = (out1 / "scores_corpus.jsonl").read_bytes()
        b = (out2 / "scores_corpus.jsonl").read_bytes()
        assert a == b

    def test_workers_do_not_change_output(self, small_corpus, tmp_path):
        outs = []
        for n, workers in (("w1", "1"), ("w4", "4")):
            out = tmp_path / n
            assert main(["score", "--in", small_corpus, "--metrics", "all",
                         "--workers", workers, "--out", str(out)]) == 0
            outs.append((out / "scores_corpus.jsonl").read_bytes())
        assert outs[0] == outs[1]


class TestRankAlignCommands:
    def test_rank_tie_fixture(self, tmp_path):
        scores = tmp_path / "scores.jsonl"
        write_jsonl(scores, [
            {"record_id": "r1", "metric": "bleu", "sample_index": 0,
             "raw": 0.9, "normalized": 0.9, "flags": []},
            {"record_id": "r1", "metric": "bleu", "sample_index": 1,
             "raw": 0.9, "normalized": 0.9, "flags": []},
            {"record_id": "r1", "metric": "bleu", "sample_index": 2,
             "raw": 0.2, "normalized": 0.2, "flags": []},
        ])
        out = tmp_path / "ranks"
        assert main(["rank", "--scores", str(scores), "--out", str(out)]) == 0
        vectors = read_jsonl(out / "ranks_bleu.jsonl")
        assert vectors == [{"record_id": "r1", "ranker": "bleu", "ranks": [1, 1, 3]}]

    def test_align_report_shape(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_jsonl(a, [{"record_id": "r1", "ranker": "bleu", "ranks": [1, 2, 3]}])
        write_jsonl(b, [{"record_id": "r1", "ranker": "judge", "ranks": [3, 2, 1]}])
        out = tmp_path / "report.json"
        assert main(["align", "--a", str(a), "--b", str(b), "--out", str(out)]) == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert set(report) == {"ranker_a", "ranker_b", "rmse", "n_pairs",
                               "excluded", "pooling"}
        assert report["rmse"] == pytest.approx((8 / 3) ** 0.5)
        assert report["pooling"] == "pooled"

    def test_align_identical_zero(self, tmp_path):
        a = tmp_path / "a.jsonl"
        write_jsonl(a, [{"record_id": "r1", "ranker": "bleu", "ranks": [1, 2, 3]}])
        out = tmp_path / "report.json"
        assert main(["align", "--a", str(a), "--b", str(a), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["rmse"] == 0.0


class TestStatsCommand:
    def test_fixture_stats(self, tmp_path):
        out = tmp_path / "stats"
        code = main(["stats", "--in", FIXTURE, "--format", "flat-fol",
                     "--out", str(out)])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text(encoding="utf-8"))
        assert stats["records"] == 50
        assert stats["parse_failures"] == 0
        assert sum(stats["operator_histogram"].values()) == 50


class TestJudgeCommand:
    def test_offline_roundtrip(self, small_corpus, tmp_path):
        offline = tmp_path / "judge.jsonl"
        write_jsonl(offline, [
            {"record_id": "r1", "ranks": [1, 2, 3]},
            {"record_id": "r2", "ranks": [1, 1, 3]},
        ])
        out = tmp_path / "judged"
        code = main(["judge", "--in", small_corpus, "--offline", str(offline),
                     "--out", str(out)])
        assert code == 0
        vectors = read_jsonl(out / "ranks_judge.jsonl")
        assert vectors == [
            {"record_id": "r1", "ranker": "judge", "ranks": [1, 2, 3]},
            {"record_id": "r2", "ranker": "judge", "ranks": [1, 1, 3]},
        ]

    def test_offline_and_endpoint_mutually_exclusive(self, small_corpus, tmp_path):
        code = main(["judge", "--in", small_corpus, "--out", str(tmp_path / "x")])
        assert code == 2

    def test_missing_judged_records_reported(self, small_corpus, tmp_path):
        offline = tmp_path / "judge.jsonl"
        write_jsonl(offline, [{"record_id": "r1", "ranks": [1, 2, 3]}])
        out = tmp_path / "judged"
        assert main(["judge", "--in", small_corpus, "--offline", str(offline),
                     "--out", str(out)]) == 0
        report = json.loads((out / "judge_report.json").read_text())
        assert report["missing"] == ["r2"]


class TestPipeline:
    def test_perturb_score_rank_align_end_to_end(self, tmp_path):
        pert = tmp_path / "pert"
        assert main(["perturb", "--in", FIXTURE, "--format", "flat-fol",
                     "--kinds", "op-quantifier", "--out", str(pert)]) == 0
        scores = tmp_path / "scores"
        assert main(["score", "--in", str(pert / "perturbed_op-quantifier.jsonl"),
                     "--metrics", "bleu,rouge", "--out", str(scores)]) == 0
        ranks = tmp_path / "ranks"
        assert main(["rank", "--scores",
                     str(scores / "scores_perturbed_op-quantifier.jsonl"),
                     "--out", str(ranks)]) == 0
        report_path = tmp_path / "align.json"
        assert main(["align", "--a", str(ranks / "ranks_bleu.jsonl"),
                     "--b", str(ranks / "ranks_rouge.jsonl"),
                     "--out", str(report_path)]) == 0
        report = json.loads(report_path.read_text())
        assert report["n_pairs"] > 0
