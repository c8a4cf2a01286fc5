import pytest

from qtind.cli import main
from qtind.runfile import read_run


@pytest.fixture
def tiny_data(tmp_path):
    (tmp_path / "collection.tsv").write_text(
        "0\tred apple and green apple\n"
        "1\tbaking an apple pie\n"
        "2\tthe weather is sunny\n"
        "3\tsunny apple orchards\n"
    )
    (tmp_path / "queries.tsv").write_text("10\tapple pie\n11\tsunny weather\n")
    (tmp_path / "qrels.txt").write_text("10 0 1 1\n11 0 2 1\n")
    (tmp_path / "top4.tsv").write_text(
        "\n".join(
            f"{qid}\t{doc}\tquery text\tpassage text"
            for qid in (10, 11)
            for doc in (0, 1, 2, 3)
        )
        + "\n"
    )
    return tmp_path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestIndexAndSearch:
    def test_end_to_end(self, tiny_data, capsys):
        idx = tiny_data / "bm25.idx"
        run = tiny_data / "run.txt"
        assert run_cli(
            "index", "--collection", tiny_data / "collection.tsv",
            "--scorer", "bm25", "--df-cap", "1.0", "--out", idx,
        ) == 0
        assert run_cli(
            "search", "--index", idx, "--queries", tiny_data / "queries.tsv",
            "--k", "10", "--out", run,
        ) == 0
        results = read_run(run)
        assert results[10][0] == 1  # the apple-pie doc wins its query
        assert results[11][0] == 2

        out = tiny_data / "eval_out.txt"
        assert run_cli("eval", "--run", run, "--qrels", tiny_data / "qrels.txt",
                       "--metric", "mrr@10", "--per-query", out) == 0
        captured = capsys.readouterr().out
        assert "mrr@10 = 1.0000" in captured
        assert out.read_text().splitlines() == ["10\t1.000000", "11\t1.000000"]

    def test_pruned_output_identical(self, tiny_data):
        idx = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", idx)
        run_a, run_b = tiny_data / "a.txt", tiny_data / "b.txt"
        run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv",
                "--k", "4", "--out", run_a, "--tag", "x")
        run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv",
                "--k", "4", "--out", run_b, "--tag", "x", "--pruned")
        assert run_a.read_text() == run_b.read_text()

    def test_threads_do_not_change_output(self, tiny_data, monkeypatch):
        idx = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", idx)
        run_a, run_b = tiny_data / "a.txt", tiny_data / "b.txt"
        run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv",
                "--out", run_a, "--tag", "x")
        monkeypatch.setenv("QTIND_THREADS", "4")
        run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv",
                "--out", run_b, "--tag", "x")
        assert run_a.read_text() == run_b.read_text()

    def test_quantized_index_loads(self, tiny_data):
        idx = tiny_data / "q.idx"
        assert run_cli("index", "--collection", tiny_data / "collection.tsv",
                       "--df-cap", "1.0", "--quantize", "--out", idx) == 0
        run = tiny_data / "run.txt"
        assert run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv",
                       "--out", run) == 0


class TestImportScoresAndRerank:
    def test_import_and_rerank(self, tiny_data):
        table = tiny_data / "scores.tsv"
        table.write_text("apple\t1\t2.5\napple\t0\t1.5\nsunny\t2\t-4.0\nsunny\t3\t0.5\n")
        idx = tiny_data / "table.idx"
        assert run_cli("import-scores", "--collection", tiny_data / "collection.tsv",
                       "--table", table, "--df-cap", "1.0", "--out", idx) == 0
        run = tiny_data / "rerank.txt"
        assert run_cli("rerank", "--index", idx, "--candidates", tiny_data / "top4.tsv",
                       "--queries", tiny_data / "queries.tsv", "--out", run) == 0
        results = read_run(run)
        # apple: doc 1 (2.5) above doc 0 (1.5); zero scorers follow by doc id
        assert results[10] == [1, 0, 2, 3]
        # negative score for doc 2 clamps away; doc 3 leads, rest by doc id
        assert results[11] == [3, 0, 1, 2]

    def test_rerank_directly_from_table(self, tiny_data):
        table = tiny_data / "scores.tsv"
        table.write_text("apple\t1\t2.5\napple\t0\t1.5\n")
        run = tiny_data / "rerank.txt"
        assert run_cli("rerank", "--table", table, "--candidates", tiny_data / "top4.tsv",
                       "--queries", tiny_data / "queries.tsv", "--out", run) == 0
        assert read_run(run)[10] == [1, 0, 2, 3]

    def test_rerank_requires_one_source(self, tiny_data):
        assert run_cli("rerank", "--candidates", tiny_data / "top4.tsv",
                       "--queries", tiny_data / "queries.tsv", "--out", tiny_data / "x") == 1


class TestTelescope:
    def test_two_stage(self, tiny_data, capsys):
        bm25 = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", bm25)
        table = tiny_data / "scores.tsv"
        table.write_text("apple\t0\t9.0\napple\t1\t1.0\nsunny\t2\t1.0\nsunny\t3\t2.0\n")
        tidx = tiny_data / "table.idx"
        run_cli("import-scores", "--collection", tiny_data / "collection.tsv",
                "--table", table, "--df-cap", "1.0", "--out", tidx)
        out = tiny_data / "final.txt"
        assert run_cli("telescope", "--stage1-index", bm25, "--stage2-index", tidx,
                       "--queries", tiny_data / "queries.tsv", "--qrels", tiny_data / "qrels.txt",
                       "--k1", "3", "--out", out) == 0
        assert "stage1 recall@3" in capsys.readouterr().out
        results = read_run(out)
        # stage 2 promotes doc 0 for the apple query
        assert results[10][0] == 0

    def test_stage2_omitted_equals_stage1(self, tiny_data):
        bm25 = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", bm25)
        direct, tele = tiny_data / "direct.txt", tiny_data / "tele.txt"
        run_cli("search", "--index", bm25, "--queries", tiny_data / "queries.tsv",
                "--k", "3", "--out", direct, "--tag", "t")
        assert run_cli("telescope", "--stage1-index", bm25, "--queries", tiny_data / "queries.tsv",
                       "--k1", "3", "--out", tele, "--tag", "t") == 0
        assert direct.read_text() == tele.read_text()

    def test_small_k1_misses_relevant(self, tiny_data, capsys):
        bm25 = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", bm25)
        # Doc 0 ranks second for the apple query; judging it relevant makes
        # the stage-1 cut at k1=1 a certain miss.
        miss_qrels = tiny_data / "qrels_miss.txt"
        miss_qrels.write_text("10 0 0 1\n")
        assert run_cli("telescope", "--stage1-index", bm25, "--queries", tiny_data / "queries.tsv",
                       "--qrels", miss_qrels, "--k1", "1",
                       "--out", tiny_data / "o.txt") == 0
        line = [l for l in capsys.readouterr().out.splitlines() if "recall" in l][0]
        assert "0.0000" in line


class TestCompare:
    def test_compare_runs(self, tiny_data, capsys):
        idx = tiny_data / "bm25.idx"
        run_cli("index", "--collection", tiny_data / "collection.tsv", "--df-cap", "1.0", "--out", idx)
        run = tiny_data / "run.txt"
        run_cli("search", "--index", idx, "--queries", tiny_data / "queries.tsv", "--out", run)
        assert run_cli("compare", "--run-a", run, "--run-b", run,
                       "--qrels", tiny_data / "qrels.txt") == 0
        out = capsys.readouterr().out
        assert "p = 1.0000" in out


class TestExitCodes:
    def test_usage_error(self):
        assert run_cli("search", "--index") == 1

    def test_unknown_metric_is_usage_error(self, tiny_data):
        run = tiny_data / "run.txt"
        run.write_text("10 Q0 0 1 1.0 t\n")
        assert run_cli("eval", "--run", run, "--qrels", tiny_data / "qrels.txt",
                       "--metric", "ndcg@10") == 1

    def test_data_error_for_missing_file(self, tiny_data):
        assert run_cli("index", "--collection", tiny_data / "nope.tsv",
                       "--out", tiny_data / "x.idx") == 2

    def test_data_error_for_bad_collection(self, tiny_data):
        bad = tiny_data / "bad.tsv"
        bad.write_text("notanint\ttext\n")
        assert run_cli("index", "--collection", bad, "--out", tiny_data / "x.idx") == 2

    def test_data_error_for_corrupt_index(self, tiny_data):
        bogus = tiny_data / "bogus.idx"
        bogus.write_bytes(b"JUNKJUNKJUNKJUNKJUNK")
        assert run_cli("search", "--index", bogus, "--queries", tiny_data / "queries.tsv",
                       "--out", tiny_data / "r.txt") == 2


class TestSelfcheck:
    def test_default_run_passes(self, capsys):
        assert run_cli("selfcheck", "--docs", "150", "--queries", "15") == 0
        out = capsys.readouterr().out
        assert "checks passed" in out
        assert "FAIL" not in out

    def test_fault_injection_fails_ordering(self, capsys):
        assert run_cli("selfcheck", "--docs", "120", "--queries", "10",
                       "--inject-fault", "posting-order") == 3
        out = capsys.readouterr().out
        assert "impact ordering violated" in out

    def test_seed_from_environment(self, monkeypatch, capsys):
        monkeypatch.setenv("QTIND_SEED", "7")
        assert run_cli("selfcheck", "--docs", "120", "--queries", "10") == 0
        assert "seed=7" in capsys.readouterr().out
