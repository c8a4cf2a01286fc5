"""Self-contained end-to-end check over a generated corpus.

Builds BM25 and score-table indexes on synthetic data, runs retrieval,
re-ranking, and evaluation, and asserts the structural invariants of
every stage.  A fault can be injected to prove the checks can fail.
"""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .corpus import CandidateSet, Collection, Document, Query
from .evaluation import mrr_at_k, recall_at_k
from .index import BuildConstraints, ImpactIndex, build_index, index_from_table, read_index, write_index
from .query_eval import RankedList, aggregate_score, rerank, retrieve_topk, retrieve_topk_pruned
from .scoring import Bm25Scorer
from .synth import synthetic_score_table, synthetic_workload

__all__ = ["CheckResult", "run_end_to_end_check"]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def brute_force_topk(query: Query, index: ImpactIndex, k: int) -> RankedList:
    """Reference top-k: score every document, sort, drop zeros, truncate."""
    scored = [
        (doc_id, aggregate_score(query, doc_id, index))
        for doc_id in range(index.doc_count)
    ]
    scored = [(d, s) for d, s in scored if s > 0.0]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return RankedList(query.query_id, scored[:k], k)


def _same_ranking(got: RankedList, want: RankedList, rel_tol: float = 1e-9) -> None:
    assert got.doc_ids() == want.doc_ids(), (
        f"query {want.query_id}: doc ids differ: {got.doc_ids()[:5]}... vs {want.doc_ids()[:5]}..."
    )
    for (_, s_got), (_, s_want) in zip(got.entries, want.entries):
        assert math.isclose(s_got, s_want, rel_tol=rel_tol), (
            f"query {want.query_id}: score {s_got} != {s_want}"
        )


def run_end_to_end_check(
    n_docs: int = 500,
    n_queries: int = 50,
    k: int = 10,
    seed: int = 0,
    inject_fault: str | None = None,
) -> list[CheckResult]:
    data = synthetic_workload(n_docs, n_queries, seed)
    collection, queries, qrels = data.collection, data.queries, data.qrels

    bm25_index = build_index(collection, Bm25Scorer(collection), BuildConstraints(df_cap_fraction=1.0))
    table = synthetic_score_table(collection, seed)
    table_index = index_from_table(collection, table, BuildConstraints(df_cap_fraction=1.0))

    if inject_fault == "posting-order":
        # Corrupt the first list with two distinct impacts, bypassing builders.
        for pl in bm25_index.lists.values():
            if len(pl) >= 2 and pl.postings[0].impact > pl.postings[-1].impact:
                pl.postings[0], pl.postings[-1] = pl.postings[-1], pl.postings[0]
                break
    elif inject_fault is not None:
        raise ValueError(f"unknown fault {inject_fault!r}")

    checks: list[tuple[str, Callable[[], None]]] = []

    def check(name: str):
        def register(fn):
            checks.append((name, fn))
            return fn
        return register

    @check("collection statistics")
    def _stats() -> None:
        mean = sum(len(d) for d in collection) / collection.doc_count
        assert math.isclose(collection.avg_doc_len, mean, rel_tol=1e-15)

    @check("posting list invariants (bm25 index)")
    def _inv_bm25() -> None:
        bm25_index.validate()

    @check("posting list invariants (table index)")
    def _inv_table() -> None:
        table_index.validate()

    @check("oracle equivalence of top-k retrieval")
    def _oracle() -> None:
        for index in (bm25_index, table_index):
            for query in queries:
                _same_ranking(retrieve_topk(query, index, k), brute_force_topk(query, index, k))

    @check("pruned retrieval equals exhaustive retrieval")
    def _pruned() -> None:
        for index in (bm25_index, table_index):
            for query in queries:
                full = retrieve_topk(query, index, k)
                pruned = retrieve_topk_pruned(query, index, k)
                assert pruned.entries == full.entries, f"query {query.query_id}: pruned mismatch"
                assert pruned.postings_scanned <= full.postings_scanned

    @check("score aggregation is additive over query multisets")
    def _additive() -> None:
        for query in queries[:10]:
            doc_id = retrieve_topk(query, bm25_index, 1).entries[0][0]
            doubled = Query(query.query_id, query.terms + query.terms)
            s1 = aggregate_score(query, doc_id, bm25_index)
            s2 = aggregate_score(doubled, doc_id, bm25_index)
            assert math.isclose(s2, 2.0 * s1, rel_tol=1e-12), "duplicate terms must double the score"
            assert aggregate_score(Query(0, ("zz_unseen_term",)), doc_id, bm25_index) == 0.0

    @check("df cap boundary (drop iff df > ceil(fraction * N))")
    def _cap() -> None:
        docs = [Document(0, ("kept", "dropped")), Document(1, ("kept", "dropped"))] + [
            Document(i, ("kept",)) for i in range(2, 10)
        ]
        mini = Collection(docs)
        idx = build_index(mini, lambda t, d, tf: 1.0, BuildConstraints(df_cap_fraction=0.1))
        # cap = ceil(0.1 * 10) = 1: df("dropped") = 2 > 1 dropped, df("kept") = 10 > 1 dropped
        assert "dropped" not in idx and "kept" not in idx
        idx = build_index(mini, lambda t, d, tf: 1.0, BuildConstraints(df_cap_fraction=0.2))
        # cap = 2: df("dropped") = 2 retained exactly at the boundary
        assert "dropped" in idx and "kept" not in idx

    @check("require-term-in-doc filtering of table entries")
    def _require() -> None:
        mini = Collection([Document(0, ("a",))])
        from .scoring import ScoreTable

        stray = ScoreTable([("b", 0, 1.0), ("a", 0, 1.0)])
        idx = index_from_table(mini, stray, BuildConstraints())
        assert idx.table_entries_discarded == 1
        assert "b" not in idx and "a" in idx

    @check("index round-trip (exact and quantized)")
    def _roundtrip() -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "idx.bin"
            write_index(bm25_index, path)
            loaded = read_index(path)
            assert loaded.doc_count == bm25_index.doc_count
            assert set(loaded.terms()) == set(bm25_index.terms())
            for term, pl in bm25_index.lists.items():
                assert loaded.lists[term].postings == pl.postings
            write_index(bm25_index, path, quantize=True)
            quantized = read_index(path)
            quantized.validate()
            for term, pl in bm25_index.lists.items():
                step = pl.max_impact / 65535.0
                got = {p.doc_id: p.impact for p in quantized.lists[term]}
                for p in pl.postings:
                    assert abs(got[p.doc_id] - p.impact) <= step

    @check("rerank returns a total order over candidates")
    def _rerank() -> None:
        candidate_ids = tuple(range(0, min(50, n_docs)))
        for query in queries[:10]:
            ranked = rerank(query, CandidateSet(query.query_id, candidate_ids), bm25_index)
            assert sorted(ranked.doc_ids()) == sorted(candidate_ids), "rerank must keep all candidates"
            zeros = [d for d, s in ranked.entries if s == 0.0]
            assert zeros == sorted(zeros), "zero scorers must be ordered by doc_id"
            scores = [s for _, s in ranked.entries]
            assert scores == sorted(scores, reverse=True)

    @check("metrics over the BM25 run")
    def _metrics() -> None:
        run = {q.query_id: retrieve_topk(q, bm25_index, 1000) for q in queries}
        mrr = mrr_at_k(run, qrels, 10)
        recall = recall_at_k(run, qrels, 1000)
        assert 0.0 <= mrr.mean <= 1.0 and 0.0 <= recall.mean <= 1.0
        assert mrr.mean > 0.0, "planted topic markers should be retrievable by BM25"

    results = []
    for name, fn in checks:
        try:
            fn()
        except AssertionError as exc:
            results.append(CheckResult(name, False, str(exc)))
        except Exception as exc:  # check harness must never crash silently
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append(CheckResult(name, True))
    return results
