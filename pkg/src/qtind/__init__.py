"""Query-term-independent retrieval: precomputed per-term impacts in an
impact-ordered inverted index, summed at query time.

Scores are computed entirely offline by pluggable scorers (analytic BM25
or externally learned score tables); answering a query is a sum of
lookups, so full-collection retrieval needs no model evaluation.
"""

from .corpus import (
    CandidateSet,
    Collection,
    Document,
    LoadError,
    Qrels,
    Query,
    load_candidates,
    load_collection,
    load_qrels,
    load_queries,
    tokenize,
    write_collection,
)
from .evaluation import EvalReport, mrr_at_k, paired_ttest, recall_at_k
from .index import (
    BuildConstraints,
    BuildError,
    ImpactIndex,
    IndexLoadError,
    Posting,
    PostingList,
    build_index,
    index_from_table,
    read_index,
    write_index,
)
from .query_eval import RankedList, aggregate_score, rerank, retrieve_topk, retrieve_topk_pruned
from .runfile import read_run, write_run
from .scoring import (
    Bm25Params,
    Bm25Scorer,
    ScoreTable,
    TableScorer,
    TermStats,
    bm25_impact,
    clamp_impact,
    load_score_table,
    table_lookup,
    write_score_table,
)
from .synth import synthetic_score_table, synthetic_workload

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "Collection",
    "Document",
    "LoadError",
    "Qrels",
    "Query",
    "load_candidates",
    "load_collection",
    "load_qrels",
    "load_queries",
    "tokenize",
    "write_collection",
    "EvalReport",
    "mrr_at_k",
    "paired_ttest",
    "recall_at_k",
    "BuildConstraints",
    "BuildError",
    "ImpactIndex",
    "IndexLoadError",
    "Posting",
    "PostingList",
    "build_index",
    "index_from_table",
    "read_index",
    "write_index",
    "RankedList",
    "aggregate_score",
    "rerank",
    "retrieve_topk",
    "retrieve_topk_pruned",
    "read_run",
    "write_run",
    "Bm25Params",
    "Bm25Scorer",
    "ScoreTable",
    "TableScorer",
    "TermStats",
    "bm25_impact",
    "clamp_impact",
    "load_score_table",
    "table_lookup",
    "write_score_table",
    "synthetic_score_table",
    "synthetic_workload",
]
