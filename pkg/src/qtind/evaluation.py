"""Rank-quality metrics and the paired significance test.

Metrics are means over all judged queries: a qrels query missing from
the run scores 0, and run queries without judgments are skipped (their
count is reported).  The t-distribution tail is computed through the
regularized incomplete beta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from scipy.special import betainc

from .corpus import Qrels
from .query_eval import RankedList

__all__ = ["EvalReport", "mrr_at_k", "recall_at_k", "paired_ttest"]

Run = Mapping[int, "RankedList | Sequence[int]"]


@dataclass
class EvalReport:
    metric: str
    mean: float
    per_query: dict[int, float]
    query_count: int
    skipped_run_queries: int = 0


def _ranked_doc_ids(entry: RankedList | Sequence[int]) -> Sequence[int]:
    if isinstance(entry, RankedList):
        return entry.doc_ids()
    return entry


def _evaluate(run: Run, qrels: Qrels, metric: str, per_query_fn) -> EvalReport:
    judged = set(qrels.query_ids())
    if not judged & set(run):
        raise ValueError("no overlap between run queries and judged queries")
    skipped = sum(1 for qid in run if qid not in judged)
    per_query: dict[int, float] = {}
    for qid in sorted(judged):
        docs = _ranked_doc_ids(run[qid]) if qid in run else ()
        per_query[qid] = per_query_fn(docs, qrels.relevant(qid))
    mean = sum(per_query.values()) / len(per_query)
    return EvalReport(metric, mean, per_query, len(per_query), skipped)


def mrr_at_k(run: Run, qrels: Qrels, k: int = 10) -> EvalReport:
    """Mean reciprocal rank of the first relevant document within the top k."""

    def rr(docs: Sequence[int], relevant: frozenset[int]) -> float:
        for rank, doc_id in enumerate(docs[:k], start=1):
            if doc_id in relevant:
                return 1.0 / rank
        return 0.0

    return _evaluate(run, qrels, f"mrr@{k}", rr)


def recall_at_k(run: Run, qrels: Qrels, k: int = 1000) -> EvalReport:
    """Mean fraction of relevant documents retrieved within the top k."""

    def recall(docs: Sequence[int], relevant: frozenset[int]) -> float:
        return len(relevant.intersection(docs[:k])) / len(relevant)

    return _evaluate(run, qrels, f"recall@{k}", recall)


def _t_sf_two_sided(t: float, dof: int) -> float:
    """P(|T| >= |t|) for Student's t with ``dof`` degrees of freedom."""
    return float(betainc(dof / 2.0, 0.5, dof / (dof + t * t)))


def paired_ttest(a: Mapping[int, float], b: Mapping[int, float]) -> tuple[float, float]:
    """Two-sided paired Student's t-test over per-query values.

    Inputs are aligned by query id and must cover identical query sets.
    Returns (t, p).  Conventions for zero-variance differences: p = 1.0
    when every difference is exactly 0, and p = 0.0 with t = +/-inf when
    the mean difference is nonzero.
    """
    if set(a) != set(b):
        missing = sorted(set(a).symmetric_difference(b))
        raise ValueError(f"query sets differ; symmetric difference: {missing}")
    n = len(a)
    if n < 2:
        raise ValueError(f"need at least 2 paired values, got {n}")
    diffs = [a[qid] - b[qid] for qid in sorted(a)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / math.sqrt(var / n)
    return t, _t_sf_two_sided(t, n - 1)
