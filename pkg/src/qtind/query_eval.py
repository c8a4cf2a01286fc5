"""Query evaluation by impact accumulation.

A document's score for a query is the sum, over query term occurrences,
of the stored impact for that (term, document) pair; terms or documents
without a posting contribute 0.  Evaluation is term-at-a-time into a
hash accumulator.  ``retrieve_topk_pruned`` returns output identical to
the exhaustive path while skipping posting lists that provably cannot
place a new document in the top k.

All functions are read-only over the index; any number of queries may be
evaluated concurrently.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field

from .corpus import CandidateSet, Query
from .index import ImpactIndex

__all__ = ["RankedList", "aggregate_score", "retrieve_topk", "retrieve_topk_pruned", "rerank"]


@dataclass
class RankedList:
    """Ordered (doc_id, score) results for one query.

    Entries are score-descending with ties broken by ascending doc_id;
    at most ``k`` entries are kept.  ``postings_scanned`` reports work
    done by the retrieval paths and is excluded from equality.
    """

    query_id: int
    entries: list[tuple[int, float]]
    k: int
    postings_scanned: int = field(default=0, compare=False)

    def doc_ids(self) -> list[int]:
        return [doc_id for doc_id, _ in self.entries]


def _term_weights(query: Query, dedup: bool) -> dict[str, int]:
    """Query term multiplicities; all 1 in deduplicated mode."""
    if dedup:
        return dict.fromkeys(query.terms, 1)
    return dict(Counter(query.terms))


def aggregate_score(query: Query, doc_id: int, index, dedup: bool = False) -> float:
    """Sum of stored impacts for (t, doc_id) over query term occurrences.

    ``index`` is any impact source exposing ``impact(term, doc_id)``
    (an ImpactIndex or a ScoreTable).  Unknown terms and documents
    contribute 0; a term occurring twice contributes its impact twice
    unless ``dedup`` is set.
    """
    return sum(w * index.impact(t, doc_id) for t, w in _term_weights(query, dedup).items())


def _top_entries(acc: dict[int, float], k: int) -> list[tuple[int, float]]:
    return heapq.nsmallest(k, acc.items(), key=lambda e: (-e[1], e[0]))


def _ordered_lists(query: Query, index: ImpactIndex, dedup: bool):
    """Posting lists with query weights, in descending weighted max_impact.

    Both retrieval paths consume lists in this one order so each
    document's contributions are added in an identical sequence and the
    two paths produce bit-identical scores.
    """
    weighted = [
        (w, index.posting_list(t))
        for t, w in _term_weights(query, dedup).items()
        if t in index
    ]
    weighted.sort(key=lambda e: (-e[0] * e[1].max_impact, e[1].term))
    return weighted


def retrieve_topk(query: Query, index: ImpactIndex, k: int, dedup: bool = False) -> RankedList:
    """Exhaustive term-at-a-time top-k over the full collection.

    Documents with score 0 are never returned (only posted documents
    enter the accumulator, and stored impacts are strictly positive).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    acc: dict[int, float] = {}
    scanned = 0
    for weight, pl in _ordered_lists(query, index, dedup):
        scanned += len(pl)
        for posting in pl:
            acc[posting.doc_id] = acc.get(posting.doc_id, 0.0) + weight * posting.impact
    return RankedList(query.query_id, _top_entries(acc, k), k, postings_scanned=scanned)


def retrieve_topk_pruned(query: Query, index: ImpactIndex, k: int, dedup: bool = False) -> RankedList:
    """Top-k with safe pruning; output is identical to ``retrieve_topk``.

    Lists are consumed in descending order of their weighted max_impact.
    Before scanning each list, if the accumulator already holds at least
    k documents whose current k-th score strictly exceeds the summed
    weighted max_impacts of all unscanned lists, no unseen document can
    reach the top k (its entire score would come from those lists), so
    scanning stops.  Documents already accumulated then have their exact
    scores completed by direct lookups into the skipped lists, which
    preserves exact scores and ordering.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    weighted = _ordered_lists(query, index, dedup)
    remaining = [w * pl.max_impact for w, pl in weighted]
    suffix = 0.0
    suffix_sums = [0.0] * (len(weighted) + 1)
    for i in range(len(weighted) - 1, -1, -1):
        suffix += remaining[i]
        suffix_sums[i] = suffix

    acc: dict[int, float] = {}
    scanned = 0
    skipped_from = len(weighted)
    for i, (weight, pl) in enumerate(weighted):
        if len(acc) >= k:
            kth = heapq.nlargest(k, acc.values())[-1]
            if suffix_sums[i] < kth:
                skipped_from = i
                break
        scanned += len(pl)
        for posting in pl:
            acc[posting.doc_id] = acc.get(posting.doc_id, 0.0) + weight * posting.impact

    # Complete exact scores for accumulated candidates from skipped lists.
    for weight, pl in weighted[skipped_from:]:
        for doc_id in acc:
            if doc_id in pl:
                acc[doc_id] += weight * pl.impact_of(doc_id)
                scanned += 1

    return RankedList(query.query_id, _top_entries(acc, k), k, postings_scanned=scanned)


def rerank(
    query: Query,
    candidates: CandidateSet,
    source,
    k: int = 1000,
    dedup: bool = False,
) -> RankedList:
    """Order a candidate set by aggregate score.

    ``source`` is an ImpactIndex or ScoreTable.  Zero-scoring candidates
    are retained (a re-ranking is a total order over its candidates);
    they fall after all positive scorers, ordered by doc_id.
    """
    if not candidates.doc_ids:
        raise ValueError(f"empty candidate set for query {candidates.query_id}")
    weights = _term_weights(query, dedup)
    scored = [
        (doc_id, sum(w * source.impact(t, doc_id) for t, w in weights.items()))
        for doc_id in candidates.doc_ids
    ]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return RankedList(query.query_id, scored[:k], k)
