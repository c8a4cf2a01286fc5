"""Synthetic corpora with planted relevance, for self-tests and demos.

Documents draw from a shared vocabulary with a skewed frequency profile;
a subset of documents belong to topics and carry that topic's marker
term.  Queries name a topic marker, so the documents of that topic are
the relevant set.  Everything is driven by one seed and is fully
deterministic, including the synthetic score table, whose values depend
only on (seed, term, doc_id).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .corpus import Collection, Document, Qrels, Query
from .scoring import ScoreTable

__all__ = ["SyntheticData", "synthetic_workload", "synthetic_score_table", "random_queries"]


@dataclass
class SyntheticData:
    collection: Collection
    queries: list[Query]
    qrels: Qrels


def _common_vocab(size: int) -> list[str]:
    return [f"w{i:03d}" for i in range(size)]


def synthetic_workload(
    n_docs: int,
    n_queries: int,
    seed: int,
    vocab_size: int = 200,
    n_topics: int = 20,
    doc_len_range: tuple[int, int] = (5, 25),
) -> SyntheticData:
    """Generate a collection, topic queries, and matching qrels."""
    rng = np.random.default_rng(seed)
    vocab = _common_vocab(vocab_size)
    markers = [f"topic{i:02d}" for i in range(n_topics)]
    # Skewed term popularity so document frequencies vary widely.
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()

    docs: list[Document] = []
    topic_docs: dict[int, list[int]] = {i: [] for i in range(n_topics)}
    for doc_id in range(n_docs):
        length = int(rng.integers(doc_len_range[0], doc_len_range[1] + 1))
        terms = [str(t) for t in rng.choice(vocab, size=length, p=weights)]
        # First n_topics docs seed one topic each so no topic is empty.
        if doc_id < n_topics:
            topic = doc_id
        else:
            topic = int(rng.integers(0, n_topics)) if rng.random() < 0.5 else -1
        if topic >= 0:
            copies = int(rng.integers(1, 3))
            positions = rng.integers(0, len(terms) + 1, size=copies)
            for pos in sorted(positions, reverse=True):
                terms.insert(int(pos), markers[topic])
            topic_docs[topic].append(doc_id)
        docs.append(Document(doc_id, tuple(terms)))

    queries: list[Query] = []
    judgments: dict[int, frozenset[int]] = {}
    for i in range(n_queries):
        qid = 1000 + i
        topic = int(rng.integers(0, n_topics))
        terms = [markers[topic]]
        for _ in range(int(rng.integers(1, 3))):
            terms.append(str(rng.choice(vocab, p=weights)))
        rng.shuffle(terms)
        queries.append(Query(qid, tuple(terms)))
        judgments[qid] = frozenset(topic_docs[topic])

    return SyntheticData(Collection(docs), queries, Qrels(judgments))


def random_queries(collection: Collection, n_queries: int, seed: int, max_terms: int = 4) -> list[Query]:
    """Queries sampled from the collection vocabulary, duplicates allowed."""
    rng = np.random.default_rng(seed)
    vocab = sorted(collection.document_frequencies())
    queries = []
    for i in range(n_queries):
        n_terms = int(rng.integers(1, max_terms + 1))
        terms = tuple(str(rng.choice(vocab)) for _ in range(n_terms))
        queries.append(Query(2_000_000 + i, terms))
    return queries


def _pair_value(seed: int, term: str, doc_id: int) -> float:
    """Uniform in [0, 1), a pure function of (seed, term, doc_id)."""
    digest = hashlib.blake2b(f"{seed}:{term}:{doc_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def synthetic_score_table(collection: Collection, seed: int, negative_fraction: float = 0.15) -> ScoreTable:
    """Deterministic per-(term, doc) scores for every term occurring in a doc.

    Roughly ``negative_fraction`` of raw scores are negative, so ingestion
    clamping is exercised.  Values depend only on (seed, term, doc_id),
    never on iteration order.
    """
    table = ScoreTable()
    for doc in collection:
        for term in sorted(set(doc.terms)):
            u = _pair_value(seed, term, doc.doc_id)
            # Map [0, negative_fraction) to negatives, the rest to (0, 2].
            if u < negative_fraction:
                raw = -1.0 * (u / negative_fraction)
            else:
                raw = 2.0 * (u - negative_fraction) / (1.0 - negative_fraction)
            table.add(term, doc.doc_id, round(raw, 6))
    return table
