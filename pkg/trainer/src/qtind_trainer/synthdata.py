"""Synthetic corpora with planted relevance, written in engine file formats.

The planted structure separates learned term weighting from idf:

- every query is ``<topic marker> <red herring>``;
- the topic's documents all contain the marker twice plus shared context
  words (these documents are the relevant set);
- the red herring is rarer than the marker but occurs only in a couple
  of short background documents.

A tf-idf ranker weights the herring above the marker and retrieves the
herring's background documents first; a trained scorer can learn that
heavy exact-match mass in a topical context outranks rarity.  Topics are
shared between train and held-out queries, herrings never are.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import TrainingTriple


@dataclass
class ExperimentFiles:
    collection: Path
    queries_train: Path
    queries_eval: Path
    qrels: Path
    qrels_eval: Path
    candidates: Path
    triples: Path
    train_query_ids: list[int]
    eval_query_ids: list[int]


def synthetic_triples(n_triples: int, seed: int, vocab_size: int = 80, n_topics: int = 8) -> list[TrainingTriple]:
    """Self-contained triples: positives share a marker term with the query."""
    rng = np.random.default_rng(seed)
    common = [f"c{i:03d}" for i in range(vocab_size)]
    triples = []
    for _ in range(n_triples):
        topic, other = rng.choice(n_topics, size=2, replace=False)
        marker, other_marker = f"m{topic:02d}", f"m{other:02d}"
        query = (marker, str(rng.choice(common)))
        pos = tuple([marker] + [str(t) for t in rng.choice(common, size=6)])
        neg = tuple([other_marker] + [str(t) for t in rng.choice(common, size=6)])
        triples.append(TrainingTriple(query, pos, neg))
    return triples


def generate_experiment(
    out_dir: str | Path,
    n_docs: int = 5000,
    n_queries: int = 500,
    seed: int = 0,
    vocab_size: int = 800,
    docs_per_topic: int = 8,
    herring_docs_per_query: int = 2,
    n_eval_queries: int = 100,
    candidates_per_query: int = 100,
    triples_per_train_query: int = 25,
) -> ExperimentFiles:
    """Write collection/queries/qrels/candidates/triples files for one run.

    Queries come in co-topic pairs (i and i + n_topics share a topic), so
    every held-out query's marker was trained through its partner while
    its herring term stays unseen.
    """
    if n_queries % 2:
        raise ValueError("n_queries must be even (queries pair up per topic)")
    n_topics = n_queries // 2
    rng = np.random.default_rng(seed)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    common = [f"w{i:03d}" for i in range(vocab_size)]
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()
    markers = [f"topic{k:03d}" for k in range(n_topics)]
    herrings = [f"rare{i:03d}" for i in range(n_queries)]

    def common_words(n: int) -> list[str]:
        return [str(w) for w in rng.choice(common, size=n, p=weights)]

    # Topical documents: marker twice, three fixed context words, zipf fill.
    docs: list[list[str]] = []
    topic_docs: dict[int, list[int]] = {}
    for topic in range(n_topics):
        context = [str(w) for w in rng.choice(common, size=3, replace=False)]
        ids = []
        for _ in range(docs_per_topic):
            words = [markers[topic]] * 2 + context + common_words(int(rng.integers(13, 18)))
            rng.shuffle(words)
            ids.append(len(docs))
            docs.append(words)
        topic_docs[topic] = ids

    # Short background documents; a few host the herring plantings.
    background_ids = []
    while len(docs) < n_docs:
        background_ids.append(len(docs))
        docs.append(common_words(int(rng.integers(6, 10))))
    herring_docs: dict[int, list[int]] = {}
    for q_index in range(n_queries):
        hosts = rng.choice(background_ids, size=herring_docs_per_query, replace=False)
        for host in hosts:
            docs[host].append(herrings[q_index])
        herring_docs[q_index] = sorted(int(h) for h in hosts)

    collection_path = out / "collection.tsv"
    collection_path.write_text("".join(f"{i}\t{' '.join(words)}\n" for i, words in enumerate(docs)))

    queries: dict[int, tuple[int, str]] = {}
    for i in range(n_queries):
        topic = i % n_topics
        queries[10_000 + i] = (topic, f"{markers[topic]} {herrings[i]}")
    all_ids = sorted(queries)
    eval_ids = all_ids[-n_eval_queries:]
    train_ids = all_ids[:-n_eval_queries]

    (out / "queries_train.tsv").write_text("".join(f"{q}\t{queries[q][1]}\n" for q in train_ids))
    (out / "queries_eval.tsv").write_text("".join(f"{q}\t{queries[q][1]}\n" for q in eval_ids))

    with (out / "qrels.txt").open("w") as fh:
        for qid in all_ids:
            for doc_id in topic_docs[queries[qid][0]]:
                fh.write(f"{qid} 0 {doc_id} 1\n")
    with (out / "qrels_eval.txt").open("w") as fh:
        for qid in eval_ids:
            for doc_id in topic_docs[queries[qid][0]]:
                fh.write(f"{qid} 0 {doc_id} 1\n")

    with (out / "candidates.tsv").open("w") as fh:
        for qid in eval_ids:
            topic, text = queries[qid]
            pool = set(topic_docs[topic]) | set(herring_docs[qid - 10_000])
            while len(pool) < candidates_per_query:
                pool.add(int(rng.choice(background_ids)))
            for doc_id in sorted(pool):
                fh.write(f"{qid}\t{doc_id}\t{text}\t{' '.join(docs[doc_id])}\n")

    with (out / "triples.tsv").open("w") as fh:
        for qid in train_ids:
            topic, text = queries[qid]
            relevant = topic_docs[topic]
            relevant_set = set(relevant)
            for _ in range(triples_per_train_query):
                pos_id = int(rng.choice(relevant))
                # A third of the negatives are the query's own herring hosts:
                # the contrast that teaches "rare exact hit, flat context" to
                # score low.
                if rng.random() < 0.34:
                    neg_id = int(rng.choice(herring_docs[qid - 10_000]))
                else:
                    while True:
                        neg_id = int(rng.integers(0, n_docs))
                        if neg_id not in relevant_set:
                            break
                fh.write(f"{text}\t{' '.join(docs[pos_id])}\t{' '.join(docs[neg_id])}\n")

    return ExperimentFiles(
        collection_path,
        out / "queries_train.tsv",
        out / "queries_eval.tsv",
        out / "qrels.txt",
        out / "qrels_eval.txt",
        out / "candidates.tsv",
        out / "triples.tsv",
        train_ids,
        eval_ids,
    )
