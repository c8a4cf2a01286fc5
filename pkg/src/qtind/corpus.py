"""Collections, queries, and judgments in MS MARCO-style TSV formats.

Documents and queries are token sequences produced by :func:`tokenize`:
lowercased, split on every character that is not a letter or digit.
All loaded structures are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

__all__ = [
    "LoadError",
    "tokenize",
    "Document",
    "Collection",
    "Query",
    "Qrels",
    "CandidateSet",
    "load_collection",
    "write_collection",
    "load_queries",
    "load_qrels",
    "load_candidates",
]

# Letters and digits only (Unicode-aware); underscore is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class LoadError(ValueError):
    """A data file could not be parsed; the message names the line."""


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters, dropping empties."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    doc_id: int
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.doc_id < 0:
            raise ValueError(f"doc_id must be non-negative, got {self.doc_id}")

    def __len__(self) -> int:
        return len(self.terms)


class Collection:
    """A set of documents addressed by id, with length statistics.

    ``avg_doc_len`` is the exact arithmetic mean of per-document term
    counts; ``doc_count`` is at least 1 for any loaded collection.
    """

    def __init__(self, documents: Iterable[Document]):
        docs = list(documents)
        by_id: dict[int, Document] = {}
        for doc in docs:
            if doc.doc_id in by_id:
                raise ValueError(f"duplicate doc_id {doc.doc_id}")
            by_id[doc.doc_id] = doc
        self._documents = docs
        self._by_id = by_id
        self.doc_count = len(docs)
        total = sum(len(d) for d in docs)
        self.avg_doc_len = total / self.doc_count if docs else 0.0
        self._df: dict[str, int] | None = None

    def __iter__(self) -> Iterator[Document]:
        return iter(self._documents)

    def __len__(self) -> int:
        return self.doc_count

    def __contains__(self, doc_id: int) -> bool:
        return doc_id in self._by_id

    def doc(self, doc_id: int) -> Document:
        return self._by_id[doc_id]

    def doc_ids(self) -> Iterable[int]:
        return self._by_id.keys()

    def document_frequencies(self) -> dict[str, int]:
        """Number of documents containing each term (computed once, cached)."""
        if self._df is None:
            df: Counter[str] = Counter()
            for doc in self._documents:
                df.update(set(doc.terms))
            self._df = dict(df)
        return self._df


@dataclass(frozen=True)
class Query:
    """A tokenized query; duplicate terms are retained (multiset semantics)."""

    query_id: int
    terms: tuple[str, ...]


@dataclass(frozen=True)
class Qrels:
    """Relevance judgments: query_id -> set of relevant doc_ids (grade >= 1)."""

    judgments: dict[int, frozenset[int]]

    def relevant(self, query_id: int) -> frozenset[int]:
        return self.judgments.get(query_id, frozenset())

    def query_ids(self) -> Iterable[int]:
        return self.judgments.keys()

    def __len__(self) -> int:
        return len(self.judgments)


@dataclass(frozen=True)
class CandidateSet:
    """Candidate doc ids for one query, in file order, no duplicates."""

    query_id: int
    doc_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValueError(f"duplicate candidate doc_id for query {self.query_id}")


def _parse_int(raw: str, what: str, path: Path, lineno: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise LoadError(f"{path}, line {lineno}: {what} {raw!r} is not an integer") from None


def load_collection(path: str | Path) -> Collection:
    """Load a ``doc_id<TAB>text`` file, one document per line."""
    path = Path(path)
    docs: list[Document] = []
    seen: set[int] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 2:
                raise LoadError(
                    f"{path}, line {lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            doc_id = _parse_int(fields[0], "doc_id", path, lineno)
            if doc_id in seen:
                raise LoadError(f"{path}, line {lineno}: duplicate doc_id {doc_id}")
            seen.add(doc_id)
            docs.append(Document(doc_id, tuple(tokenize(fields[1]))))
    if not docs:
        raise LoadError(f"{path}: collection is empty")
    return Collection(docs)


def write_collection(collection: Collection, path: str | Path) -> None:
    """Write a collection back out as ``doc_id<TAB>space-joined terms``."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in collection:
            fh.write(f"{doc.doc_id}\t{' '.join(doc.terms)}\n")


def load_queries(path: str | Path) -> list[Query]:
    """Load a ``query_id<TAB>text`` file."""
    path = Path(path)
    queries: list[Query] = []
    seen: set[int] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 2:
                raise LoadError(
                    f"{path}, line {lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            query_id = _parse_int(fields[0], "query_id", path, lineno)
            if query_id in seen:
                raise LoadError(f"{path}, line {lineno}: duplicate query_id {query_id}")
            seen.add(query_id)
            queries.append(Query(query_id, tuple(tokenize(fields[1]))))
    return queries


def load_qrels(path: str | Path) -> Qrels:
    """Load TREC qrels (``query_id 0 doc_id grade``); grade 0 rows are dropped."""
    path = Path(path)
    judgments: dict[int, set[int]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 4:
                raise LoadError(
                    f"{path}, line {lineno}: expected 4 whitespace-separated fields, got {len(fields)}"
                )
            query_id = _parse_int(fields[0], "query_id", path, lineno)
            doc_id = _parse_int(fields[2], "doc_id", path, lineno)
            grade = _parse_int(fields[3], "grade", path, lineno)
            if grade >= 1:
                judgments.setdefault(query_id, set()).add(doc_id)
    return Qrels({qid: frozenset(ids) for qid, ids in judgments.items()})


def load_candidates(path: str | Path) -> dict[int, CandidateSet]:
    """Load a top-1000 candidates file; only the first two fields are used.

    Rows are ``query_id<TAB>doc_id<TAB>query_text<TAB>passage_text``.
    Candidate sets are self-contained: they do not need a matching row in
    any query file.
    """
    path = Path(path)
    order: dict[int, list[int]] = {}
    seen: dict[int, set[int]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) < 2:
                raise LoadError(
                    f"{path}, line {lineno}: expected at least 2 tab-separated fields"
                )
            query_id = _parse_int(fields[0], "query_id", path, lineno)
            doc_id = _parse_int(fields[1], "doc_id", path, lineno)
            bucket = seen.setdefault(query_id, set())
            if doc_id in bucket:
                raise LoadError(
                    f"{path}, line {lineno}: duplicate candidate doc_id {doc_id} for query {query_id}"
                )
            bucket.add(doc_id)
            order.setdefault(query_id, []).append(doc_id)
    return {qid: CandidateSet(qid, tuple(ids)) for qid, ids in order.items()}
