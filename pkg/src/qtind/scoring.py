"""Per-term impact scorers.

A scorer assigns every (term, document) pair a non-negative impact; the
query evaluator only ever sums these precomputed values.  Impacts are
plain floats, clamped to >= 0 at the scorer boundary.  Two scorers are
provided: the analytic BM25 formula and lookup into an externally
produced score table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Collection, Document, LoadError

__all__ = [
    "Bm25Params",
    "TermStats",
    "bm25_impact",
    "clamp_impact",
    "ScoreTable",
    "table_lookup",
    "load_score_table",
    "write_score_table",
    "Bm25Scorer",
    "TableScorer",
]


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if not self.k1 > 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class TermStats:
    """Statistics for one (term, document) pair within a collection."""

    tf: int
    df: int
    doc_len: int
    doc_count: int
    avg_doc_len: float

    def __post_init__(self) -> None:
        if self.tf < 0 or self.df < 0 or self.doc_len < 0:
            raise ValueError("tf, df, and doc_len must be non-negative")
        if self.doc_count < 1:
            raise ValueError("doc_count must be >= 1")
        if self.df > self.doc_count:
            raise ValueError(f"df {self.df} exceeds doc_count {self.doc_count}")
        if self.tf > self.doc_len:
            raise ValueError(f"tf {self.tf} exceeds doc_len {self.doc_len}")


def bm25_impact(stats: TermStats, params: Bm25Params = Bm25Params()) -> float:
    """BM25 contribution of one term to one document.

    Uses idf = ln(1 + (N - df + 0.5) / (df + 0.5)), which is positive for
    all df <= N, so the result is non-negative without extra clamping.
    """
    if stats.avg_doc_len <= 0:
        raise ValueError("avg_doc_len must be > 0 for BM25 scoring")
    if stats.tf == 0:
        return 0.0
    idf = math.log(1.0 + (stats.doc_count - stats.df + 0.5) / (stats.df + 0.5))
    norm = 1.0 - params.b + params.b * (stats.doc_len / stats.avg_doc_len)
    return idf * (stats.tf * (params.k1 + 1.0)) / (stats.tf + params.k1 * norm)


def clamp_impact(raw: float) -> float:
    """Rectify a raw score into a valid impact: max(0, raw).

    Raises ValueError for non-finite input; callers that know the
    offending (term, doc) pair should re-raise with that context.
    """
    if not math.isfinite(raw):
        raise ValueError(f"impact must be finite, got {raw!r}")
    return raw if raw > 0.0 else 0.0


class ScoreTable:
    """Sparse (term, doc_id) -> raw score mapping produced offline.

    Raw scores may be negative on disk; lookups clamp to >= 0 so that the
    table can be used directly as an impact source.  Absent pairs score
    exactly 0.
    """

    def __init__(self, entries: Iterable[tuple[str, int, float]] = ()):
        self._by_term: dict[str, dict[int, float]] = {}
        self.entry_count = 0
        for term, doc_id, raw in entries:
            self.add(term, doc_id, raw)

    def add(self, term: str, doc_id: int, raw: float) -> None:
        docs = self._by_term.setdefault(term, {})
        if doc_id in docs:
            raise ValueError(f"duplicate score table entry for ({term!r}, {doc_id})")
        if not math.isfinite(raw):
            raise ValueError(f"non-finite score for ({term!r}, {doc_id}): {raw!r}")
        docs[doc_id] = raw
        self.entry_count += 1

    def lookup(self, term: str, doc_id: int) -> float:
        """Clamped stored value, or 0 for absent pairs."""
        raw = self._by_term.get(term, {}).get(doc_id)
        if raw is None:
            return 0.0
        return clamp_impact(raw)

    # Shared impact-source protocol with ImpactIndex, so reranking can
    # consume a table directly.
    impact = lookup

    def raw(self, term: str, doc_id: int) -> float | None:
        return self._by_term.get(term, {}).get(doc_id)

    def terms(self) -> Iterable[str]:
        return self._by_term.keys()

    def docs_for(self, term: str) -> Mapping[int, float]:
        return self._by_term.get(term, {})

    def __len__(self) -> int:
        return self.entry_count


def table_lookup(table: ScoreTable, term: str, doc_id: int) -> float:
    return table.lookup(term, doc_id)


def load_score_table(path: str | Path) -> ScoreTable:
    """Load a ``term<TAB>doc_id<TAB>score`` TSV."""
    path = Path(path)
    table = ScoreTable()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 3:
                raise LoadError(
                    f"{path}, line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            term = fields[0]
            try:
                doc_id = int(fields[1])
            except ValueError:
                raise LoadError(f"{path}, line {lineno}: doc_id {fields[1]!r} is not an integer") from None
            try:
                raw = float(fields[2])
            except ValueError:
                raise LoadError(f"{path}, line {lineno}: score {fields[2]!r} is not a number") from None
            try:
                table.add(term, doc_id, raw)
            except ValueError as exc:
                raise LoadError(f"{path}, line {lineno}: {exc}") from None
    return table


def write_score_table(table: ScoreTable, path: str | Path) -> None:
    """Write a table as sorted TSV lines (deterministic byte output)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for term in sorted(table.terms()):
            docs = table.docs_for(term)
            for doc_id in sorted(docs):
                fh.write(f"{term}\t{doc_id}\t{docs[doc_id]:.6f}\n")


class Bm25Scorer:
    """Scores (term, doc) pairs with BM25 over a fixed collection."""

    name = "bm25"

    def __init__(self, collection: Collection, params: Bm25Params = Bm25Params()):
        self.params = params
        self.doc_count = collection.doc_count
        self.avg_doc_len = collection.avg_doc_len
        self._df = collection.document_frequencies()

    def __call__(self, term: str, doc: Document, tf: int) -> float:
        stats = TermStats(
            tf=tf,
            df=self._df.get(term, 0),
            doc_len=len(doc),
            doc_count=self.doc_count,
            avg_doc_len=self.avg_doc_len,
        )
        return bm25_impact(stats, self.params)


class TableScorer:
    """Scores (term, doc) pairs by clamped score-table lookup."""

    name = "table"

    def __init__(self, table: ScoreTable):
        self.table = table

    def __call__(self, term: str, doc: Document, tf: int) -> float:
        return self.table.lookup(term, doc.doc_id)
