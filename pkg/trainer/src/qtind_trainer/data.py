"""Training triples and the engine-format collection file."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .text import tokenize


@dataclass(frozen=True)
class TrainingTriple:
    """A query with one relevant and one non-relevant passage."""

    query: tuple[str, ...]
    pos_doc: tuple[str, ...]
    neg_doc: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.pos_doc == self.neg_doc:
            raise ValueError("pos_doc and neg_doc must differ")


def load_triples(path: str | Path) -> list[TrainingTriple]:
    """Load ``query_text<TAB>pos_passage<TAB>neg_passage`` rows."""
    path = Path(path)
    triples: list[TrainingTriple] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}, line {lineno}: expected 3 tab-separated fields")
            try:
                triples.append(
                    TrainingTriple(
                        tuple(tokenize(fields[0])),
                        tuple(tokenize(fields[1])),
                        tuple(tokenize(fields[2])),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}, line {lineno}: {exc}") from None
    if not triples:
        raise ValueError(f"{path}: no training triples")
    return triples


def build_vocab(triples: list[TrainingTriple]) -> dict[str, int]:
    """Term -> id (1-based; 0 is reserved for padding/out-of-vocabulary)."""
    terms = sorted({t for triple in triples for t in triple.query + triple.pos_doc + triple.neg_doc})
    return {term: i + 1 for i, term in enumerate(terms)}


def load_collection_tsv(path: str | Path) -> dict[int, tuple[str, ...]]:
    """Engine-format collection: ``doc_id<TAB>text``, tokenized."""
    path = Path(path)
    docs: dict[int, tuple[str, ...]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}, line {lineno}: expected 2 tab-separated fields")
            doc_id = int(fields[0])
            if doc_id in docs:
                raise ValueError(f"{path}, line {lineno}: duplicate doc_id {doc_id}")
            docs[doc_id] = tuple(tokenize(fields[1]))
    return docs
