"""TREC run files: ``query_id Q0 doc_id rank score run_tag``, rank from 1."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .corpus import LoadError
from .query_eval import RankedList

__all__ = ["write_run", "read_run"]


def write_run(ranked_lists: Iterable[RankedList], path: str | Path, tag: str = "qtind") -> None:
    """Write ranked lists in ascending query_id order."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for ranked in sorted(ranked_lists, key=lambda r: r.query_id):
            for rank, (doc_id, score) in enumerate(ranked.entries, start=1):
                fh.write(f"{ranked.query_id} Q0 {doc_id} {rank} {score:.6f} {tag}\n")


def read_run(path: str | Path) -> dict[int, list[int]]:
    """Read a TREC run into query_id -> doc_ids ordered by the rank field."""
    path = Path(path)
    rows: dict[int, list[tuple[int, int]]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 6:
                raise LoadError(f"{path}, line {lineno}: expected 6 fields, got {len(fields)}")
            try:
                query_id, doc_id, rank = int(fields[0]), int(fields[2]), int(fields[3])
            except ValueError:
                raise LoadError(f"{path}, line {lineno}: non-integer query_id, doc_id, or rank") from None
            rows.setdefault(query_id, []).append((rank, doc_id))
    return {qid: [doc_id for _, doc_id in sorted(entries)] for qid, entries in rows.items()}
