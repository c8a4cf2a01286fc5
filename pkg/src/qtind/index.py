"""Impact-ordered inverted index: build, serialize, load.

Postings carry precomputed impacts and are stored per term in descending
impact order (ties by ascending doc_id), so query evaluation can stop
scanning a list early.  Zero impacts are never stored.

Build-time pruning implements the precomputation constraints: a term is
indexed only when its document frequency does not exceed
``ceil(df_cap_fraction * doc_count)``, and (by default) only for
documents in which it actually occurs.
"""

from __future__ import annotations

import logging
import math
import struct
import zlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .corpus import Collection, Document
from .scoring import ScoreTable, clamp_impact

__all__ = [
    "Posting",
    "PostingList",
    "BuildConstraints",
    "ImpactIndex",
    "BuildError",
    "IndexLoadError",
    "NotAnIndexFile",
    "IndexVersionMismatch",
    "TruncatedIndexFile",
    "IndexChecksumMismatch",
    "build_index",
    "index_from_table",
    "write_index",
    "read_index",
]

logger = logging.getLogger(__name__)

_MAGIC = b"QTIX"
_VERSION = 1


class BuildError(ValueError):
    """Index construction failed; the message names the offending pair."""


class IndexLoadError(ValueError):
    """Base class for index deserialization failures."""


class NotAnIndexFile(IndexLoadError):
    pass


class IndexVersionMismatch(IndexLoadError):
    pass


class TruncatedIndexFile(IndexLoadError):
    pass


class IndexChecksumMismatch(IndexLoadError):
    pass


@dataclass(frozen=True)
class Posting:
    doc_id: int
    impact: float


class PostingList:
    """One term's postings, impact-descending, with the list maximum."""

    __slots__ = ("term", "postings", "max_impact", "_by_doc")

    def __init__(self, term: str, postings: list[Posting]):
        self.term = term
        self.postings = postings
        self.max_impact = postings[0].impact if postings else 0.0
        self._by_doc = {p.doc_id: p.impact for p in postings}

    def __len__(self) -> int:
        return len(self.postings)

    def __iter__(self):
        return iter(self.postings)

    def impact_of(self, doc_id: int) -> float:
        return self._by_doc.get(doc_id, 0.0)

    def __contains__(self, doc_id: int) -> bool:
        return doc_id in self._by_doc


@dataclass(frozen=True)
class BuildConstraints:
    """Which (term, doc) pairs are evaluated at precomputation time."""

    require_term_in_doc: bool = True
    df_cap_fraction: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.df_cap_fraction <= 1.0:
            raise ValueError(f"df_cap_fraction must be in (0, 1], got {self.df_cap_fraction}")

    def df_cap(self, doc_count: int) -> int:
        """A term is kept iff its df does not exceed this cap."""
        return math.ceil(self.df_cap_fraction * doc_count)


class ImpactIndex:
    """Vocabulary-keyed map of impact-ordered posting lists."""

    def __init__(
        self,
        lists: dict[str, PostingList],
        doc_count: int,
        build_config: BuildConstraints,
    ):
        self.lists = lists
        self.doc_count = doc_count
        self.build_config = build_config
        # Populated by index_from_table: entries dropped because their term
        # did not occur in the referenced document.
        self.table_entries_discarded = 0

    def __contains__(self, term: str) -> bool:
        return term in self.lists

    def posting_list(self, term: str) -> PostingList | None:
        return self.lists.get(term)

    def impact(self, term: str, doc_id: int) -> float:
        pl = self.lists.get(term)
        return pl.impact_of(doc_id) if pl is not None else 0.0

    def terms(self) -> Iterable[str]:
        return self.lists.keys()

    def total_postings(self) -> int:
        return sum(len(pl) for pl in self.lists.values())

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError naming the first violation."""
        for term, pl in self.lists.items():
            impacts = [p.impact for p in pl.postings]
            if any(impacts[i] < impacts[i + 1] for i in range(len(impacts) - 1)):
                raise AssertionError(f"impact ordering violated in posting list for {term!r}")
            for a, b in zip(pl.postings, pl.postings[1:]):
                if a.impact == b.impact and a.doc_id >= b.doc_id:
                    raise AssertionError(f"doc_id tie ordering violated in posting list for {term!r}")
            if any(p.impact <= 0 for p in pl.postings):
                raise AssertionError(f"non-positive impact stored for {term!r}")
            head = impacts[0] if impacts else 0.0
            if pl.max_impact != head:
                raise AssertionError(f"max_impact does not equal head impact for {term!r}")
            ids = [p.doc_id for p in pl.postings]
            if len(set(ids)) != len(ids):
                raise AssertionError(f"duplicate doc_id in posting list for {term!r}")


Scorer = Callable[[str, Document, int], float]


def _sorted_postings(pairs: list[tuple[int, float]]) -> list[Posting]:
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return [Posting(doc_id, impact) for doc_id, impact in pairs]


def build_index(
    collection: Collection,
    scorer: Scorer,
    constraints: BuildConstraints = BuildConstraints(),
) -> ImpactIndex:
    """Precompute impacts for every constraint-passing (term, doc) pair.

    With ``require_term_in_doc`` unset, every surviving vocabulary term is
    scored against every document.  Postings are kept iff the clamped
    impact is strictly positive.
    """
    if collection.doc_count == 0:
        raise BuildError("collection is empty")
    df = collection.document_frequencies()
    cap = constraints.df_cap(collection.doc_count)
    eligible = {t for t, n in df.items() if n <= cap}

    acc: dict[str, list[tuple[int, float]]] = {t: [] for t in eligible}

    def score_pair(term: str, doc: Document, tf: int) -> float:
        try:
            return clamp_impact(scorer(term, doc, tf))
        except Exception as exc:
            raise BuildError(f"scorer failed for term {term!r}, doc {doc.doc_id}: {exc}") from exc

    if constraints.require_term_in_doc:
        for doc in collection:
            for term, tf in Counter(doc.terms).items():
                if term in eligible:
                    impact = score_pair(term, doc, tf)
                    if impact > 0.0:
                        acc[term].append((doc.doc_id, impact))
    else:
        for doc in collection:
            counts = Counter(doc.terms)
            for term in eligible:
                impact = score_pair(term, doc, counts.get(term, 0))
                if impact > 0.0:
                    acc[term].append((doc.doc_id, impact))

    lists = {t: PostingList(t, _sorted_postings(pairs)) for t, pairs in acc.items() if pairs}
    return ImpactIndex(lists, collection.doc_count, constraints)


def index_from_table(
    collection: Collection,
    table: ScoreTable,
    constraints: BuildConstraints = BuildConstraints(),
) -> ImpactIndex:
    """Ingest an external score table into an impact index.

    The vocabulary is the collection's plus the table's terms; document
    frequency for the cap is computed on the collection.  When
    ``require_term_in_doc`` is set, entries whose term does not occur in
    the referenced document are discarded and counted on the returned
    index's ``table_entries_discarded``.
    """
    if collection.doc_count == 0:
        raise BuildError("collection is empty")
    df = collection.document_frequencies()
    cap = constraints.df_cap(collection.doc_count)

    discarded = 0
    acc: dict[str, list[tuple[int, float]]] = {}
    for term in table.terms():
        if df.get(term, 0) > cap:
            continue
        for doc_id, raw in table.docs_for(term).items():
            if doc_id not in collection:
                raise BuildError(f"score table references doc_id {doc_id} absent from collection")
            if constraints.require_term_in_doc and term not in collection.doc(doc_id).terms:
                discarded += 1
                continue
            try:
                impact = clamp_impact(raw)
            except ValueError as exc:
                raise BuildError(f"bad score for term {term!r}, doc {doc_id}: {exc}") from None
            if impact > 0.0:
                acc.setdefault(term, []).append((doc_id, impact))

    if discarded:
        logger.warning("discarded %d table entries whose term is absent from the document", discarded)
    lists = {t: PostingList(t, _sorted_postings(pairs)) for t, pairs in acc.items()}
    index = ImpactIndex(lists, collection.doc_count, constraints)
    index.table_entries_discarded = discarded
    return index


# ---------------------------------------------------------------------------
# Serialization.  Layout (little-endian; see README for the field list):
#   magic "QTIX" | version u16 | flags u16 (bit 0: quantized)
#   payload_len u64 | crc32 u32 | payload
# payload:
#   doc_count u64 | require_term_in_doc u8 | df_cap_fraction f64 | n_terms u64
#   per term, sorted by UTF-8 bytes:
#     term_len u32 | term bytes | n_postings u64 | max_impact f64
#     doc_ids: n_postings * u64
#     impacts: n_postings * f64, or n_postings * u16 when quantized
# Quantized impacts decode as q * max_impact / 65535 with q >= 1.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sHHQI")
_TERM_HEAD = struct.Struct("<I")
_LIST_HEAD = struct.Struct("<Qd")
_PAYLOAD_HEAD = struct.Struct("<QBd")


def _quantize(impacts: np.ndarray, max_impact: float) -> np.ndarray:
    q = np.rint(impacts / max_impact * 65535.0)
    return np.clip(q, 1, 65535).astype("<u2")


def _dequantize(q: np.ndarray, max_impact: float) -> np.ndarray:
    return q.astype(np.float64) * (max_impact / 65535.0)


def write_index(index: ImpactIndex, path: str | Path, quantize: bool = False) -> None:
    """Serialize an index; byte-identical for identical inputs.

    With ``quantize``, impacts are stored as 16-bit fractions of each
    list's max_impact; postings are re-ordered by their quantized value so
    the decoded list still satisfies the ordering invariants.
    """
    chunks: list[bytes] = []
    terms = sorted(index.lists)
    chunks.append(
        _PAYLOAD_HEAD.pack(
            index.doc_count,
            1 if index.build_config.require_term_in_doc else 0,
            index.build_config.df_cap_fraction,
        )
    )
    chunks.append(struct.pack("<Q", len(terms)))
    for term in terms:
        pl = index.lists[term]
        raw = term.encode("utf-8")
        chunks.append(_TERM_HEAD.pack(len(raw)))
        chunks.append(raw)
        chunks.append(_LIST_HEAD.pack(len(pl), pl.max_impact))
        doc_ids = np.array([p.doc_id for p in pl.postings], dtype="<u8")
        impacts = np.array([p.impact for p in pl.postings], dtype=np.float64)
        if quantize:
            q = _quantize(impacts, pl.max_impact)
            # re-sort by decoded value so ties obey doc_id ascending
            order = np.lexsort((doc_ids, -q.astype(np.int64)))
            doc_ids, q = doc_ids[order], q[order]
            chunks.append(doc_ids.tobytes())
            chunks.append(q.tobytes())
        else:
            chunks.append(doc_ids.tobytes())
            chunks.append(impacts.astype("<f8").tobytes())

    payload = b"".join(chunks)
    flags = 1 if quantize else 0
    header = _HEADER.pack(_MAGIC, _VERSION, flags, len(payload), zlib.crc32(payload))
    Path(path).write_bytes(header + payload)


def read_index(path: str | Path) -> ImpactIndex:
    """Load an index written by :func:`write_index`."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size or blob[:4] != _MAGIC:
        raise NotAnIndexFile(f"{path}: not an index file")
    magic, version, flags, payload_len, crc = _HEADER.unpack_from(blob)
    if version != _VERSION:
        raise IndexVersionMismatch(f"{path}: format version {version}, expected {_VERSION}")
    payload = blob[_HEADER.size:]
    if len(payload) < payload_len:
        raise TruncatedIndexFile(f"{path}: payload truncated ({len(payload)} of {payload_len} bytes)")
    payload = payload[:payload_len]
    if zlib.crc32(payload) != crc:
        raise IndexChecksumMismatch(f"{path}: payload checksum mismatch")

    quantized = bool(flags & 1)
    offset = 0
    try:
        doc_count, require_flag, cap_fraction = _PAYLOAD_HEAD.unpack_from(payload, offset)
        offset += _PAYLOAD_HEAD.size
        (n_terms,) = struct.unpack_from("<Q", payload, offset)
        offset += 8
        lists: dict[str, PostingList] = {}
        for _ in range(n_terms):
            (term_len,) = _TERM_HEAD.unpack_from(payload, offset)
            offset += _TERM_HEAD.size
            term = payload[offset : offset + term_len].decode("utf-8")
            offset += term_len
            n_postings, max_impact = _LIST_HEAD.unpack_from(payload, offset)
            offset += _LIST_HEAD.size
            doc_ids = np.frombuffer(payload, dtype="<u8", count=n_postings, offset=offset)
            offset += 8 * n_postings
            if quantized:
                q = np.frombuffer(payload, dtype="<u2", count=n_postings, offset=offset)
                offset += 2 * n_postings
                impacts = _dequantize(q, max_impact)
            else:
                impacts = np.frombuffer(payload, dtype="<f8", count=n_postings, offset=offset)
                offset += 8 * n_postings
            postings = [Posting(int(d), float(i)) for d, i in zip(doc_ids, impacts)]
            lists[term] = PostingList(term, postings)
    except (struct.error, ValueError) as exc:
        raise TruncatedIndexFile(f"{path}: payload ends mid-record: {exc}") from None
    constraints = BuildConstraints(bool(require_flag), cap_fraction)
    return ImpactIndex(lists, doc_count, constraints)
