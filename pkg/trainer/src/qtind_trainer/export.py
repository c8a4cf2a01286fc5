"""Export per-term scores in the engine's score-table TSV format.

Only (term, doc) pairs passing the precomputation constraints are
emitted: the term must be in the model vocabulary, must occur in the
document (unless relaxed), and its document frequency must not exceed
``ceil(df_cap_fraction * doc_count)``.  Raw scores may be negative; the
engine clamps at ingestion.  Output is sorted by (term, doc_id) and is
byte-identical for an identical model, so identical training seeds give
identical tables.
"""

from __future__ import annotations

import copy
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .model import TERM_INDEPENDENT, ModeError, ToyScorerModel


@dataclass(frozen=True)
class ExportConstraints:
    require_term_in_doc: bool = True
    df_cap_fraction: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.df_cap_fraction <= 1.0:
            raise ValueError(f"df_cap_fraction must be in (0, 1], got {self.df_cap_fraction}")

    def df_cap(self, doc_count: int) -> int:
        return math.ceil(self.df_cap_fraction * doc_count)


def export_score_table(
    model: ToyScorerModel,
    collection: dict[int, tuple[str, ...]],
    constraints: ExportConstraints,
    path: str | Path,
) -> int:
    """Write ``term<TAB>doc_id<TAB>score`` rows; returns the line count."""
    if model.mode != TERM_INDEPENDENT:
        raise ModeError("export requires a term_independent-mode model")
    if not collection:
        raise ValueError("empty collection")

    df: Counter[str] = Counter()
    for terms in collection.values():
        df.update(set(terms))
    cap = constraints.df_cap(len(collection))
    eligible = {t for t in model.vocab if df[t] <= cap}

    # float64 copy: scores are formatted to 6 decimals, and double precision
    # keeps the formatting independent of accumulation details.
    scorer = copy.deepcopy(model).double().eval()

    rows: list[tuple[str, int, float]] = []
    for doc_id in sorted(collection):
        doc_terms = collection[doc_id]
        if constraints.require_term_in_doc:
            terms = sorted(set(doc_terms) & eligible)
        else:
            terms = sorted(eligible)
        if not terms:
            continue
        scores = scorer.score_terms_for_doc(terms, doc_terms)
        rows.extend((term, doc_id, score) for term, score in zip(terms, scores))

    rows.sort(key=lambda r: (r[0], r[1]))
    with Path(path).open("w", encoding="utf-8") as fh:
        for term, doc_id, score in rows:
            fh.write(f"{term}\t{doc_id}\t{score:.6f}\n")
    return len(rows)
