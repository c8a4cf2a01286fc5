"""Ingest an externally produced score table into the engine.

A trainer (or any offline process) hands the engine a sparse TSV of
(term, doc_id, raw_score) triples.  Ingestion clamps negatives to zero,
drops pairs whose term never occurs in the document, and applies the
document-frequency cap; what remains becomes an ordinary impact index.
"""

import tempfile
from pathlib import Path

from qtind import (
    BuildConstraints,
    CandidateSet,
    Collection,
    Document,
    Query,
    index_from_table,
    load_score_table,
    rerank,
)

collection = Collection(
    [
        Document(0, ("solar", "panel", "efficiency")),
        Document(1, ("wind", "turbine", "blades")),
        Document(2, ("solar", "storage", "battery")),
    ]
)

table_tsv = """\
solar\t0\t1.80
solar\t2\t0.95
battery\t2\t1.20
battery\t1\t-0.40
turbine\t1\t0.70
turbine\t0\t0.55
"""
# battery@1 is negative (clamps away); turbine@0 names a term doc 0 lacks.

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "scores.tsv"
    path.write_text(table_tsv)
    table = load_score_table(path)

index = index_from_table(collection, table, BuildConstraints(df_cap_fraction=1.0))
print(f"ingested {len(table)} table entries")
print(f"discarded (term absent from doc): {index.table_entries_discarded}")
print("surviving postings:")
for term in sorted(index.terms()):
    for p in index.posting_list(term):
        print(f"  ({term}, doc {p.doc_id}) -> {p.impact}")

query = Query(7, ("solar", "battery"))
ranked = rerank(query, CandidateSet(7, (0, 1, 2)), index)
print(f"\nrerank for {query.terms}: {ranked.entries}")
print("doc 1 scores zero but is kept: a re-ranking is a total order over its candidates")
