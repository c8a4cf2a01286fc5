"""Build an impact-ordered BM25 index and search it.

Every (term, document) impact is computed once at index time; answering
a query is just summing stored numbers, so no scoring model runs here at
query time.
"""

from qtind import BuildConstraints, Bm25Scorer, Collection, Document, Query, build_index, retrieve_topk

collection = Collection(
    [
        Document(0, tuple("the quick brown fox jumps over the lazy dog".split())),
        Document(1, tuple("a quick recipe for brown bread".split())),
        Document(2, tuple("the dog sleeps all day".split())),
        Document(3, tuple("quick quick quick said the fox".split())),
    ]
)

index = build_index(collection, Bm25Scorer(collection), BuildConstraints(df_cap_fraction=1.0))

print("posting lists (impact-descending):")
for term in sorted(index.terms()):
    postings = ", ".join(f"(doc {p.doc_id}, {p.impact:.3f})" for p in index.posting_list(term))
    print(f"  {term:>7} -> {postings}")

query = Query(1, ("quick", "fox"))
top = retrieve_topk(query, index, k=3)
print(f"\ntop-{top.k} for {query.terms}:")
for rank, (doc_id, score) in enumerate(top.entries, start=1):
    print(f"  {rank}. doc {doc_id}  score {score:.3f}  text: {' '.join(collection.doc(doc_id).terms)}")
