"""Safe pruning over impact-ordered lists.

Because each list is stored impact-descending and carries its maximum,
the evaluator can prove mid-query that no unseen document can reach the
top k, and stop scanning.  The pruned path returns exactly the
exhaustive result while touching far fewer postings when impact mass is
skewed across terms.
"""

from qtind import BuildConstraints, Bm25Scorer, build_index, retrieve_topk, retrieve_topk_pruned
from qtind.synth import synthetic_workload

data = synthetic_workload(n_docs=2000, n_queries=25, seed=9)
index = build_index(data.collection, Bm25Scorer(data.collection), BuildConstraints(df_cap_fraction=1.0))

total_full = total_pruned = 0
mismatches = 0
for query in data.queries:
    full = retrieve_topk(query, index, k=10)
    pruned = retrieve_topk_pruned(query, index, k=10)
    if pruned.entries != full.entries:
        mismatches += 1
    total_full += full.postings_scanned
    total_pruned += pruned.postings_scanned

print(f"queries evaluated:        {len(data.queries)}")
print(f"result mismatches:        {mismatches}")
print(f"postings scanned (full):  {total_full}")
print(f"postings scanned (pruned): {total_pruned}")
print(f"scan reduction:           {100 * (1 - total_pruned / total_full):.1f}%")
