"""Command-line pipelines over the retrieval engine.

Subcommands: index, import-scores, search, rerank, telescope, eval,
compare, selfcheck.  Exit codes: 0 success, 1 usage error, 2 data error,
3 invariant/check failure.  Flags take precedence over the QTIND_THREADS
and QTIND_SEED environment variables, which take precedence over
defaults; effective settings are echoed as a ``# config`` header.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .corpus import CandidateSet, LoadError, load_candidates, load_collection, load_qrels, load_queries
from .evaluation import mrr_at_k, paired_ttest, recall_at_k
from .index import BuildConstraints, BuildError, IndexLoadError, build_index, index_from_table, read_index, write_index
from .query_eval import rerank, retrieve_topk, retrieve_topk_pruned
from .runfile import read_run, write_run
from .scoring import Bm25Params, Bm25Scorer, load_score_table
from .selfcheck import run_end_to_end_check

__all__ = ["main"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: A003 - argparse API
        raise UsageError(f"{self.prog}: {message}")


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not an integer") from None


def _echo_config(args: argparse.Namespace, extra: dict | None = None, file=sys.stderr) -> None:
    pairs = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    if extra:
        pairs.update(extra)
    print("# config: " + " ".join(f"{k}={v}" for k, v in pairs.items()), file=file)


def _constraints(args: argparse.Namespace) -> BuildConstraints:
    try:
        return BuildConstraints(
            require_term_in_doc=args.require_term_in_doc,
            df_cap_fraction=args.df_cap,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _default_tag(prefix: str, constraints: BuildConstraints) -> str:
    scope = "indoc" if constraints.require_term_in_doc else "allpairs"
    return f"{prefix}_cap{constraints.df_cap_fraction:g}_{scope}"


def _cmd_index(args: argparse.Namespace) -> int:
    if args.scorer == "table" and args.table is None:
        raise UsageError("--scorer table requires --table")
    if args.scorer == "bm25" and args.table is not None:
        raise UsageError("--table is only valid with --scorer table")
    _echo_config(args)
    constraints = _constraints(args)
    collection = load_collection(args.collection)
    if args.scorer == "bm25":
        index = build_index(collection, Bm25Scorer(collection, Bm25Params(args.k1, args.b)), constraints)
    else:
        index = index_from_table(collection, load_score_table(args.table), constraints)
        if index.table_entries_discarded:
            print(
                f"# warning: discarded {index.table_entries_discarded} table entries "
                "whose term is absent from the document",
                file=sys.stderr,
            )
    write_index(index, args.out, quantize=args.quantize)
    print(
        f"# indexed {len(index.lists)} terms, {index.total_postings()} postings -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_import_scores(args: argparse.Namespace) -> int:
    args.scorer = "table"
    return _cmd_index(args)


def _map_queries(fn, queries, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, queries))
    return [fn(q) for q in queries]


def _cmd_search(args: argparse.Namespace) -> int:
    threads = args.threads if args.threads is not None else _env_int("QTIND_THREADS", 1)
    _echo_config(args, {"threads": threads})
    index = read_index(args.index)
    queries = load_queries(args.queries)
    retrieve = retrieve_topk_pruned if args.pruned else retrieve_topk
    results = _map_queries(lambda q: retrieve(q, index, args.k, dedup=args.dedup), queries, threads)
    tag = args.tag or _default_tag("search", index.build_config)
    write_run(results, args.out, tag)
    scanned = sum(r.postings_scanned for r in results)
    print(f"# wrote {len(results)} ranked lists to {args.out} (postings scanned: {scanned})", file=sys.stderr)
    return 0


def _rerank_source(args: argparse.Namespace):
    if (args.index is None) == (args.table is None):
        raise UsageError("exactly one of --index or --table is required")
    if args.index is not None:
        return read_index(args.index), "index"
    return load_score_table(args.table), "table"


def _cmd_rerank(args: argparse.Namespace) -> int:
    threads = args.threads if args.threads is not None else _env_int("QTIND_THREADS", 1)
    _echo_config(args, {"threads": threads})
    source, kind = _rerank_source(args)
    queries = {q.query_id: q for q in load_queries(args.queries)}
    candidates = load_candidates(args.candidates)
    missing = sorted(set(candidates) - set(queries))
    if missing:
        raise LoadError(f"candidates reference queries missing from the query file: {missing[:10]}")
    items = sorted(candidates.values(), key=lambda c: c.query_id)
    results = _map_queries(
        lambda c: rerank(queries[c.query_id], c, source, args.k, dedup=args.dedup), items, threads
    )
    tag = args.tag or (kind if kind == "table" else _default_tag("rerank", source.build_config))
    write_run(results, args.out, tag)
    print(f"# wrote {len(results)} reranked lists to {args.out}", file=sys.stderr)
    return 0


def _cmd_telescope(args: argparse.Namespace) -> int:
    threads = args.threads if args.threads is not None else _env_int("QTIND_THREADS", 1)
    _echo_config(args, {"threads": threads})
    stage1 = read_index(args.stage1_index)
    queries = load_queries(args.queries)
    retrieve = retrieve_topk_pruned if args.pruned else retrieve_topk
    stage1_runs = _map_queries(lambda q: retrieve(q, stage1, args.k1, dedup=args.dedup), queries, threads)

    if args.qrels:
        qrels = load_qrels(args.qrels)
        report = recall_at_k({r.query_id: r for r in stage1_runs}, qrels, args.k1)
        print(f"stage1 recall@{args.k1} = {report.mean:.4f} over {report.query_count} queries")

    if args.stage2_index is None and args.stage2_table is None:
        write_run(stage1_runs, args.out, args.tag or "telescope_stage1")
        print(f"# no stage-2 source; wrote stage-1 run to {args.out}", file=sys.stderr)
        return 0

    stage2 = read_index(args.stage2_index) if args.stage2_index else load_score_table(args.stage2_table)
    by_qid = {q.query_id: q for q in queries}
    final = _map_queries(
        lambda r: rerank(
            by_qid[r.query_id], CandidateSet(r.query_id, tuple(r.doc_ids())), stage2, args.k, dedup=args.dedup
        ),
        [r for r in stage1_runs if r.entries],
        threads,
    )
    write_run(final, args.out, args.tag or "telescope")
    print(f"# wrote {len(final)} telescoped lists to {args.out}", file=sys.stderr)
    return 0


def _parse_metric(spec: str) -> tuple[str, int]:
    name, _, depth = spec.partition("@")
    if name not in ("mrr", "recall") or not depth.isdigit():
        raise UsageError(f"unknown metric {spec!r}; expected mrr@K or recall@K")
    return name, int(depth)


def _evaluate_run(path: str, qrels, metric_spec: str):
    name, depth = _parse_metric(metric_spec)
    run = read_run(path)
    return mrr_at_k(run, qrels, depth) if name == "mrr" else recall_at_k(run, qrels, depth)


def _cmd_eval(args: argparse.Namespace) -> int:
    _echo_config(args, file=sys.stdout)
    report = _evaluate_run(args.run, load_qrels(args.qrels), args.metric)
    print(f"{report.metric} = {report.mean:.4f} over {report.query_count} queries")
    if report.skipped_run_queries:
        print(f"# skipped {report.skipped_run_queries} run queries without judgments")
    if args.per_query:
        with Path(args.per_query).open("w", encoding="utf-8") as fh:
            for qid, value in sorted(report.per_query.items()):
                fh.write(f"{qid}\t{value:.6f}\n")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    _echo_config(args, file=sys.stdout)
    qrels = load_qrels(args.qrels)
    report_a = _evaluate_run(args.run_a, qrels, args.metric)
    report_b = _evaluate_run(args.run_b, qrels, args.metric)
    t, p = paired_ttest(report_a.per_query, report_b.per_query)
    print(f"run-a {report_a.metric} = {report_a.mean:.4f} over {report_a.query_count} queries")
    print(f"run-b {report_b.metric} = {report_b.mean:.4f} over {report_b.query_count} queries")
    print(f"paired t = {t:.4f}, two-sided p = {p:.4f}")
    return 0


def _cmd_selfcheck(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _env_int("QTIND_SEED", 0)
    _echo_config(args, {"seed": seed}, file=sys.stdout)
    results = run_end_to_end_check(
        n_docs=args.docs, n_queries=args.queries, k=args.k, seed=seed, inject_fault=args.inject_fault
    )
    failed = [r for r in results if not r.ok]
    for r in results:
        status = "ok" if r.ok else f"FAIL ({r.detail})"
        print(f"check {r.name}: {status}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def build_parser() -> _Parser:
    parser = _Parser(prog="qtind", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_constraint_flags(p: _Parser) -> None:
        p.add_argument("--df-cap", type=float, default=0.05, help="drop terms with df > ceil(cap * N)")
        p.add_argument(
            "--require-term-in-doc",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="only score (term, doc) pairs where the term occurs in the doc",
        )

    p = sub.add_parser("index", help="build an impact index from a collection")
    p.add_argument("--collection", required=True)
    p.add_argument("--scorer", choices=("bm25", "table"), default="bm25")
    p.add_argument("--table", help="score table TSV (with --scorer table)")
    p.add_argument("--k1", type=float, default=1.2)
    p.add_argument("--b", type=float, default=0.75)
    add_constraint_flags(p)
    p.add_argument("--quantize", action="store_true", help="store impacts as 16-bit fractions of max_impact")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("import-scores", help="build an impact index from a score table")
    p.add_argument("--collection", required=True)
    p.add_argument("--table", required=True)
    add_constraint_flags(p)
    p.add_argument("--quantize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_import_scores, scorer="table", k1=1.2, b=0.75)

    p = sub.add_parser("search", help="retrieve top-k from the full collection")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--pruned", action="store_true", help="use the safe pruned evaluation path")
    p.add_argument("--dedup", action="store_true", help="deduplicate query terms before scoring")
    p.add_argument("--threads", type=int, help="worker threads (default: QTIND_THREADS or 1)")
    p.add_argument("--tag")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("rerank", help="re-rank a candidates file")
    p.add_argument("--index")
    p.add_argument("--table")
    p.add_argument("--candidates", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("--tag")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("telescope", help="stage-1 retrieval feeding stage-2 re-ranking")
    p.add_argument("--stage1-index", required=True)
    p.add_argument("--stage2-index")
    p.add_argument("--stage2-table")
    p.add_argument("--queries", required=True)
    p.add_argument("--qrels", help="report stage-1 recall against these judgments")
    p.add_argument("--k1", type=int, default=1000, help="stage-1 candidate depth")
    p.add_argument("--k", type=int, default=1000, help="final run depth")
    p.add_argument("--pruned", action="store_true")
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("--tag")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_telescope)

    p = sub.add_parser("eval", help="score a run file against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metric", default="mrr@10", help="mrr@K or recall@K")
    p.add_argument("--per-query", help="write per-query values to this TSV")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare", help="compare two runs with a paired t-test")
    p.add_argument("--run-a", required=True)
    p.add_argument("--run-b", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metric", default="mrr@10")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("selfcheck", help="generate synthetic data and verify every stage")
    p.add_argument("--docs", type=int, default=500)
    p.add_argument("--queries", type=int, default=50)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, help="default: QTIND_SEED or 0")
    p.add_argument("--inject-fault", choices=("posting-order",), help="corrupt one posting to prove checks fire")
    p.set_defaults(func=_cmd_selfcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LoadError, BuildError, IndexLoadError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
