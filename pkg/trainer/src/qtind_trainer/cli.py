"""Trainer command line: ``train`` a scorer, ``export`` its score table."""

from __future__ import annotations

import argparse
import sys

from .data import build_vocab, load_collection_tsv, load_triples
from .export import ExportConstraints, export_score_table
from .losses import LossConfig
from .model import FULL_QUERY, TERM_INDEPENDENT, ToyScorerModel, load_model, save_model
from .training import TrainConfig, train

_MODES = {"full": FULL_QUERY, "term-ind": TERM_INDEPENDENT}


def _cmd_train(args: argparse.Namespace) -> int:
    triples = load_triples(args.triples)
    vocab = build_vocab(triples)
    model = ToyScorerModel(
        vocab,
        mode=_MODES[args.mode],
        dim=args.dim,
        hidden=args.hidden,
        relu_output=args.relu_output,
        seed=args.seed,
    )
    loss_cfg = LossConfig(kind=args.loss, sigma=args.sigma, margin=args.margin)
    config = TrainConfig(epochs=args.epochs, lr=args.lr, batch_size=args.batch_size, seed=args.seed)
    history = train(model, triples, loss_cfg, config)
    save_model(model, args.out)
    print(
        f"trained {args.mode} model on {len(triples)} triples "
        f"({model.parameter_count()} parameters); "
        f"loss {history[0]:.4f} -> {history[-1]:.4f}; saved to {args.out}"
    )
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    collection = load_collection_tsv(args.collection)
    constraints = ExportConstraints(
        require_term_in_doc=args.require_term_in_doc,
        df_cap_fraction=args.df_cap,
    )
    lines = export_score_table(model, collection, constraints, args.out)
    print(f"exported {lines} (term, doc, score) rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtind-trainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a per-term scorer on pairwise triples")
    p.add_argument("--triples", required=True, help="query<TAB>pos_passage<TAB>neg_passage TSV")
    p.add_argument("--mode", choices=sorted(_MODES), default="term-ind")
    p.add_argument("--loss", choices=("ranknet", "hinge"), default="ranknet")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.02)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--dim", type=int, default=24)
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--relu-output", action="store_true",
                   help="train with a rectified output (study of ingestion clamping)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("export", help="precompute a score table for a collection")
    p.add_argument("--model", required=True)
    p.add_argument("--collection", required=True)
    p.add_argument("--df-cap", type=float, default=0.05)
    p.add_argument(
        "--require-term-in-doc",
        action=argparse.BooleanOptionalAction,
        default=True,
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
