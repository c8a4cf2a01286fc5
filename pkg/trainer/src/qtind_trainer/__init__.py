"""Pairwise trainer producing per-term score tables for the qtind engine.

The only contract with the engine is the score-table TSV
(``term<TAB>doc_id<TAB>score``) plus the shared collection file format;
nothing here imports the engine.
"""

from .data import TrainingTriple, build_vocab, load_collection_tsv, load_triples
from .export import ExportConstraints, export_score_table
from .losses import LossConfig, hinge_loss, ranknet_loss
from .model import (
    FULL_QUERY,
    TERM_INDEPENDENT,
    ModeError,
    ToyScorerModel,
    load_model,
    pair_margin_full,
    pair_margin_term_ind,
    save_model,
)
from .training import TrainConfig, TrainingDiverged, evaluate_loss, gradient_check, train

__version__ = "0.1.0"

__all__ = [
    "TrainingTriple",
    "build_vocab",
    "load_collection_tsv",
    "load_triples",
    "ExportConstraints",
    "export_score_table",
    "LossConfig",
    "hinge_loss",
    "ranknet_loss",
    "FULL_QUERY",
    "TERM_INDEPENDENT",
    "ModeError",
    "ToyScorerModel",
    "load_model",
    "pair_margin_full",
    "pair_margin_term_ind",
    "save_model",
    "TrainConfig",
    "TrainingDiverged",
    "evaluate_loss",
    "gradient_check",
    "train",
]
