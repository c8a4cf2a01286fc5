"""Minibatch pairwise training and a finite-difference gradient check."""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import torch

from .data import TrainingTriple
from .losses import LossConfig
from .model import ToyScorerModel


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    lr: float = 0.02
    batch_size: int = 32
    seed: int = 0


def _batch_margins(model: ToyScorerModel, triples: list[TrainingTriple]) -> torch.Tensor:
    queries = [model.ids(t.query) for t in triples]
    pos = [model.ids(t.pos_doc) for t in triples]
    neg = [model.ids(t.neg_doc) for t in triples]
    return model.batch_scores(queries, pos) - model.batch_scores(queries, neg)


def evaluate_loss(model: ToyScorerModel, triples: list[TrainingTriple], loss_cfg: LossConfig) -> float:
    """Mean instance loss over a triple set, without gradients."""
    with torch.no_grad():
        return float(loss_cfg(_batch_margins(model, triples)).mean())


def train(
    model: ToyScorerModel,
    triples: list[TrainingTriple],
    loss_cfg: LossConfig = LossConfig(),
    config: TrainConfig = TrainConfig(),
) -> list[float]:
    """Optimize the model in place; returns the mean loss per epoch."""
    if not triples:
        raise ValueError("empty triple stream")
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    history: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(triples))
        epoch_losses: list[float] = []
        for start in range(0, len(order), config.batch_size):
            batch = [triples[i] for i in order[start : start + config.batch_size]]
            loss = loss_cfg(_batch_margins(model, batch)).mean()
            if not torch.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}, step {start // config.batch_size}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_losses.append(loss.item())
        history.append(sum(epoch_losses) / len(epoch_losses))
    model.eval()
    return history


def gradient_check(
    model: ToyScorerModel,
    triples: list[TrainingTriple],
    loss_cfg: LossConfig = LossConfig(),
    n_coords: int = 25,
    eps: float = 1e-5,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Runs in float64 on a copy of the model; samples ``n_coords`` random
    parameter coordinates.
    """
    work = copy.deepcopy(model).double()
    params = [p for p in work.parameters() if p.requires_grad]

    def batch_loss() -> torch.Tensor:
        return loss_cfg(_batch_margins(work, triples)).mean()

    loss = batch_loss()
    grads = torch.autograd.grad(loss, params)

    rng = np.random.default_rng(seed)
    sizes = [p.numel() for p in params]
    total = sum(sizes)
    worst = 0.0
    with torch.no_grad():
        for flat_index in rng.choice(total, size=min(n_coords, total), replace=False):
            remaining = int(flat_index)
            for param, grad, size in zip(params, grads, sizes):
                if remaining < size:
                    break
                remaining -= size
            flat = param.view(-1)
            original = float(flat[remaining])
            flat[remaining] = original + eps
            plus = float(batch_loss())
            flat[remaining] = original - eps
            minus = float(batch_loss())
            flat[remaining] = original
            fd = (plus - minus) / (2.0 * eps)
            analytic = float(grad.view(-1)[remaining])
            err = abs(fd - analytic) / max(abs(fd), abs(analytic), 1e-8)
            worst = max(worst, err)
    return worst
