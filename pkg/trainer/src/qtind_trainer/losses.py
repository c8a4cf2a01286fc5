"""Pairwise instance losses over the score margin of a (pos, neg) document pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F


def ranknet_loss(delta, sigma: float = 1.0):
    """log(1 + exp(-sigma * delta)), stable for large |delta|.

    Accepts a float or a tensor; the tensor path is differentiable.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if isinstance(delta, torch.Tensor):
        return F.softplus(-sigma * delta)
    x = -sigma * float(delta)
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


def hinge_loss(delta, epsilon: float = 1.0):
    """max(0, epsilon - delta)."""
    if isinstance(delta, torch.Tensor):
        return torch.clamp(epsilon - delta, min=0.0)
    return max(0.0, epsilon - float(delta))


@dataclass(frozen=True)
class LossConfig:
    kind: str = "ranknet"
    sigma: float = 1.0
    margin: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("ranknet", "hinge"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.sigma <= 0 or self.margin <= 0:
            raise ValueError("sigma and margin must be > 0")

    def __call__(self, delta):
        if self.kind == "ranknet":
            return ranknet_loss(delta, self.sigma)
        return hinge_loss(delta, self.margin)
