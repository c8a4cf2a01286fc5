"""Kernel-pooled embedding scorer with two evaluation granularities.

One architecture backs both variants: cosine similarities between query
and passage term embeddings are pooled through Gaussian kernels into
per-query-term features, which a small tanh head turns into a score.

- ``full_query`` mode pools features across all query terms before the
  head, so the score depends jointly on the whole query.
- ``term_independent`` mode applies the head to one query term at a
  time; a multi-term query is scored as the sum of its per-term scores,
  which is exactly what the engine's accumulator computes from an
  exported score table.
"""

from __future__ import annotations

from typing import Sequence

import torch
from torch import nn

from .data import TrainingTriple

FULL_QUERY = "full_query"
TERM_INDEPENDENT = "term_independent"

DEFAULT_KERNEL_MUS = (-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9, 1.0)


class ModeError(RuntimeError):
    """An operation was invoked on a model in the wrong structural mode."""


class ToyScorerModel(nn.Module):
    def __init__(
        self,
        vocab: dict[str, int],
        mode: str = TERM_INDEPENDENT,
        dim: int = 24,
        hidden: int = 16,
        kernel_mus: Sequence[float] = DEFAULT_KERNEL_MUS,
        kernel_sigma: float = 0.1,
        relu_output: bool = False,
        seed: int = 0,
    ):
        super().__init__()
        if mode not in (FULL_QUERY, TERM_INDEPENDENT):
            raise ValueError(f"unknown mode {mode!r}")
        self.vocab = vocab
        self.mode = mode
        self.relu_output = relu_output
        self.kernel_sigma = kernel_sigma
        self.config = {
            "mode": mode,
            "dim": dim,
            "hidden": hidden,
            "kernel_mus": tuple(kernel_mus),
            "kernel_sigma": kernel_sigma,
            "relu_output": relu_output,
        }
        torch.manual_seed(seed)
        self.embedding = nn.Embedding(len(vocab) + 1, dim, padding_idx=0)
        nn.init.normal_(self.embedding.weight, std=0.3)
        with torch.no_grad():
            self.embedding.weight[0].zero_()
        self.register_buffer("kernel_mu", torch.tensor(list(kernel_mus)))
        self.hidden = nn.Linear(len(kernel_mus), hidden)
        self.out = nn.Linear(hidden, 1)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def ids(self, terms: Sequence[str]) -> list[int]:
        return [self.vocab.get(t, 0) for t in terms]

    def _pad(self, batches: list[list[int]]) -> torch.Tensor:
        width = max(1, max((len(b) for b in batches), default=1))
        device = self.embedding.weight.device
        padded = torch.zeros(len(batches), width, dtype=torch.long, device=device)
        for i, ids in enumerate(batches):
            if ids:
                padded[i, : len(ids)] = torch.tensor(ids, dtype=torch.long, device=device)
        return padded

    def _term_features(self, q_ids: torch.Tensor, d_ids: torch.Tensor):
        """Kernel-pooled features per query term: (B, Lq, K) and the query mask."""
        q_mask = (q_ids != 0).to(self.embedding.weight.dtype)
        d_mask = (d_ids != 0).to(self.embedding.weight.dtype)
        e_q = nn.functional.normalize(self.embedding(q_ids), dim=-1, eps=1e-10)
        e_d = nn.functional.normalize(self.embedding(d_ids), dim=-1, eps=1e-10)
        cos = torch.bmm(e_q, e_d.transpose(1, 2))  # (B, Lq, Ld)
        diff = cos.unsqueeze(-1) - self.kernel_mu
        kernels = torch.exp(-(diff**2) / (2.0 * self.kernel_sigma**2))
        kernels = kernels * d_mask[:, None, :, None]
        pooled = torch.log1p(kernels.sum(dim=2))  # (B, Lq, K)
        return pooled * q_mask[..., None], q_mask

    def _head(self, features: torch.Tensor) -> torch.Tensor:
        score = self.out(torch.tanh(self.hidden(features))).squeeze(-1)
        return torch.relu(score) if self.relu_output else score

    def batch_scores(self, queries: list[list[int]], docs: list[list[int]]) -> torch.Tensor:
        """Scores for aligned (query, doc) id lists, shape (B,)."""
        features, q_mask = self._term_features(self._pad(queries), self._pad(docs))
        if self.mode == FULL_QUERY:
            return self._head(features.sum(dim=1))
        return (self._head(features) * q_mask).sum(dim=1)

    # Single-pair conveniences (used by margins, export, and oracles).

    def score_full(self, query_terms: Sequence[str], doc_terms: Sequence[str]) -> float:
        if self.mode != FULL_QUERY:
            raise ModeError("score_full requires a full_query-mode model")
        with torch.no_grad():
            return float(self.batch_scores([self.ids(query_terms)], [self.ids(doc_terms)])[0])

    def score_term(self, term: str, doc_terms: Sequence[str]) -> float:
        """phi(t, d): exactly one query term per forward evaluation."""
        if self.mode != TERM_INDEPENDENT:
            raise ModeError("score_term requires a term_independent-mode model")
        with torch.no_grad():
            return float(self.batch_scores([self.ids([term])], [self.ids(doc_terms)])[0])

    def score_terms_for_doc(self, terms: Sequence[str], doc_terms: Sequence[str]) -> list[float]:
        """phi(t, d) for many terms against one document, in one forward pass."""
        if self.mode != TERM_INDEPENDENT:
            raise ModeError("score_terms_for_doc requires a term_independent-mode model")
        with torch.no_grad():
            doc = self.ids(doc_terms)
            scores = self.batch_scores([[i] for i in self.ids(terms)], [doc] * len(terms))
            return [float(s) for s in scores]

    def score_query_term_independent(self, query_terms: Sequence[str], doc_terms: Sequence[str]) -> float:
        """Sum of per-term scores for a multi-term query, evaluated batched."""
        if self.mode != TERM_INDEPENDENT:
            raise ModeError("score_query_term_independent requires a term_independent-mode model")
        with torch.no_grad():
            features, q_mask = self._term_features(
                self._pad([self.ids(query_terms)]), self._pad([self.ids(doc_terms)])
            )
            return float(((self._head(features) * q_mask).sum(dim=1))[0])


def pair_margin_full(model: ToyScorerModel, triple: TrainingTriple) -> float:
    """phi(q, d+) - phi(q, d-) for a whole-query model."""
    if model.mode != FULL_QUERY:
        raise ModeError("pair_margin_full requires a full_query-mode model")
    return model.score_full(triple.query, triple.pos_doc) - model.score_full(triple.query, triple.neg_doc)


def pair_margin_term_ind(model: ToyScorerModel, triple: TrainingTriple) -> float:
    """Sum over query term occurrences of phi(t, d+) - phi(t, d-)."""
    if model.mode != TERM_INDEPENDENT:
        raise ModeError("pair_margin_term_ind requires a term_independent-mode model")
    return sum(
        model.score_term(t, triple.pos_doc) - model.score_term(t, triple.neg_doc)
        for t in triple.query
    )


def save_model(model: ToyScorerModel, path) -> None:
    torch.save(
        {"config": model.config, "vocab": model.vocab, "state_dict": model.state_dict()},
        path,
    )


def load_model(path) -> ToyScorerModel:
    payload = torch.load(path, weights_only=True)
    config = dict(payload["config"])
    model = ToyScorerModel(payload["vocab"], **config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
