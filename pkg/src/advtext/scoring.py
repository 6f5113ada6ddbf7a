"""Word contribution scores and the descending ranking that drives the attack."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import (
    Model,
    gradient_from_embeddings,
    proba_from_embeddings,
    proba_from_pooled,
)
from .errors import EmptyDocument, IndexOutOfRange
from .textcore import Document

METHODS = ("loo", "grad")
GRAD_SCALARS = ("dot", "l2")


@dataclass(frozen=True)
class ContributionScore:
    position: int
    word: str
    score: float
    method: str

    def to_dict(self):
        return {"position": self.position, "word": self.word, "score": self.score, "method": self.method}


@dataclass(frozen=True)
class ContributionRanking:
    doc_id: str
    label: str
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def max_score(self) -> float:
        return self.entries[0].score if self.entries else 0.0


def _check(doc, k):
    if len(doc) == 0:
        raise EmptyDocument(f"document {doc.id!r} has no tokens")
    if not 0 <= k < len(doc):
        raise IndexOutOfRange(f"token index {k} out of range for document of length {len(doc)}")


def _loo_value(p, p_without, i):
    """Two-branch removal contribution for predicted class ``i``."""
    j = int(np.argmax(p_without))
    if j == i:
        return float(p[i] - p_without[i])
    return float(p[i] + p_without[j])


def _proba_without(model, E, k):
    if len(E) == 1:
        return np.full(2, 0.5)
    return proba_from_embeddings(model, np.delete(E, k, axis=0))


def score_loo(model: Model, doc: Document, k: int) -> float:
    """Change in the predicted class's posterior when token ``k`` is deleted.

    If the deletion flips the prediction to the other class, the score is the
    original posterior plus the new class's posterior instead.
    """
    _check(doc, k)
    E = model.embed(doc)
    p = proba_from_embeddings(model, E)
    return _loo_value(p, _proba_without(model, E, k), int(np.argmax(p)))


def score_grad(model: Model, doc: Document, k: int, scalar: str = "dot") -> float:
    """Gradient saliency of token ``k`` against the predicted class.

    ``dot`` gives -grad . e_k, the first-order loss increase from zeroing the
    token's embedding; ``l2`` gives the gradient norm.
    """
    _check(doc, k)
    E = model.embed(doc)
    return float(_grad_scores(model, E, [k], scalar)[0])


def _grad_scores(model, E, positions, scalar):
    if scalar not in GRAD_SCALARS:
        raise ValueError(f"grad scalar must be one of {GRAD_SCALARS}")
    i = int(np.argmax(proba_from_embeddings(model, E)))
    G = gradient_from_embeddings(model, E, i)[positions]
    if scalar == "l2":
        return np.linalg.norm(G, axis=1)
    return -np.einsum("ij,ij->i", G, E[positions])


def _loo_scores(model, E, positions):
    p = proba_from_embeddings(model, E)
    i = int(np.argmax(p))
    n = len(E)
    if model.config.architecture == "mean-pool" and n > 1:
        pooled = (E.sum(axis=0) - E[positions]) / (n - 1)
        rest = proba_from_pooled(model, pooled)
    else:
        rest = [_proba_without(model, E, k) for k in positions]
    return np.array([_loo_value(p, q, i) for q in rest])


def rank_words(model: Model, doc: Document, method: str = "loo", grad_scalar: str = "dot") -> ContributionRanking:
    """Score every non-punctuation token against the predicted label; sort descending."""
    if len(doc) == 0:
        raise EmptyDocument(f"document {doc.id!r} has no tokens")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    E = model.embed(doc)
    label = model.label_order[int(np.argmax(proba_from_embeddings(model, E)))]
    positions = [t.position for t in doc.tokens if t.is_word]
    if not positions:
        return ContributionRanking(doc.id, label, ())
    if method == "loo":
        scores = _loo_scores(model, E, positions)
    else:
        scores = _grad_scores(model, E, positions, grad_scalar)
    entries = [
        ContributionScore(k, doc.tokens[k].normalized, float(s), method)
        for k, s in zip(positions, scores)
    ]
    entries.sort(key=lambda e: (-e.score, e.position))
    return ContributionRanking(doc.id, label, tuple(entries))
