"""Attack-quality metrics and adversarial retraining."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .attack import AttackConfig, AttackResult, craft
from .candidates import KeywordSets
from .classifier import Model, ModelConfig, predict_proba, train
from .errors import LengthMismatch
from .lexicons import Lexicons, semantic_similarity
from .textcore import Corpus, Document

log = logging.getLogger(__name__)

__all__ = [
    "EvalReport",
    "RetrainResult",
    "accuracy",
    "cumulative_successes",
    "evaluate_attack",
    "markdown_table",
    "retrain_with_adversarial",
    "semantic_similarity",
    "write_histogram_csv",
]


@dataclass
class EvalReport:
    accuracy_original: float
    accuracy_adversarial: float
    perturbed_fraction: float
    mean_similarity: Optional[float]
    mean_changes: Optional[float]
    changes_histogram: dict
    n_documents: int
    n_successes: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy_original": self.accuracy_original,
            "accuracy_adversarial": self.accuracy_adversarial,
            "perturbed_fraction": self.perturbed_fraction,
            "mean_similarity": self.mean_similarity,
            "mean_changes": self.mean_changes,
            "changes_histogram": {str(k): v for k, v in sorted(self.changes_histogram.items())},
            "n_documents": self.n_documents,
            "n_successes": self.n_successes,
            "config": self.config,
        }


def _predicted(model, doc):
    return model.label_order[int(np.argmax(predict_proba(model, doc)))]


def accuracy(model: Model, docs: Sequence[Document]) -> float:
    if not docs:
        return 0.0
    return sum(_predicted(model, d) == d.label for d in docs) / len(docs)


def evaluate_attack(model: Model, corpus, results: Sequence[AttackResult],
                    config: Optional[dict] = None) -> EvalReport:
    """Accuracy before/after the attack, flip rate, similarity and edit counts.

    A failed attack contributes its unmodified document to the adversarial
    accuracy; similarity and edit counts are averaged over successes only.
    """
    docs = list(corpus.documents if isinstance(corpus, Corpus) else corpus)
    if len(docs) != len(results):
        raise LengthMismatch(f"{len(docs)} documents but {len(results)} attack results")
    for d, r in zip(docs, results):
        if d.id != r.original.id:
            raise LengthMismatch(f"result for {r.original.id!r} aligned with document {d.id!r}")
    adversarial = [r.adversarial if r.success else r.original for r in results]
    wins = [r for r in results if r.success]
    hist = {}
    for r in wins:
        hist[r.n_changes] = hist.get(r.n_changes, 0) + 1
    return EvalReport(
        accuracy_original=accuracy(model, docs),
        accuracy_adversarial=accuracy(model, adversarial),
        perturbed_fraction=len(wins) / len(docs) if docs else 0.0,
        mean_similarity=float(np.mean([r.similarity for r in wins])) if wins else None,
        mean_changes=sum(k * v for k, v in hist.items()) / len(wins) if wins else None,
        changes_histogram=hist,
        n_documents=len(docs),
        n_successes=len(wins),
        config=dict(config or {}),
    )


def cumulative_successes(report: EvalReport, max_changes: int) -> list:
    """Number of successful samples reached within 1..max_changes edits."""
    out, running = [], 0
    for k in range(1, max_changes + 1):
        running += report.changes_histogram.get(k, 0)
        out.append(running)
    return out


def write_histogram_csv(report: EvalReport, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["edit_count", "sample_count"])
        for k, v in sorted(report.changes_histogram.items()):
            w.writerow([k, v])


def markdown_table(before: EvalReport, after: Optional[EvalReport] = None, title="attack") -> str:
    pct = lambda x: f"{100 * x:.2f}"
    rows = [
        f"| | {title} |",
        "|---|---|",
        "| **Model trained with original training set** | |",
        f"| Accuracy using original test set | {pct(before.accuracy_original)} |",
        f"| Accuracy using adversarial test set | {pct(before.accuracy_adversarial)} |",
        f"| Percentage of perturbed samples | {pct(before.perturbed_fraction)} |",
        f"| Mean semantic similarity (successes) | "
        f"{'n/a' if before.mean_similarity is None else f'{before.mean_similarity:.4f}'} |",
    ]
    if after is not None:
        rows += [
            "| **Model re-trained with perturbed training set** | |",
            f"| Accuracy using original test set | {pct(after.accuracy_original)} |",
            f"| Accuracy using adversarial test set | {pct(after.accuracy_adversarial)} |",
        ]
    return "\n".join(rows) + "\n"


@dataclass
class RetrainResult:
    model: Model
    augmented_size: int
    n_added: int
    results: list


def retrain_with_adversarial(model: Model, train_corpus: Corpus, lex: Lexicons,
                             ks: Optional[KeywordSets], attack_cfg: Optional[AttackConfig] = None,
                             train_cfg: Optional[ModelConfig] = None) -> RetrainResult:
    """Attack every training document, add the successful ones under their
    original (correct) labels, and train a fresh model on the union."""
    attack_cfg = attack_cfg or AttackConfig()
    train_cfg = train_cfg or model.config
    results, added = [], []
    for doc in train_corpus.documents:
        if len(doc) == 0:
            continue
        r = craft(model, doc, lex, ks, attack_cfg)
        results.append(r)
        if r.success:
            added.append(r.adversarial.with_tokens(r.adversarial.tokens, id=f"{doc.id}#adv",
                                                   label=doc.label))
    augmented = Corpus.from_documents(list(train_corpus.documents) + added)
    log.info("retraining on %d documents (%d adversarial)", len(augmented), len(added))
    new_model = train(augmented, model.embeddings, train_cfg)
    return RetrainResult(new_model, len(augmented), len(added), results)
