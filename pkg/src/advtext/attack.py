"""Greedy word-level adversarial crafting: edit one ranked word at a time
until the predicted label flips."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .candidates import GENRE, SYNONYM, TYPO, Candidate, CandidatePool, KeywordSets, build_pool
from .classifier import Model, gradient_from_embeddings, predict_proba, proba_from_embeddings
from .errors import ConfigError, EmptyDocument, IndexOutOfRange
from .lexicons import Lexicons, semantic_similarity
from .scoring import GRAD_SCALARS, METHODS, rank_words
from .textcore import ADJ, ADV, Document, PosLexicon, Token, default_lexicon, is_sentence_start

REMOVE, INSERT, REPLACE = "Remove", "Insert", "Replace"
# tie-break order when two candidates leave the same posterior
_CHOICE_PRIORITY = {GENRE: 0, SYNONYM: 1, TYPO: 2}


@dataclass(frozen=True)
class Edit:
    kind: str
    position: int
    old_word: Optional[str] = None
    new_word: Optional[str] = None
    source: Optional[str] = None

    def __post_init__(self):
        need_old = self.kind in (REMOVE, REPLACE)
        need_new = self.kind in (INSERT, REPLACE)
        if self.kind not in (REMOVE, INSERT, REPLACE):
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if need_old != (self.old_word is not None) or need_new != (self.new_word is not None):
            raise ValueError(f"{self.kind} edit has wrong word fields: {self}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AttackConfig:
    method: str = "loo"
    max_changes: int = 20
    adverb_threshold: float = 0.5
    rerank_each_step: bool = False
    use_genre_keywords: bool = True
    require_pos_match_all: bool = False
    grad_scalar: str = "dot"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}", field="method")
        if int(self.max_changes) < 0:
            raise ConfigError("max_changes must be non-negative", field="max_changes")
        if not 0 < self.adverb_threshold <= 1:
            raise ConfigError("adverb_threshold must lie in (0, 1]", field="adverb_threshold")
        if self.grad_scalar not in GRAD_SCALARS:
            raise ConfigError(f"grad_scalar must be one of {GRAD_SCALARS}", field="grad_scalar")


@dataclass
class AttackResult:
    original: Document
    adversarial: Document
    edits: list
    success: bool
    initial_label: str
    final_label: str
    probability_trace: list
    similarity: float
    label_order: tuple = field(default=())

    @property
    def n_changes(self) -> int:
        return len(self.edits)

    def to_dict(self) -> dict:
        return {
            "id": self.original.id,
            "success": self.success,
            "initial_label": self.initial_label,
            "final_label": self.final_label,
            "n_changes": len(self.edits),
            "similarity": self.similarity,
            "label_order": list(self.label_order),
            "edits": [e.to_dict() for e in self.edits],
            "probability_trace": [[float(a), float(b)] for a, b in self.probability_trace],
            "original": document_to_dict(self.original),
            "adversarial": document_to_dict(self.adversarial),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AttackResult":
        return cls(
            original=document_from_dict(data["original"]),
            adversarial=document_from_dict(data["adversarial"]),
            edits=[Edit(**e) for e in data["edits"]],
            success=data["success"],
            initial_label=data["initial_label"],
            final_label=data["final_label"],
            probability_trace=[tuple(p) for p in data["probability_trace"]],
            similarity=data["similarity"],
            label_order=tuple(data.get("label_order", ())),
        )


def document_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "label": doc.label,
        "subcategory": doc.subcategory,
        "raw": doc.raw,
        "tokens": [[t.surface, t.pos] for t in doc.tokens],
    }


def document_from_dict(data: dict) -> Document:
    tokens = tuple(Token(s, s.casefold(), pos, i) for i, (s, pos) in enumerate(data["tokens"]))
    return Document(data["id"], tokens, data["label"], data.get("subcategory"), data.get("raw", ""))


# -- edits ----------------------------------------------------------------------

def _new_token(word, pos, capitalize):
    surface = word[:1].upper() + word[1:] if capitalize else word
    return Token(surface, word.casefold(), pos, 0)


def _decapitalize(tok):
    if tok.surface[:1].isupper() and tok.surface[1:] == tok.surface[1:].lower():
        return replace(tok, surface=tok.surface[:1].lower() + tok.surface[1:])
    return tok


def _capitalize(tok):
    return replace(tok, surface=tok.surface[:1].upper() + tok.surface[1:])


def apply_edit(doc: Document, edit: Edit, lexicon: Optional[PosLexicon] = None) -> Document:
    """Return a new document with ``edit`` applied; ``doc`` is left untouched.

    Inserted and replacement words are lowercase except at the start of a
    sentence whose first word was capitalized.
    """
    lexicon = lexicon or default_lexicon()
    tokens = list(doc.tokens)
    k = edit.position
    upper = len(tokens) + (1 if edit.kind == INSERT else 0)
    if not 0 <= k < upper:
        raise IndexOutOfRange(f"edit position {k} out of range for document of length {len(tokens)}")
    if edit.kind != INSERT and edit.old_word != tokens[k].normalized:
        raise ValueError(f"edit expects {edit.old_word!r} at {k}, found {tokens[k].normalized!r}")

    at_start = is_sentence_start(tokens, k)
    cap = at_start and k < len(tokens) and tokens[k].surface[:1].isupper()
    if edit.kind == REMOVE:
        del tokens[k]
        if cap and k < len(tokens) and tokens[k].is_word:
            tokens[k] = _capitalize(tokens[k])
    elif edit.kind == REPLACE:
        tokens[k] = _new_token(edit.new_word, lexicon.tag(edit.new_word), cap)
    else:
        if cap:
            tokens[k] = _decapitalize(tokens[k])
        tokens.insert(k, _new_token(edit.new_word, lexicon.tag(edit.new_word), cap))
    return doc.with_tokens(tokens)


def replay(original: Document, edits, lexicon: Optional[PosLexicon] = None) -> Document:
    doc = original
    for e in edits:
        doc = apply_edit(doc, e, lexicon)
    return doc


# -- candidate choice -------------------------------------------------------------

def _allowed(token, cand, require_pos_match_all):
    if token.pos == ADJ and cand.pos == ADV:
        return True  # insertion; POS agreement only governs replacement
    if cand.source == GENRE or require_pos_match_all:
        return cand.pos == token.pos
    return True


def choose_candidate(model: Model, doc: Document, position: int, pool: CandidatePool,
                     require_pos_match_all: bool = False, method: str = "loo") -> Optional[Candidate]:
    """Candidate that leaves the lowest posterior for the currently predicted class.

    Each candidate is tentatively applied (inserted before an adjective when it
    is an adverb, substituted otherwise). With ``method="grad"`` substitutions
    are scored by a first-order estimate instead of a forward pass.
    """
    if not 0 <= position < len(doc):
        raise IndexOutOfRange(f"token index {position} out of range for document of length {len(doc)}")
    token = doc.tokens[position]
    allowed = [c for c in pool if _allowed(token, c, require_pos_match_all)]
    if not allowed:
        return None
    table = model.embeddings
    E = model.embed(doc)
    p = proba_from_embeddings(model, E)
    i = int(np.argmax(p))
    grad = None
    if method == "grad":
        grad = gradient_from_embeddings(model, E, i)[position]

    scored = []
    for c in allowed:
        vec = table.lookup(c.word)
        if token.pos == ADJ and c.pos == ADV:
            prob = proba_from_embeddings(model, np.insert(E, position, vec, axis=0))[i]
        elif grad is not None:
            # J = -log p_i, so p_i' ~= p_i * exp(-dJ)
            prob = p[i] * np.exp(-float(grad @ (vec - E[position])))
        else:
            E2 = E.copy()
            E2[position] = vec
            prob = proba_from_embeddings(model, E2)[i]
        scored.append(replace(c, score=float(prob)))
    return min(scored, key=lambda c: (c.score, _CHOICE_PRIORITY[c.source], c.word))


# -- the attack -------------------------------------------------------------------

def craft(model: Model, doc: Document, lex: Lexicons, ks: Optional[KeywordSets],
          cfg: Optional[AttackConfig] = None) -> AttackResult:
    """Greedily modify ``doc`` until the model's predicted label changes.

    Words are visited in descending contribution order. A high-scoring adverb
    is removed; otherwise the best pool candidate is inserted before an
    adjective (when it is an adverb) or substituted for the word. Words with
    no usable candidate are skipped. The attack stops on a flip, when the edit
    budget is spent, or when the ranking is exhausted.
    """
    cfg = cfg or AttackConfig()
    if len(doc) == 0:
        raise EmptyDocument(f"document {doc.id!r} has no tokens")
    p = predict_proba(model, doc)
    y0 = int(np.argmax(p))
    label0 = model.label_order[y0]
    trace = [tuple(float(v) for v in p)]
    current = doc
    origin = list(range(len(doc)))  # current index -> original index (None if inserted)
    visited = set()
    edits = []
    y = y0
    ranking = rank_words(model, doc, cfg.method, cfg.grad_scalar)
    cursor = 0

    while y == y0 and len(edits) < cfg.max_changes:
        if cfg.rerank_each_step and edits:
            if len(current) == 0:
                break
            ranking = rank_words(model, current, cfg.method, cfg.grad_scalar)
            entries = [e for e in ranking if origin[e.position] is not None
                       and origin[e.position] not in visited]
            if not entries:
                break
            entry, k = entries[0], entries[0].position
        else:
            entries = ranking.entries
            while cursor < len(entries) and entries[cursor].position in visited:
                cursor += 1
            if cursor >= len(entries):
                break
            entry = entries[cursor]
            k = origin.index(entry.position)
        visited.add(origin[k])
        token = current.tokens[k]
        top = ranking.max_score

        if token.pos == ADV and entry.score > 0 and entry.score >= cfg.adverb_threshold * top:
            edit = Edit(REMOVE, k, old_word=token.normalized)
        else:
            pool = build_pool(current, k, lex, ks, current_class=label0,
                              use_genre=cfg.use_genre_keywords)
            cand = choose_candidate(model, current, k, pool, cfg.require_pos_match_all, cfg.method)
            if cand is None:
                continue
            if token.pos == ADJ and cand.pos == ADV:
                edit = Edit(INSERT, k, new_word=cand.word, source=cand.source)
            else:
                edit = Edit(REPLACE, k, old_word=token.normalized, new_word=cand.word, source=cand.source)

        current = apply_edit(current, edit, lex.pos)
        if edit.kind == REMOVE:
            del origin[k]
        elif edit.kind == INSERT:
            origin.insert(k, None)
        edits.append(edit)
        p = predict_proba(model, current)
        trace.append(tuple(float(v) for v in p))
        y = int(np.argmax(p))

    return AttackResult(
        original=doc,
        adversarial=current,
        edits=edits,
        success=y != y0,
        initial_label=label0,
        final_label=model.label_order[y],
        probability_trace=trace,
        similarity=semantic_similarity(doc, current, lex.embeddings),
        label_order=tuple(model.label_order),
    )


def craft_many(model, docs, lex, ks, cfg=None):
    return [craft(model, d, lex, ks, cfg) for d in docs]
