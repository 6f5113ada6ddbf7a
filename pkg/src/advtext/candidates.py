"""Candidate pools: synonyms, valid-word typos and genre-distinctive keywords."""

from __future__ import annotations

import functools
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import IndexOutOfRange, NotBinary, UnknownGenre
from .lexicons import Lexicons
from .textcore import OTHER, Corpus, Document

SYNONYM, GENRE, TYPO = "synonym", "genre", "typo"
SOURCES = (SYNONYM, GENRE, TYPO)
# order used when the same word arrives from several sources
_DEDUP_PRIORITY = {SYNONYM: 0, GENRE: 1, TYPO: 2}


@functools.lru_cache(maxsize=None)
def default_stopwords() -> frozenset:
    ref = resources.files("advtext") / "data" / "stopwords.txt"
    return frozenset(w.strip() for w in ref.read_text(encoding="utf-8").split() if w.strip())


@dataclass(frozen=True)
class KeywordSets:
    global_distinctive: dict
    genre_distinctive: dict
    min_count: int = 5
    ratio_threshold: float = 3.0
    labels: tuple = ()
    subcategories: tuple = ()

    def opposite(self, label):
        if label not in self.labels:
            raise KeyError(f"unknown class {label!r}")
        return self.labels[1 - self.labels.index(label)]

    def to_dict(self) -> dict:
        return {
            "parameters": {"min_count": self.min_count, "ratio_threshold": self.ratio_threshold},
            "labels": list(self.labels),
            "subcategories": list(self.subcategories),
            "global": {c: sorted(ws) for c, ws in sorted(self.global_distinctive.items())},
            "genre": {f"{c}/{k}": sorted(ws) for (c, k), ws in sorted(self.genre_distinctive.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KeywordSets":
        genre = {}
        for key, words in data["genre"].items():
            c, _, k = key.partition("/")
            genre[(c, k)] = frozenset(words)
        return cls(
            global_distinctive={c: frozenset(ws) for c, ws in data["global"].items()},
            genre_distinctive=genre,
            min_count=data["parameters"]["min_count"],
            ratio_threshold=data["parameters"]["ratio_threshold"],
            labels=tuple(data["labels"]),
            subcategories=tuple(data["subcategories"]),
        )


def _count(documents, stopwords):
    counts = {}
    totals = Counter()
    for d in documents:
        c = counts.setdefault(d.label, Counter())
        words = [t.normalized for t in d.tokens if t.is_word]
        totals[d.label] += len(words)
        c.update(w for w in words if w not in stopwords)
    return counts, totals


def _distinctive(counts, totals, labels, min_count, ratio):
    out = {}
    for c in labels:
        other = labels[1 - labels.index(c)]
        mine, theirs = counts.get(c, Counter()), counts.get(other, Counter())
        n_mine, n_theirs = max(totals[c], 1), max(totals[other], 1)
        out[c] = frozenset(
            w for w, k in mine.items()
            if k >= min_count and k / n_mine >= ratio * (theirs[w] + 1) / n_theirs
        )
    return out


def build_keyword_sets(corpus: Corpus, min_count: int = 5, ratio_threshold: float = 3.0,
                       stopwords: Optional[frozenset] = None) -> KeywordSets:
    """Class-distinctive words by length-normalized term-frequency ratio, globally
    and within each subcategory."""
    if len(corpus.labels) != 2:
        raise NotBinary(f"keyword sets need exactly 2 labels, got {sorted(corpus.labels)}")
    if min_count < 1:
        raise ValueError("min_count must be positive")
    if not ratio_threshold > 1:
        raise ValueError("ratio_threshold must exceed 1")
    stopwords = default_stopwords() if stopwords is None else stopwords
    labels = corpus.label_order
    counts, totals = _count(corpus.documents, stopwords)
    global_sets = _distinctive(counts, totals, labels, min_count, ratio_threshold)
    genre_sets = {}
    subcats = tuple(sorted(corpus.subcategories))
    for k in subcats:
        counts_k, totals_k = _count([d for d in corpus.documents if d.subcategory == k], stopwords)
        for c, ws in _distinctive(counts_k, totals_k, labels, min_count, ratio_threshold).items():
            genre_sets[(c, k)] = ws
    return KeywordSets(global_sets, genre_sets, min_count, ratio_threshold, labels, subcats)


def genre_candidates(ks: KeywordSets, current_class, genre: Optional[str]) -> frozenset:
    """Words distinctive of the opposite class overall but of ``current_class``
    within ``genre``."""
    if not genre:
        return frozenset()
    if genre not in ks.subcategories:
        raise UnknownGenre(f"genre {genre!r} not among {list(ks.subcategories)}")
    opposite = ks.opposite(current_class)
    return ks.global_distinctive[opposite] & ks.genre_distinctive[(current_class, genre)]


@dataclass(frozen=True)
class Candidate:
    word: str
    pos: str
    source: str
    score: Optional[float] = None


@dataclass(frozen=True)
class CandidatePool:
    position: int
    target: str
    candidates: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    @property
    def words(self):
        return [c.word for c in self.candidates]


def build_pool(doc: Document, position: int, lex: Lexicons, ks: Optional[KeywordSets],
               current_class=None, use_genre: bool = True) -> CandidatePool:
    """Synonyms, dictionary typos and (optionally) genre keywords for one token.

    ``current_class`` is the label the document is currently predicted as;
    it defaults to the stored label.
    """
    if not 0 <= position < len(doc):
        raise IndexOutOfRange(f"token index {position} out of range for document of length {len(doc)}")
    token = doc.tokens[position]
    if token.pos == OTHER:
        raise ValueError("cannot build a candidate pool for a punctuation token")
    target = token.normalized
    found = {}

    def add(words, source):
        for w in words:
            if w == target:
                continue
            prev = found.get(w)
            if prev is None or _DEDUP_PRIORITY[source] < _DEDUP_PRIORITY[prev]:
                found[w] = source

    add(lex.synonyms(target), SYNONYM)
    if use_genre and ks is not None:
        cls = doc.label if current_class is None else current_class
        add(sorted(genre_candidates(ks, cls, doc.subcategory)), GENRE)
    add(lex.typos(target), TYPO)
    cands = tuple(
        Candidate(w, lex.pos.tag(w), src)
        for w, src in sorted(found.items(), key=lambda kv: (_DEDUP_PRIORITY[kv[1]], kv[0]))
    )
    return CandidatePool(position, target, cands)
