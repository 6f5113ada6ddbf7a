"""Static word resources: embedding table, spelling dictionary, thesaurus."""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, EmptyFile, MalformedRecord
from .textcore import PosLexicon, default_lexicon

LETTERS = string.ascii_lowercase


class EmbeddingTable:
    """Frozen word vectors. Unknown words map to the all-zero vector."""

    def __init__(self, words, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must have one row per word")
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self.oov_vector = np.zeros(matrix.shape[1])
        self.oov_vector.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word):
        return word in self.index

    def __len__(self):
        return len(self.words)

    def lookup(self, word: str) -> np.ndarray:
        i = self.index.get(word)
        return self.oov_vector if i is None else self.matrix[i]

    def lookup_many(self, words) -> np.ndarray:
        out = np.zeros((len(words), self.dimension))
        for row, w in enumerate(words):
            i = self.index.get(w)
            if i is not None:
                out[row] = self.matrix[i]
        return out


def load_embeddings(path) -> EmbeddingTable:
    """Read a GloVe-style text file: ``word v1 v2 ... vd`` per line."""
    words, rows = [], []
    dim = None
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            if not line.strip():
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise DimensionMismatch(f"{path}:{lineno}: no vector values", line=lineno)
            elif len(values) != dim:
                raise DimensionMismatch(
                    f"{path}:{lineno}: vector has {len(values)} values, expected {dim}",
                    line=lineno,
                )
            try:
                vec = [float(v) for v in values]
            except ValueError as exc:
                raise MalformedRecord(f"{path}:{lineno}: {exc}") from None
            word = word.casefold()
            if word in seen:
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if not words:
        raise EmptyFile(f"{path}: no embeddings")
    return EmbeddingTable(words, np.array(rows, dtype=np.float64))


def save_embeddings(table: EmbeddingTable, path, precision: int = 6):
    with open(path, "w", encoding="utf-8") as fh:
        for w, vec in zip(table.words, table.matrix):
            fh.write(w + " " + " ".join(f"{v:.{precision}f}" for v in vec) + "\n")


class Dictionary(frozenset):
    """Set of valid (lowercase) words."""

    @classmethod
    def load(cls, path) -> "Dictionary":
        with open(path, encoding="utf-8") as fh:
            words = {line.strip().casefold() for line in fh if line.strip()}
        if not words:
            raise EmptyFile(f"{path}: empty dictionary")
        return cls(words)


class Thesaurus:
    def __init__(self, synonyms: Optional[dict] = None):
        self.synonyms = {}
        for word, syns in (synonyms or {}).items():
            word = word.casefold()
            cleaned = []
            for s in syns:
                s = s.strip().casefold()
                if s and s != word and s not in cleaned:
                    cleaned.append(s)
            if cleaned:
                self.synonyms[word] = tuple(cleaned)

    def __len__(self):
        return len(self.synonyms)

    @classmethod
    def load(cls, path) -> "Thesaurus":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                word, sep, rest = line.partition("\t")
                if not sep:
                    raise MalformedRecord(f"{path}:{lineno}: expected 'word<TAB>syn1,syn2,...'")
                entries.setdefault(word.strip(), rest.split(","))
        return cls(entries)


def synonyms(word: str, thesaurus: Thesaurus) -> tuple:
    return tuple(s for s in thesaurus.synonyms.get(word, ()) if s != word)


def edits1(word: str) -> set:
    """All strings one insertion, deletion, substitution or adjacent swap away."""
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = [a + b[1:] for a, b in splits if b]
    swaps = [a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1]
    subs = [a + c + b[1:] for a, b in splits if b for c in LETTERS]
    inserts = [a + c + b for a, b in splits for c in LETTERS]
    return set(deletes + swaps + subs + inserts)


def valid_typos(word: str, dictionary) -> tuple:
    """Dictionary words at Damerau-Levenshtein distance exactly 1, sorted."""
    if not word:
        raise ValueError("word must be non-empty")
    return tuple(sorted(w for w in edits1(word) if w != word and w in dictionary))


@dataclass
class Lexicons:
    embeddings: EmbeddingTable
    dictionary: Dictionary
    thesaurus: Thesaurus
    pos: PosLexicon

    def synonyms(self, word):
        return synonyms(word, self.thesaurus)

    def typos(self, word):
        return valid_typos(word, self.dictionary)


def load_lexicons(embeddings, dictionary, thesaurus, pos_lexicon=None) -> Lexicons:
    return Lexicons(
        embeddings=load_embeddings(embeddings),
        dictionary=Dictionary.load(dictionary),
        thesaurus=Thesaurus.load(thesaurus),
        pos=PosLexicon.load(pos_lexicon) if pos_lexicon else default_lexicon(),
    )


def cosine(a, b) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def semantic_similarity(a, b, table: EmbeddingTable) -> float:
    """Cosine of the mean embeddings of the non-punctuation tokens of two documents."""
    wa = [t.normalized for t in a.tokens if t.is_word]
    wb = [t.normalized for t in b.tokens if t.is_word]
    if not wa or not wb:
        return 0.0
    return cosine(table.lookup_many(wa).mean(axis=0), table.lookup_many(wb).mean(axis=0))
