"""Tokenization, POS tagging, corpus loading and document reconstruction."""

from __future__ import annotations

import csv
import functools
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import DataError, MalformedRecord, UnknownLabel

NOUN, VERB, ADJ, ADV, OTHER = "NOUN", "VERB", "ADJ", "ADV", "OTHER"
TAGS = (NOUN, VERB, ADJ, ADV, OTHER)

# word = run of word chars, optionally joined by in-word apostrophes (don't, it's)
_TOKEN_RE = re.compile(r"\w+(?:['’]\w+)*|[^\w\s]", re.UNICODE)
_SENTENCE_END = {".", "!", "?"}
_SUFFIX_RULES = (("ly", ADV), ("ous", ADJ), ("ful", ADJ), ("ive", ADJ), ("able", ADJ))


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    pos: Optional[str]
    position: int

    @property
    def is_word(self) -> bool:
        return self.pos != OTHER


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple
    label: str
    subcategory: Optional[str] = None
    raw: str = ""

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> list:
        return [t.normalized for t in self.tokens]

    @property
    def text(self) -> str:
        return detokenize(self.tokens)

    def with_tokens(self, tokens: Iterable[Token], **changes) -> "Document":
        """New document holding ``tokens`` renumbered from 0; metadata kept."""
        renumbered = tuple(replace(t, position=i) for i, t in enumerate(tokens))
        return replace(self, tokens=renumbered, raw=detokenize(renumbered), **changes)


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    labels: frozenset
    subcategories: frozenset = field(default_factory=frozenset)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def label_order(self) -> tuple:
        return tuple(sorted(self.labels))

    def require_binary(self):
        """Attack mode needs exactly two classes."""
        if len(self.labels) != 2:
            raise UnknownLabel(
                f"attack mode needs exactly 2 labels, corpus has {len(self.labels)}: "
                f"{sorted(self.labels)}"
            )

    @classmethod
    def from_documents(cls, documents: Iterable[Document]) -> "Corpus":
        docs = tuple(documents)
        seen = set()
        for d in docs:
            if d.id in seen:
                raise MalformedRecord(f"duplicate document id {d.id!r}")
            seen.add(d.id)
        return cls(
            documents=docs,
            labels=frozenset(d.label for d in docs),
            subcategories=frozenset(d.subcategory for d in docs if d.subcategory),
        )


class PosLexicon:
    """Word -> most frequent tag, with the suffix fallback rules."""

    def __init__(self, entries: Optional[dict] = None):
        self.entries = dict(entries or {})

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def tag(self, word: str) -> str:
        word = word.casefold()
        if word in self.entries:
            return self.entries[word]
        if not any(ch.isalpha() for ch in word):
            return OTHER
        for suffix, tag in _SUFFIX_RULES:
            if word.endswith(suffix) and len(word) > len(suffix):
                return tag
        return OTHER

    @classmethod
    def load(cls, path) -> "PosLexicon":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or parts[1].strip() not in TAGS:
                    raise MalformedRecord(f"{path}:{lineno}: expected 'word<TAB>TAG', got {line!r}")
                word = parts[0].strip().casefold()
                entries.setdefault(word, parts[1].strip())
        return cls(entries)


@functools.lru_cache(maxsize=None)
def default_lexicon() -> PosLexicon:
    """The POS lexicon shipped with the package."""
    ref = resources.files("advtext") / "data" / "pos_lexicon.tsv"
    with resources.as_file(ref) as path:
        return PosLexicon.load(path)


def tokenize(text: str) -> list:
    """Split on whitespace and punctuation. Punctuation tokens come out tagged OTHER,
    word tokens untagged (``pos=None``) until :func:`tag_pos` runs."""
    tokens = []
    for i, m in enumerate(_TOKEN_RE.finditer(text)):
        surface = m.group()
        pos = None if any(ch.isalnum() or ch == "_" for ch in surface) else OTHER
        tokens.append(Token(surface, surface.casefold(), pos, i))
    return tokens


def tag_pos(tokens: Sequence[Token], lexicon: Optional[PosLexicon] = None) -> list:
    lexicon = lexicon or default_lexicon()
    out = []
    for t in tokens:
        tag = OTHER if t.pos == OTHER else lexicon.tag(t.normalized)
        out.append(replace(t, pos=tag))
    return out


def detokenize(tokens: Sequence[Token]) -> str:
    parts = []
    for t in tokens:
        if parts and t.pos == OTHER and not _is_wordlike(t.surface):
            parts[-1] += t.surface
        else:
            parts.append(t.surface)
    return " ".join(parts)


def _is_wordlike(surface):
    return any(ch.isalnum() or ch == "_" for ch in surface)


def is_sentence_start(tokens: Sequence[Token], index: int) -> bool:
    return index == 0 or tokens[index - 1].surface in _SENTENCE_END


def make_document(doc_id, text, label, subcategory=None, lexicon=None) -> Document:
    tokens = tuple(tag_pos(tokenize(text), lexicon))
    return Document(id=str(doc_id), tokens=tokens, label=label,
                    subcategory=subcategory or None, raw=text)


def load_corpus(path, format: str = "csv", lexicon: Optional[PosLexicon] = None) -> Corpus:
    """Read a labeled corpus from a CSV file or a ``<label>/<subcategory>/<id>.txt`` tree."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus not found: {path}")
    if format == "csv":
        docs = _read_csv(path, lexicon)
    elif format == "directory":
        docs = _read_directory(path, lexicon)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return Corpus.from_documents(docs)


def _read_csv(path, lexicon):
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"id", "text", "label"} - set(reader.fieldnames or ())
        if missing:
            raise MalformedRecord(f"{path}: header lacks columns {sorted(missing)}")
        for row in reader:
            line = reader.line_num
            label = (row.get("label") or "").strip()
            if not label:
                raise MalformedRecord(f"{path}: line {line}: missing label")
            doc_id = (row.get("id") or "").strip() or f"line{line}"
            docs.append(make_document(doc_id, row.get("text") or "", label,
                                      (row.get("subcategory") or "").strip() or None, lexicon))
    return docs


def _read_directory(root, lexicon):
    docs = []
    for f in sorted(root.rglob("*.txt")):
        parts = f.relative_to(root).parts
        if len(parts) == 2:
            label, sub = parts[0], None
        elif len(parts) == 3:
            label, sub = parts[0], parts[1]
        else:
            raise MalformedRecord(f"{f}: expected <label>/[<subcategory>/]<id>.txt")
        docs.append(make_document(f.stem, f.read_text(encoding="utf-8"), label, sub, lexicon))
    return docs
