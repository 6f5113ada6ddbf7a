"""Deterministic generator for the desk-scale evaluation fixture.

The fixture is a two-class (pos/neg) review corpus over three genres
(action, comedy, drama) plus the word resources the attack needs: 50-dim
embeddings, a spelling dictionary, a thesaurus and a POS lexicon.

Its vocabulary is built so that genre matters. Each genre owns two small
word families:

* home-positive words (``hilarious`` in comedy) that read as praise inside
  the genre and as criticism in the other two;
* home-negative words (``serious`` in comedy) with the opposite pattern.

Across the whole corpus the home-positive family of a genre therefore leans
negative, which is exactly what the genre-keyword candidate source exploits.

Run ``python -m advtext.fixture OUT_DIR`` (or ``advtext make-fixture``) to
regenerate; the shipped copy lives in ``advtext/data/desk``.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

DIM = 50
GENRES = ("action", "comedy", "drama")
LABELS = ("neg", "pos")

# word -> polarity, grouped by POS
GLOBAL = {
    "pos": {
        "ADJ": {"good": 1.0, "great": 1.1, "excellent": 1.3, "wonderful": 1.2, "superb": 1.2,
                "brilliant": 1.2, "enjoyable": 1.0, "lovely": 1.0, "fantastic": 1.2, "nice": 0.8,
                "fun": 0.9, "best": 1.0},
        "VERB": {"loved": 1.1, "enjoyed": 1.0, "recommend": 1.0, "adored": 1.2},
        "NOUN": {"masterpiece": 1.3, "gem": 1.1, "triumph": 1.1},
        "ADV": {"beautifully": 1.4, "wonderfully": 1.4, "brilliantly": 1.4, "superbly": 1.4},
    },
    "neg": {
        "ADJ": {"bad": -1.0, "awful": -1.2, "terrible": -1.3, "boring": -1.1, "dull": -1.0,
                "poor": -1.0, "horrible": -1.2, "lame": -0.9, "weak": -0.9, "worst": -1.1,
                "mediocre": -0.9, "stupid": -1.0},
        "VERB": {"hated": -1.1, "regret": -1.0, "disliked": -1.0, "wasted": -1.0},
        "NOUN": {"mess": -1.1, "disaster": -1.3, "waste": -1.1, "failure": -1.1},
        "ADV": {"horribly": -1.4, "terribly": -1.4, "poorly": -1.4, "badly": -1.4, "painfully": -1.4},
    },
}

# genre -> (home-positive family, home-negative family); ADJ lists and one ADV each
GENRE_WORDS = {
    "action": ({"ADJ": ["explosive", "relentless", "brutal", "gritty", "violent"], "ADV": ["relentlessly"]},
               {"ADJ": ["slow", "quiet", "talky", "subtle", "restrained"], "ADV": ["slowly"]}),
    "comedy": ({"ADJ": ["hilarious", "absurd", "silly", "goofy", "zany"], "ADV": ["ridiculously"]},
               {"ADJ": ["serious", "bleak", "grim", "somber", "gloomy"], "ADV": ["seriously"]}),
    "drama": ({"ADJ": ["heartbreaking", "depressing", "tragic", "harrowing", "wrenching"], "ADV": ["devastatingly"]},
              {"ADJ": ["cheerful", "breezy", "fluffy", "lighthearted", "sunny"], "ADV": ["cheerfully"]}),
}
GENRE_ADJ_POLARITY = 0.9
GENRE_ADV_POLARITY = 2.0

WEAK = {
    "decent": 0.5, "fine": 0.5, "solid": 0.6, "pleasant": 0.6, "grand": 0.7, "clever": 0.6,
    "smart": 0.6, "bright": 0.5, "sweet": 0.6, "liked": 0.6, "nicely": 0.7,
    "lousy": -0.8, "dreadful": -1.0, "tedious": -0.8, "flat": -0.5, "bland": -0.6, "feeble": -0.6,
    "dumb": -0.8, "foolish": -0.7, "loathed": -1.0, "awfully": -0.8, "worse": -0.9,
}
WEAK_POS = {"decent": "ADJ", "fine": "ADJ", "solid": "ADJ", "pleasant": "ADJ", "grand": "ADJ",
            "clever": "ADJ", "smart": "ADJ", "bright": "ADJ", "sweet": "ADJ", "liked": "VERB",
            "nicely": "ADV", "lousy": "ADJ", "dreadful": "ADJ", "tedious": "ADJ", "flat": "ADJ",
            "bland": "ADJ", "feeble": "ADJ", "dumb": "ADJ", "foolish": "ADJ", "loathed": "VERB",
            "awfully": "ADV", "worse": "ADJ"}

THESAURUS = {
    "good": ["nice", "decent", "fine", "solid"],
    "great": ["good", "fine", "grand"],
    "excellent": ["great", "fine", "superb"],
    "wonderful": ["nice", "lovely", "pleasant"],
    "brilliant": ["clever", "smart", "bright"],
    "enjoyable": ["pleasant", "fun", "nice"],
    "lovely": ["nice", "pleasant", "sweet"],
    "fantastic": ["great", "grand"],
    "superb": ["fine", "excellent"],
    "fun": ["enjoyable", "pleasant"],
    "nice": ["pleasant", "fine", "decent"],
    "loved": ["liked", "enjoyed"],
    "enjoyed": ["liked", "loved"],
    "beautifully": ["nicely", "wonderfully"],
    "bad": ["poor", "weak", "lousy"],
    "awful": ["bad", "lousy", "dreadful"],
    "terrible": ["bad", "dreadful", "lousy"],
    "boring": ["tedious", "dull"],
    "dull": ["tedious", "flat", "bland"],
    "poor": ["weak", "mediocre", "lousy"],
    "horrible": ["awful", "dreadful"],
    "lame": ["weak", "bland", "flat"],
    "weak": ["feeble", "flat", "poor"],
    "stupid": ["dumb", "foolish"],
    "hated": ["disliked", "loathed"],
    "disliked": ["hated"],
    "horribly": ["terribly", "badly", "awfully"],
    "movie": ["film", "picture"],
    "film": ["movie", "picture"],
    "plot": ["story", "storyline"],
    "story": ["plot", "tale"],
}

TYPO_WORDS = {
    "god": "NOUN", "goods": "NOUN", "food": "NOUN", "hood": "NOUN", "wood": "NOUN", "gold": "NOUN",
    "greet": "VERB", "treat": "NOUN", "fan": "NOUN", "fin": "NOUN", "gun": "NOUN", "sun": "NOUN",
    "run": "VERB", "mice": "NOUN", "rice": "NOUN", "dice": "NOUN", "vice": "NOUN", "nine": "OTHER",
    "bet": "VERB", "beast": "NOUN", "bust": "NOUN", "rest": "NOUN", "test": "NOUN", "west": "NOUN",
    "nest": "NOUN", "lively": "ADJ", "lived": "VERB", "moved": "VERB", "lover": "NOUN",
    "gum": "NOUN", "hem": "NOUN", "germ": "NOUN", "bed": "NOUN", "bid": "NOUN", "bag": "NOUN",
    "bat": "NOUN", "bar": "NOUN", "band": "NOUN", "bead": "NOUN", "ban": "NOUN", "doll": "NOUN",
    "full": "ADJ", "hull": "NOUN", "bull": "NOUN", "dell": "NOUN", "door": "NOUN", "pour": "VERB",
    "pool": "NOUN", "moor": "NOUN", "poll": "NOUN", "wear": "VERB", "week": "NOUN", "beak": "NOUN",
    "peak": "NOUN", "speak": "VERB", "game": "NOUN", "came": "VERB", "name": "NOUN", "same": "ADJ",
    "lane": "NOUN", "lake": "NOUN", "lime": "NOUN", "lamb": "NOUN", "less": "ADJ", "mass": "NOUN",
    "miss": "VERB", "moss": "NOUN", "mesh": "NOUN", "paste": "NOUN", "taste": "NOUN", "haste": "NOUN",
    "dated": "ADJ", "gated": "ADJ", "rated": "VERB", "hater": "NOUN", "bring": "VERB", "boxing": "NOUN",
}

NEUTRAL = {
    "NOUN": ["plot", "story", "script", "acting", "cast", "actor", "actress", "director", "ending",
             "scene", "character", "soundtrack", "dialogue", "performance", "camera", "screenplay",
             "sequel", "theater", "popcorn", "weekend", "friend", "audience", "minutes", "hour",
             "movie", "film", "picture", "storyline", "tale", "scenes", "characters", "lead"],
    "VERB": ["watched", "saw", "thought", "felt", "found", "expected", "seemed", "started", "ended",
             "followed", "rented", "caught"],
    "ADJ": ["long", "short", "new", "old", "first", "last", "whole", "final", "second", "fair",
            "young", "entire", "average", "ordinary"],
    "ADV": ["really", "quite", "rather", "extremely", "fairly", "mostly", "almost"],
}

TOPICS = {
    "action": ["explosions", "chase", "fight", "stunts", "hero", "villain", "gunfight", "car",
               "bullets", "mission"],
    "comedy": ["jokes", "laughs", "gags", "comedian", "punchlines", "prank", "sitcom", "banter",
               "spoof", "humor"],
    "drama": ["family", "tears", "grief", "marriage", "memories", "loss", "courtroom", "illness",
              "sacrifice", "childhood"],
}

FUNCTION = {"the": "OTHER", "a": "OTHER", "this": "OTHER", "it": "OTHER", "was": "VERB",
            "were": "VERB", "is": "VERB", "and": "OTHER", "but": "OTHER", "i": "OTHER",
            "we": "OTHER", "my": "OTHER", "with": "OTHER", "of": "OTHER", "to": "OTHER",
            "in": "OTHER", "for": "OTHER", "that": "OTHER", "overall": "ADV", "very": "ADV",
            "so": "ADV", "just": "ADV", "also": "ADV", "not": "ADV", "too": "ADV", "an": "OTHER",
            "there": "OTHER", "me": "OTHER", "they": "OTHER", "our": "OTHER", "at": "OTHER"}

TEMPLATES = [
    "The {N} was {SA} .",
    "The {T} scenes were {SD} {SA} .",
    "I {SV} the {N} .",
    "It was a {SA} {N} with {NA} {T} .",
    "The {N} {V} the {T} and the {N} felt {SA} .",
    "Overall a {SA} {SN} .",
    "The {NA} {N} was {ND} {SA} .",
    "We {V} it on a {N} and {V} the {T} .",
    "The {T} was {SA} but the {N} was {NA} .",
    "{ND} {SA} {T} and a {NA} {N} .",
    "This {N} is a {SN} .",
    "The {T} felt {SA} and the {N} was {SD} {SA} .",
]

# Hand-written reviews that read like real ones (label, genre, text).
REAL = [
    ("pos", "comedy", "I laughed the whole time. The jokes were hilarious and the cast was great."),
    ("pos", "comedy", "A silly and goofy comedy, but the banter is wonderful. I loved it."),
    ("neg", "comedy", "The comedian seemed so serious. The gags were bleak and the ending was dull."),
    ("neg", "comedy", "A grim spoof with stupid punchlines. I regret the popcorn and the two hours."),
    ("pos", "action", "Explosive stunts, a relentless chase and a brilliant villain. Fantastic fun."),
    ("pos", "action", "Gritty and brutal in the best way. The gunfight was beautifully staged."),
    ("neg", "action", "The mission plot was slow and talky, and the hero was weak. A mess."),
    ("neg", "action", "Quiet car chases and restrained fights. I hated the stunts and the ending."),
    ("pos", "drama", "Heartbreaking and tragic. The family story was wonderfully acted, a masterpiece."),
    ("pos", "drama", "A harrowing tale of grief and loss. The actress was superb."),
    ("neg", "drama", "A cheerful and fluffy courtroom story. The tears felt fake and the script was awful."),
    ("neg", "drama", "The marriage drama was breezy and lighthearted, which made the grief feel lame."),
    ("pos", "comedy", "Zany humor and absurd pranks. My friends enjoyed it, a real gem."),
    ("neg", "action", "A subtle hero in a quiet mission. Boring and poorly edited."),
    ("pos", "drama", "Depressing childhood memories, told with wrenching honesty. I recommend it."),
    ("neg", "comedy", "Somber jokes and gloomy laughs. The worst sitcom spoof this year."),
    ("pos", "action", "The explosions were violent and the stunts were excellent. A triumph."),
    ("neg", "drama", "Sunny scenes of illness and sacrifice. A disaster of a screenplay."),
    ("pos", "comedy", "Ridiculously funny gags and a lovely cast. The best comedy this year."),
    ("neg", "drama", "Cheerfully told story of loss. The dialogue was terrible and the acting was poor."),
    ("pos", "action", "A relentless hero and a gritty villain. I adored the whole mission."),
    ("neg", "action", "Slow fights, talky villain, restrained explosions. Horribly dull."),
    ("pos", "drama", "A tragic and harrowing marriage story. The lead was brilliant."),
    ("neg", "comedy", "Serious and bleak where it should be fun. I disliked the humor."),
]

_OPP_RATE = 0.05         # chance a global sentiment slot uses the opposite polarity
_GENRE_SLOT_RATE = 0.45  # chance a sentiment ADJ/ADV slot uses a genre word
_HOME_SHARE = 0.2        # within genre slots: share of the genre's own family
_TOPIC_GENRE_WEIGHT = 2.5  # how strongly topic nouns point along their genre direction
_COMMON_WEIGHT = 0.6      # offset shared by every word vector
_SCALE = 4.0              # overall vector length, roughly that of 50-d GloVe vectors


# words used by the hand-written reviews and general English coverage: word -> (tag, polarity)
EXTRA = {
    "laughed": ("VERB", 0.2), "acted": ("VERB", 0.0), "edited": ("VERB", 0.0),
    "staged": ("VERB", 0.0), "told": ("VERB", 0.0), "made": ("VERB", 0.0), "feel": ("VERB", 0.0),
    "time": ("NOUN", 0.0), "hours": ("NOUN", 0.0), "year": ("NOUN", 0.0), "way": ("NOUN", 0.0),
    "pranks": ("NOUN", 0.0), "chases": ("NOUN", 0.0), "fights": ("NOUN", 0.0),
    "honesty": ("NOUN", 0.3), "funny": ("ADJ", 0.2), "fake": ("ADJ", -0.4), "real": ("ADJ", 0.1),
    "drama": ("NOUN", 0.0), "comedy": ("NOUN", 0.0), "two": ("OTHER", 0.0), "of": ("OTHER", 0.0),
    "should": ("VERB", 0.0), "be": ("VERB", 0.0), "where": ("OTHER", 0.0), "which": ("OTHER", 0.0),
    "has": ("VERB", 0.0), "had": ("VERB", 0.0), "are": ("VERB", 0.0), "did": ("VERB", 0.0),
    "he": ("OTHER", 0.0), "she": ("OTHER", 0.0), "you": ("OTHER", 0.0), "his": ("OTHER", 0.0),
    "her": ("OTHER", 0.0), "their": ("OTHER", 0.0), "on": ("OTHER", 0.0), "from": ("OTHER", 0.0),
    "by": ("OTHER", 0.0), "as": ("OTHER", 0.0), "or": ("OTHER", 0.0), "if": ("OTHER", 0.0),
    "people": ("NOUN", 0.0), "thing": ("NOUN", 0.0), "day": ("NOUN", 0.0), "man": ("NOUN", 0.0),
    "woman": ("NOUN", 0.0), "world": ("NOUN", 0.0), "life": ("NOUN", 0.0), "music": ("NOUN", 0.0),
    "went": ("VERB", 0.0), "go": ("VERB", 0.0), "see": ("VERB", 0.0), "like": ("VERB", 0.3),
    "make": ("VERB", 0.0), "know": ("VERB", 0.0), "think": ("VERB", 0.0), "well": ("ADV", 0.3),
    "never": ("ADV", -0.2), "always": ("ADV", 0.0), "again": ("ADV", 0.0), "much": ("ADV", 0.0),
}


def _vocab():
    """All words with their POS tag and polarity."""
    pos_of, pol = {}, {}

    def add(w, tag, p, override=True):
        if override or w not in pos_of:
            pos_of[w], pol[w] = tag, p

    for cls in GLOBAL.values():
        for tag, words in cls.items():
            for w, p in words.items():
                add(w, tag, p)
    for home_pos, home_neg in GENRE_WORDS.values():
        for fam, sign in ((home_pos, -1.0), (home_neg, 1.0)):
            for tag, words in fam.items():
                mag = GENRE_ADV_POLARITY if tag == "ADV" else GENRE_ADJ_POLARITY
                for w in words:
                    add(w, tag, sign * mag)
    for w, p in WEAK.items():
        add(w, WEAK_POS[w], p)
    for tag, words in NEUTRAL.items():
        for w in words:
            add(w, tag, 0.0, override=False)
    for w, tag in TYPO_WORDS.items():
        add(w, tag, 0.0, override=False)
    for words in TOPICS.values():
        for w in words:
            add(w, "NOUN", 0.0)
    for w, tag in FUNCTION.items():
        add(w, tag, 0.0)
    for w, (tag, p) in EXTRA.items():
        add(w, tag, p, override=False)
    return pos_of, pol


def _unit(rng, n=DIM):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def build_embeddings(seed=7):
    """Word -> vector: shared offset + polarity direction + genre direction + word noise.

    Thesaurus neighbours share most of their noise component with the head word.
    """
    rng = np.random.default_rng(seed)
    pos_of, pol = _vocab()
    common, sentiment = _unit(rng), _unit(rng)
    genre_dir = {g: _unit(rng) for g in GENRES}
    genre_of = {}
    for g, words in TOPICS.items():
        for w in words:
            genre_of[w] = g
    for g, fams in GENRE_WORDS.items():
        for fam in fams:
            for words in fam.values():
                for w in words:
                    genre_of[w] = g
    words = sorted(w for w in pos_of if w not in OOV_WORDS)
    noise = {w: _unit(rng) for w in words}
    for head in sorted(THESAURUS):
        for s in THESAURUS[head]:
            if s in noise and head in noise:
                mixed = 0.7 * noise[head] + 0.3 * noise[s]
                noise[s] = mixed / np.linalg.norm(mixed)
    topical = {w for ws in TOPICS.values() for w in ws}
    vectors = {}
    for w in words:
        v = _COMMON_WEIGHT * common + pol[w] * sentiment + 0.6 * noise[w]
        if w in genre_of:
            v = v + (_TOPIC_GENRE_WEIGHT if w in topical else 0.5) * genre_dir[genre_of[w]]
        vectors[w] = _SCALE * v
    return vectors


# Training settings for the fixture. The library default of 10 epochs fits the clean
# corpus, but the adversarially augmented corpus needs longer training.
RUN_CONFIG = {
    "train_corpus": "train.csv",
    "test_corpus": "test.csv",
    "embeddings": "embeddings.txt",
    "dictionary": "dictionary.txt",
    "thesaurus": "thesaurus.tsv",
    "pos_lexicon": "pos_lexicon.tsv",
    "hidden_units": 128,
    "epochs": 300,
    "learning_rate": 0.05,
    "l2": 0.0,
    "seed": 0,
}

# dictionary words deliberately missing from the embedding table
OOV_WORDS = ("nine", "moor", "dell")


def _fill(slot, cls, genre, rng):
    opp = "neg" if cls == "pos" else "pos"
    if slot in ("N", "V", "NA", "ND"):
        tag = {"N": "NOUN", "V": "VERB", "NA": "ADJ", "ND": "ADV"}[slot]
        return rng.choice(NEUTRAL[tag])
    if slot == "T":
        return rng.choice(TOPICS[genre])
    tag = {"SA": "ADJ", "SV": "VERB", "SN": "NOUN", "SD": "ADV"}[slot]
    if tag in ("ADJ", "ADV") and rng.random() < _GENRE_SLOT_RATE:
        fam_index = 0 if cls == "pos" else 1  # home-positive / home-negative
        if rng.random() < _HOME_SHARE:
            src = GENRE_WORDS[genre][fam_index]
        else:
            other = [g for g in GENRES if g != genre][rng.integers(2)]
            src = GENRE_WORDS[other][1 - fam_index]
        return rng.choice(src[tag])
    polarity = opp if rng.random() < _OPP_RATE else cls
    return rng.choice(sorted(GLOBAL[polarity][tag]))


def make_review(cls, genre, rng) -> str:
    n = int(rng.integers(3, 6))
    sentences = []
    for _ in range(n):
        tpl = TEMPLATES[int(rng.integers(len(TEMPLATES)))]
        words = []
        for part in tpl.split(" "):
            if part.startswith("{"):
                words.append(_fill(part[1:-1], cls, genre, rng))
            else:
                words.append(part)
        s = " ".join(words).replace(" .", ".")
        sentences.append(s[0].upper() + s[1:])
    return " ".join(sentences)


def build_corpus(n_docs=2000, seed=11, test_fraction=0.2):
    rng = np.random.default_rng(seed)
    rows = []
    per_cell = n_docs // (len(LABELS) * len(GENRES))
    for g in GENRES:
        for cls in LABELS:
            for _ in range(per_cell):
                rows.append((cls, g, make_review(cls, g, rng)))
    rows += list(REAL)
    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order]
    n_test = int(round(len(rows) * test_fraction))
    train = [(f"d{i:04d}",) + r for i, r in enumerate(rows[n_test:])]
    test = [(f"t{i:04d}",) + r for i, r in enumerate(rows[:n_test])]
    return train, test


def pos_lexicon_entries():
    pos_of, _ = _vocab()
    # rule-tagged words stay out of the lexicon
    return {w: t for w, t in sorted(pos_of.items()) if w not in ("hilarious", "extremely")}


def write_fixture(out_dir, n_docs=2000, seed=11):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train, test = build_corpus(n_docs, seed)
    for name, rows in (("train.csv", train), ("test.csv", test)):
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "text", "label", "subcategory"])
            for doc_id, label, genre, text in rows:
                w.writerow([doc_id, text, label, genre])
    vectors = build_embeddings()
    with open(out / "embeddings.txt", "w", encoding="utf-8") as fh:
        for word in sorted(vectors):
            fh.write(word + " " + " ".join(f"{x:.6f}" for x in vectors[word]) + "\n")
    pos_of, _ = _vocab()
    with open(out / "dictionary.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(sorted(pos_of)) + "\n")
    with open(out / "thesaurus.tsv", "w", encoding="utf-8") as fh:
        for head in sorted(THESAURUS):
            fh.write(head + "\t" + ",".join(THESAURUS[head]) + "\n")
    with open(out / "pos_lexicon.tsv", "w", encoding="utf-8") as fh:
        for word, tag in pos_lexicon_entries().items():
            fh.write(f"{word}\t{tag}\n")
    with open(out / "desk.cfg", "w", encoding="utf-8") as fh:
        fh.write("# advtext run configuration for the synthetic desk fixture\n")
        fh.write("# paths are relative to this file\n")
        for key, value in RUN_CONFIG.items():
            fh.write(f"{key} = {value}\n")
    return out


if __name__ == "__main__":
    write_fixture(sys.argv[1] if len(sys.argv) > 1 else "desk")
