import string
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from advtext.candidates import build_keyword_sets
from advtext.classifier import Model, ModelConfig, train
from advtext.lexicons import EmbeddingTable, load_lexicons
from advtext.textcore import load_corpus

DESK = Path(str(resources.files("advtext") / "data" / "desk"))


@pytest.fixture(scope="session")
def desk_dir():
    return DESK


@pytest.fixture(scope="session")
def lex():
    return load_lexicons(DESK / "embeddings.txt", DESK / "dictionary.txt",
                         DESK / "thesaurus.tsv", DESK / "pos_lexicon.tsv")


@pytest.fixture(scope="session")
def train_corpus(lex):
    return load_corpus(DESK / "train.csv", lexicon=lex.pos)


@pytest.fixture(scope="session")
def test_corpus(lex):
    return load_corpus(DESK / "test.csv", lexicon=lex.pos)


@pytest.fixture(scope="session")
def desk_model(lex, train_corpus):
    """Classifier trained with the library defaults; quick but accurate enough."""
    return train(train_corpus, lex.embeddings, ModelConfig(seed=0))


@pytest.fixture(scope="session")
def keyword_sets(train_corpus):
    return build_keyword_sets(train_corpus)


def random_model(rng, dim=6, hidden=5, vocab=12, architecture="mean-pool", window=3, scale=1.0):
    """Untrained model with random weights over a random vocabulary."""
    words = list(string.ascii_lowercase[:vocab])
    table = EmbeddingTable(words, scale * rng.standard_normal((vocab, dim)))
    W1 = rng.standard_normal((hidden, dim * (window if architecture == "conv" else 1)))
    cfg = ModelConfig(hidden_units=hidden, architecture=architecture, conv_window=window)
    return Model(cfg, table, W1, rng.standard_normal(hidden) * 0.5,
                 rng.standard_normal((2, hidden)), rng.standard_normal(2) * 0.1, ("neg", "pos"))


# filled by the acceptance tests and echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
