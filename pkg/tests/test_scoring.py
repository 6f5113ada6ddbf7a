import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import spearmanr

from advtext.errors import EmptyDocument, IndexOutOfRange
from advtext.scoring import rank_words, score_grad, score_loo
from advtext.textcore import ADJ, NOUN, OTHER, Document, Token, make_document

from oracles import loo_brute_force, ref_proba


def test_loo_matches_brute_force_on_fixture_docs(desk_model, test_corpus):
    for doc in test_corpus.documents[:50]:
        E = desk_model.embed(doc)
        for k in range(len(doc)):
            expected, _ = loo_brute_force(desk_model, E, k)
            assert abs(score_loo(desk_model, doc, k) - expected) <= 1e-9


def flip_docs(model, lex):
    """Two-word docs pairing a praise word with a criticism word: deleting the
    word that carries the prediction leaves the other class in charge."""
    praise = ["great", "excellent", "wonderful", "superb"]
    blame = ["awful", "terrible", "boring", "horrible"]
    for a, b in itertools.product(praise, blame):
        yield Document(f"{a}-{b}", (Token(a, a, ADJ, 0), Token(b, b, ADJ, 1)), "pos")


def test_loo_second_branch_cases(desk_model, lex):
    flips = 0
    for doc in flip_docs(desk_model, lex):
        E = desk_model.embed(doc)
        for k in range(2):
            expected, flipped = loo_brute_force(desk_model, E, k)
            got = score_loo(desk_model, doc, k)
            assert abs(got - expected) <= 1e-9
            if flipped:
                flips += 1
                p = ref_proba(desk_model, E)
                # second branch: above the predicted posterior itself
                assert got > p.max()
    assert flips >= 3


def test_loo_rank_words_batch_agrees(desk_model, test_corpus):
    for doc in test_corpus.documents[:20]:
        ranking = rank_words(desk_model, doc, "loo")
        for e in ranking:
            assert e.score == pytest.approx(score_loo(desk_model, doc, e.position), abs=1e-12)


def test_loo_with_oov_padding(desk_model):
    doc = make_document("d", "The plot was good and the acting was fine qwzxv", "pos")
    k = len(doc) - 1
    assert not desk_model.embed(doc)[k].any()
    E = desk_model.embed(doc)
    p_full = ref_proba(desk_model, E)
    p_without = ref_proba(desk_model, E[:-1])
    i = int(np.argmax(p_full))
    assert int(np.argmax(p_without)) == i
    assert score_loo(desk_model, doc, k) == pytest.approx(p_full[i] - p_without[i], abs=1e-12)


def test_repeated_words_score_equally(desk_model):
    doc = make_document("d", "good good good good", "pos")
    loo = [score_loo(desk_model, doc, k) for k in range(4)]
    grad = [score_grad(desk_model, doc, k) for k in range(4)]
    assert len(set(loo)) == 1
    assert len(set(grad)) == 1


def test_grad_of_oov_token_is_zero(desk_model):
    doc = make_document("d", "good qwzxv movie", "pos")
    assert score_grad(desk_model, doc, 1) == 0.0


def test_grad_l2_scalar_is_gradient_norm(desk_model):
    from advtext.classifier import input_gradient
    doc = make_document("d", "The plot was good .", "pos")
    label = desk_model.label_order[int(np.argmax(ref_proba(desk_model, desk_model.embed(doc))))]
    g = input_gradient(desk_model, doc, label)
    assert score_grad(desk_model, doc, 3, "l2") == pytest.approx(np.linalg.norm(g[3]))
    assert score_grad(desk_model, doc, 3, "dot") == pytest.approx(-g[3] @ desk_model.embed(doc)[3])


def test_grad_and_loo_rankings_agree(desk_model, test_corpus):
    rhos = []
    for doc in test_corpus.documents[:50]:
        loo = {e.position: e.score for e in rank_words(desk_model, doc, "loo")}
        grad = {e.position: e.score for e in rank_words(desk_model, doc, "grad")}
        keys = sorted(loo)
        rho = spearmanr([loo[k] for k in keys], [grad[k] for k in keys]).statistic
        rhos.append(rho)
    assert np.mean(rhos) > 0
    assert np.median(rhos) > 0


def test_single_word_ranking(desk_model):
    doc = make_document("d", "good", "pos")
    ranking = rank_words(desk_model, doc)
    assert len(ranking) == 1 and ranking.entries[0].word == "good"


def test_good_outranks_movie(desk_model):
    doc = make_document("d", "The movie was good .", "pos")
    assert desk_model.label_order[int(np.argmax(ref_proba(desk_model, desk_model.embed(doc))))] == "pos"
    order = [e.word for e in rank_words(desk_model, doc, "loo")]
    assert order.index("good") < order.index("movie")


@pytest.mark.parametrize("method", ["loo", "grad"])
def test_ranking_covers_word_positions(desk_model, test_corpus, method):
    for doc in test_corpus.documents[:30]:
        ranking = rank_words(desk_model, doc, method)
        expected = sorted(t.position for t in doc.tokens if t.pos != OTHER)
        assert sorted(e.position for e in ranking) == expected
        scores = [e.score for e in ranking]
        assert scores == sorted(scores, reverse=True)
        assert ranking.label in desk_model.label_order


def _recase(doc, flips):
    toks = [Token(t.surface.upper() if f else t.surface.lower(), t.normalized, t.pos, t.position)
            for t, f in zip(doc.tokens, flips)]
    return doc.with_tokens(toks)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 99), st.lists(st.booleans(), min_size=80, max_size=80))
def test_loo_ranking_ignores_casing(desk_model, test_corpus, index, flips):
    doc = test_corpus.documents[index]
    recased = _recase(doc, flips)
    a = [(e.position, e.score) for e in rank_words(desk_model, doc, "loo")]
    b = [(e.position, e.score) for e in rank_words(desk_model, recased, "loo")]
    assert a == b


def test_scoring_is_pure(desk_model, test_corpus):
    doc = test_corpus.documents[3]
    for method in ("loo", "grad"):
        assert rank_words(desk_model, doc, method) == rank_words(desk_model, doc, method)


def test_scoring_errors(desk_model):
    doc = make_document("d", "good film", "pos")
    with pytest.raises(IndexOutOfRange):
        score_loo(desk_model, doc, 2)
    with pytest.raises(IndexOutOfRange):
        score_grad(desk_model, doc, -1)
    empty = Document("e", (), "pos")
    with pytest.raises(EmptyDocument):
        rank_words(desk_model, empty)
    with pytest.raises(ValueError):
        rank_words(desk_model, doc, "saliency")


def test_one_token_loo_uses_uniform_remainder(desk_model):
    doc = Document("d", (Token("good", "good", NOUN, 0),), "pos")
    p = ref_proba(desk_model, desk_model.embed(doc))
    # deleting the only word leaves (0.5, 0.5); argmax of a tie is the first label
    expected, _ = loo_brute_force(desk_model, desk_model.embed(doc), 0)
    assert score_loo(desk_model, doc, 0) == pytest.approx(expected, abs=1e-12)
    assert expected in (p.max() - 0.5, p.max() + 0.5)
