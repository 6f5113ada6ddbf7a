import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advtext.attack import (
    INSERT, REMOVE, REPLACE, AttackConfig, AttackResult, Edit, apply_edit, choose_candidate, craft,
    replay,
)
from advtext.candidates import GENRE, SYNONYM, TYPO, Candidate, CandidatePool, KeywordSets
from advtext.classifier import Model, ModelConfig, predict_proba
from advtext.errors import ConfigError, EmptyDocument, IndexOutOfRange
from advtext.lexicons import Dictionary, EmbeddingTable, Lexicons, Thesaurus
from advtext.textcore import ADJ, ADV, NOUN, Document, default_lexicon, make_document

from oracles import ref_proba

# A hand-built world: the first embedding coordinate carries sentiment and the
# model predicts pos exactly when its mean over the document is positive.
_VECTORS = {
    "the": [0.0, 1.0], "movie": [0.0, 0.5], "was": [0.0, -0.5], "plot": [0.1, 0.2],
    "funny": [2.0, 0.3], "fair": [0.5, 0.1], "extremely": [3.0, 0.0], "nice": [1.0, 0.2],
    "awful": [-3.0, 0.0], "hilarious": [-4.0, 0.1], "dull": [-1.0, 0.0], "very": [0.2, 0.4],
}


def toy_model():
    words = sorted(_VECTORS)
    table = EmbeddingTable(words, np.array([_VECTORS[w] for w in words]))
    W1 = np.array([[1.0, 0.0], [-1.0, 0.0]])
    W2 = np.array([[-1.0, 1.0], [1.0, -1.0]])  # rows follow label_order (neg, pos)
    return Model(ModelConfig(hidden_units=2), table, W1, np.zeros(2), W2, np.zeros(2), ("neg", "pos"))


def toy_lex(thesaurus=None):
    words = set(_VECTORS)
    model = toy_model()
    return Lexicons(model.embeddings, Dictionary(words), Thesaurus(thesaurus or {}), default_lexicon())


def toy_keywords():
    # "hilarious" is a negative word overall but a positive one within comedy
    return KeywordSets(
        {"neg": frozenset({"hilarious", "awful"}), "pos": frozenset({"funny", "nice"})},
        {("neg", "comedy"): frozenset({"dull"}), ("pos", "comedy"): frozenset({"hilarious", "funny"})},
        labels=("neg", "pos"), subcategories=("comedy",),
    )


def label_of(model, doc):
    return model.label_order[int(np.argmax(ref_proba(model, model.embed(doc))))]


# -- craft examples ----------------------------------------------------------------

def test_hilarious_flips_in_one_edit():
    model, lex, ks = toy_model(), toy_lex(), toy_keywords()
    doc = make_document("h", "The movie was funny", "pos", "comedy", lex.pos)
    assert label_of(model, doc) == "pos"
    r = craft(model, doc, lex, ks)
    assert r.success and len(r.edits) == 1
    assert r.edits[0] == Edit(REPLACE, 3, "funny", "hilarious", GENRE)
    assert label_of(model, r.adversarial) == "neg"
    assert [t.surface for t in r.adversarial.tokens] == ["The", "movie", "was", "hilarious"]


def test_extremely_is_removed_first():
    model, lex = toy_model(), toy_lex({"fair": ["dull"]})
    doc = make_document("e", "The movie was extremely fair", "pos", None, lex.pos)
    ranking_top = craft(model, doc, lex, None, AttackConfig(max_changes=1))
    assert ranking_top.edits == [Edit(REMOVE, 3, old_word="extremely")]
    full = craft(model, doc, lex, None)
    assert full.edits[0].kind == REMOVE and full.success


def test_misclassified_doc_attacked_against_prediction():
    model, lex = toy_model(), toy_lex({"fair": ["awful"]})
    doc = make_document("m", "The movie was fair", "neg", None, lex.pos)
    assert label_of(model, doc) == "pos"  # stored label disagrees
    r = craft(model, doc, lex, None)
    assert r.initial_label == "pos"
    assert r.success and r.final_label == "neg" != r.initial_label


def test_misclassified_fixture_docs(desk_model, lex, keyword_sets, test_corpus):
    wrong = [d for d in test_corpus.documents if label_of(desk_model, d) != d.label]
    assert wrong
    for d in wrong:
        r = craft(desk_model, d, lex, keyword_sets)
        assert r.initial_label == label_of(desk_model, d)
        if r.success:
            assert r.final_label != r.initial_label


def test_zero_budget():
    model, lex, ks = toy_model(), toy_lex(), toy_keywords()
    doc = make_document("h", "The movie was funny", "pos", "comedy", lex.pos)
    r = craft(model, doc, lex, ks, AttackConfig(max_changes=0))
    assert r.edits == [] and not r.success and r.adversarial == doc
    assert len(r.probability_trace) == 1


def test_adjective_gets_adverb_inserted():
    model, lex = toy_model(), toy_lex({"nice": ["very"]})
    doc = make_document("i", "nice plot", "neg", None, lex.pos)
    # make "very" the only candidate and a damaging one for pos
    model_vec = dict(_VECTORS, very=[-5.0, 0.0])
    words = sorted(model_vec)
    table = EmbeddingTable(words, np.array([model_vec[w] for w in words]))
    m = Model(model.config, table, model.hidden_weights, model.hidden_bias,
              model.output_weights, model.output_bias, model.label_order)
    lex2 = Lexicons(table, lex.dictionary, lex.thesaurus, lex.pos)
    r = craft(m, doc, lex2, None, AttackConfig(max_changes=1))
    assert r.edits == [Edit(INSERT, 0, new_word="very", source=SYNONYM)]
    assert [t.normalized for t in r.adversarial.tokens] == ["very", "nice", "plot"]


def test_empty_document_rejected():
    with pytest.raises(EmptyDocument):
        craft(toy_model(), Document("e", (), "pos"), toy_lex(), None)


def test_attack_config_validation():
    with pytest.raises(ConfigError):
        AttackConfig(max_changes=-1)
    with pytest.raises(ConfigError):
        AttackConfig(adverb_threshold=0)
    with pytest.raises(ConfigError):
        AttackConfig(method="beam")


# -- choose_candidate ------------------------------------------------------------------

def test_singleton_pool():
    model = toy_model()
    doc = make_document("s", "The movie was fair", "pos")
    pool = CandidatePool(3, "fair", (Candidate("nice", ADJ, SYNONYM),))
    assert choose_candidate(model, doc, 3, pool).word == "nice"


def test_flipping_candidate_wins():
    model = toy_model()
    doc = make_document("s", "The movie was fair", "pos")
    pool = CandidatePool(3, "fair", (Candidate("nice", ADJ, SYNONYM), Candidate("awful", ADJ, TYPO),
                                     Candidate("plot", NOUN, SYNONYM)))
    flips = []
    for c in pool:
        after = apply_edit(doc, Edit(REPLACE, 3, "fair", c.word, c.source))
        flips.append(label_of(model, after) != "pos")
    assert flips == [False, True, False]
    assert choose_candidate(model, doc, 3, pool).word == "awful"


def test_all_genre_pool_without_pos_match():
    model = toy_model()
    doc = make_document("s", "The movie was fair", "pos")
    pool = CandidatePool(3, "fair", (Candidate("movie", NOUN, GENRE), Candidate("plot", NOUN, GENRE)))
    assert choose_candidate(model, doc, 3, pool) is None
    assert choose_candidate(model, doc, 3, CandidatePool(3, "fair")) is None


def test_choice_matches_brute_force(desk_model, lex, keyword_sets, test_corpus):
    from advtext.candidates import build_pool
    checked = 0
    for doc in test_corpus.documents[:40]:
        i = int(np.argmax(predict_proba(desk_model, doc)))
        for k in [t.position for t in doc.tokens if t.pos in (NOUN,)][:2]:
            pool = build_pool(doc, k, lex, keyword_sets)
            best = None
            for c in pool:
                if c.source == GENRE and c.pos != NOUN:
                    continue
                after = apply_edit(doc, Edit(REPLACE, k, doc.tokens[k].normalized, c.word, c.source), lex.pos)
                p = ref_proba(desk_model, desk_model.embed(after))[i]
                if best is None or p < best[0] - 1e-12:
                    best = (p, c.word)
            got = choose_candidate(desk_model, doc, k, pool)
            if best is None:
                assert got is None
            else:
                assert got.score == pytest.approx(best[0], abs=1e-12)
                checked += 1
    assert checked > 10


# -- apply_edit -------------------------------------------------------------------------

def test_remove_only_token():
    doc = make_document("d", "good", "pos")
    out = apply_edit(doc, Edit(REMOVE, 0, old_word="good"))
    assert len(out) == 0 and out.label == "pos" and len(doc) == 1


def test_apply_edit_errors():
    doc = make_document("d", "good film", "pos")
    with pytest.raises(IndexOutOfRange):
        apply_edit(doc, Edit(REMOVE, 2, old_word="good"))
    with pytest.raises(ValueError):
        apply_edit(doc, Edit(REMOVE, 0, old_word="film"))
    with pytest.raises(ValueError):
        Edit(INSERT, 0, old_word="x")


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_replace_is_an_involution(test_corpus, lex, data):
    doc = data.draw(st.sampled_from(test_corpus.documents))
    k = data.draw(st.sampled_from([t.position for t in doc.tokens if t.is_word]))
    old = doc.tokens[k].normalized
    new = data.draw(st.sampled_from(["nice", "awful", "movie"]))
    there = apply_edit(doc, Edit(REPLACE, k, old, new), lex.pos)
    back = apply_edit(there, Edit(REPLACE, k, new, old), lex.pos)
    assert [t.normalized for t in back.tokens] == [t.normalized for t in doc.tokens]
    assert [t.pos for t in back.tokens] == [t.pos for t in doc.tokens]
    assert back.label == doc.label and back.subcategory == doc.subcategory


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_insert_shifts_positions(test_corpus, lex, data):
    doc = data.draw(st.sampled_from(test_corpus.documents))
    k = data.draw(st.integers(0, len(doc)))
    out = apply_edit(doc, Edit(INSERT, k, new_word="very"), lex.pos)
    assert len(out) == len(doc) + 1
    assert out.tokens[k].normalized == "very" and out.tokens[k].pos == ADV
    assert [t.position for t in out.tokens] == list(range(len(out)))
    for j, t in enumerate(doc.tokens):
        assert out.tokens[j + (j >= k)].normalized == t.normalized


def test_sentence_start_casing():
    doc = make_document("d", "Nice plot. Dull acting.", "pos")
    out = apply_edit(doc, Edit(INSERT, 0, new_word="very"))
    assert [t.surface for t in out.tokens][:3] == ["Very", "nice", "plot"]
    out = apply_edit(doc, Edit(REMOVE, 0, old_word="nice"))
    assert out.tokens[0].surface == "Plot"


# -- invariants on the fixture corpus ------------------------------------------------

@pytest.fixture(scope="module")
def fixture_attacks(desk_model, lex, keyword_sets, test_corpus):
    docs = test_corpus.documents[:40]
    return docs, [craft(desk_model, d, lex, keyword_sets) for d in docs]


def test_attack_invariants(desk_model, lex, fixture_attacks):
    docs, results = fixture_attacks
    assert any(r.success for r in results)
    for d, r in zip(docs, results):
        p0 = predict_proba(desk_model, d)
        p1 = predict_proba(desk_model, r.adversarial)
        assert r.success == (int(np.argmax(p0)) != int(np.argmax(p1)))
        assert r.success == (r.final_label != r.initial_label)
        assert replay(d, r.edits, lex.pos) == r.adversarial
        n_ranked = sum(1 for t in d.tokens if t.is_word)
        assert len(r.edits) <= min(20, n_ranked)
        assert len(r.probability_trace) == len(r.edits) + 1
        assert np.array_equal(r.probability_trace[0], p0)
        assert np.array_equal(r.probability_trace[-1], p1)
        assert -1 <= r.similarity <= 1


def test_attack_is_deterministic(desk_model, lex, keyword_sets, fixture_attacks):
    docs, results = fixture_attacks
    for d, r in list(zip(docs, results))[:10]:
        again = craft(desk_model, d, lex, keyword_sets)
        assert again.to_dict() == r.to_dict()


def test_results_serialize(fixture_attacks):
    _, results = fixture_attacks
    for r in results:
        again = AttackResult.from_dict(r.to_dict())
        assert again.to_dict() == r.to_dict()
        assert [t.normalized for t in again.adversarial.tokens] == [t.normalized for t in r.adversarial.tokens]


@pytest.mark.parametrize("cfg", [
    AttackConfig(use_genre_keywords=False),
    AttackConfig(method="grad", use_genre_keywords=False),
    AttackConfig(rerank_each_step=True, use_genre_keywords=False, max_changes=5),
    AttackConfig(require_pos_match_all=True, use_genre_keywords=False),
])
def test_attack_modes_respect_invariants(desk_model, lex, keyword_sets, test_corpus, cfg):
    for d in test_corpus.documents[:15]:
        r = craft(desk_model, d, lex, keyword_sets, cfg)
        assert all(e.source != GENRE for e in r.edits)
        assert len(r.edits) <= cfg.max_changes
        assert replay(d, r.edits, lex.pos) == r.adversarial
        assert r.success == (label_of(desk_model, r.adversarial) != r.initial_label)
