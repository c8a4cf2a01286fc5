import pytest

from qtind_trainer.data import TrainingTriple, build_vocab
from qtind_trainer.model import (
    FULL_QUERY,
    TERM_INDEPENDENT,
    ModeError,
    ToyScorerModel,
    load_model,
    pair_margin_full,
    pair_margin_term_ind,
    save_model,
)
from qtind_trainer.synthdata import synthetic_triples


@pytest.fixture(scope="module")
def triples():
    return synthetic_triples(40, seed=5)


@pytest.fixture(scope="module")
def vocab(triples):
    return build_vocab(triples)


class TestTrainingTriple:
    def test_identical_docs_rejected(self):
        with pytest.raises(ValueError):
            TrainingTriple(("q",), ("a", "b"), ("a", "b"))

    def test_reordered_docs_allowed(self):
        TrainingTriple(("q",), ("a", "b"), ("b", "a"))


class TestModel:
    def test_parameter_budget(self, vocab):
        model = ToyScorerModel(vocab, dim=24, hidden=16)
        assert model.parameter_count() <= 100_000

    def test_scores_are_finite(self, vocab, triples):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=1)
        for triple in triples[:10]:
            for term in triple.query:
                assert abs(model.score_term(term, triple.pos_doc)) < 1e6

    def test_oov_terms_contribute_zero(self, vocab):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=1)
        doc = ("m00", "c001", "c002")
        base = model.score_query_term_independent(("m00",), doc)
        with_oov = model.score_query_term_independent(("m00", "zz_never_seen"), doc)
        assert with_oov == pytest.approx(base, abs=1e-6)

    def test_doc_order_invariance(self, vocab):
        # Kernel pooling sums over document positions: bags, not sequences.
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=1)
        a = model.score_term("m00", ("c001", "c002", "m01"))
        b = model.score_term("m00", ("m01", "c002", "c001"))
        assert a == pytest.approx(b, rel=1e-6)

    def test_save_load_round_trip(self, vocab, triples, tmp_path):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=3)
        path = tmp_path / "model.pt"
        save_model(model, path)
        again = load_model(path)
        assert again.mode == TERM_INDEPENDENT
        triple = triples[0]
        for term in triple.query:
            assert again.score_term(term, triple.pos_doc) == model.score_term(term, triple.pos_doc)


class TestMargins:
    def test_identical_inputs_zero_margin_full(self, vocab, triples):
        model = ToyScorerModel(vocab, mode=FULL_QUERY, seed=2)
        t = triples[0]
        same = model.score_full(t.query, t.pos_doc) - model.score_full(t.query, t.pos_doc)
        assert same == 0.0

    def test_full_margin_matches_two_forward_passes(self, vocab, triples):
        model = ToyScorerModel(vocab, mode=FULL_QUERY, seed=2)
        t = triples[1]
        margin = pair_margin_full(model, t)
        # Oracle: recompute the two forward passes independently.
        want = model.score_full(t.query, t.pos_doc) - model.score_full(t.query, t.neg_doc)
        assert margin == pytest.approx(want, abs=1e-9)

    def test_antisymmetry(self, vocab, triples):
        full = ToyScorerModel(vocab, mode=FULL_QUERY, seed=2)
        term_ind = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=2)
        for t in triples[:5]:
            swapped = TrainingTriple(t.query, t.neg_doc, t.pos_doc)
            assert pair_margin_full(full, swapped) == pytest.approx(-pair_margin_full(full, t), abs=1e-6)
            assert pair_margin_term_ind(term_ind, swapped) == pytest.approx(
                -pair_margin_term_ind(term_ind, t), abs=1e-6
            )

    def test_single_term_query_margins_agree_across_modes(self, vocab):
        # For a one-term query the term-independent sum is a single forward
        # pass, matching the full-query margin of the same architecture.
        full = ToyScorerModel(vocab, mode=FULL_QUERY, seed=4)
        term_ind = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=4)
        t = TrainingTriple(("m00",), ("m00", "c001"), ("m01", "c002"))
        assert pair_margin_term_ind(term_ind, t) == pytest.approx(pair_margin_full(full, t), abs=1e-6)

    def test_per_term_margin_sums(self, vocab):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=4)
        t = TrainingTriple(("m00", "c001"), ("m00", "c003"), ("m01", "c004"))
        per_term = sum(
            model.score_term(x, t.pos_doc) - model.score_term(x, t.neg_doc) for x in t.query
        )
        assert pair_margin_term_ind(model, t) == pytest.approx(per_term, abs=1e-9)

    def test_mode_mismatch_errors(self, vocab, triples):
        full = ToyScorerModel(vocab, mode=FULL_QUERY)
        term_ind = ToyScorerModel(vocab, mode=TERM_INDEPENDENT)
        with pytest.raises(ModeError):
            pair_margin_full(term_ind, triples[0])
        with pytest.raises(ModeError):
            pair_margin_term_ind(full, triples[0])


class TestSumDecomposition:
    def test_batched_equals_per_term_sum(self, vocab, triples):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=6)
        for t in triples[:10]:
            batched = model.score_query_term_independent(t.query, t.pos_doc)
            summed = sum(model.score_term(x, t.pos_doc) for x in t.query)
            assert batched == pytest.approx(summed, rel=1e-5, abs=1e-7)

    def test_duplicate_query_terms_double(self, vocab):
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=6)
        doc = ("m00", "c001")
        single = model.score_query_term_independent(("m00",), doc)
        doubled = model.score_query_term_independent(("m00", "m00"), doc)
        assert doubled == pytest.approx(2 * single, rel=1e-5, abs=1e-7)
