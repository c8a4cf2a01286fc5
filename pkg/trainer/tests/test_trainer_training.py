import pytest

from qtind_trainer.data import TrainingTriple, build_vocab
from qtind_trainer.losses import LossConfig
from qtind_trainer.model import FULL_QUERY, TERM_INDEPENDENT, ToyScorerModel, pair_margin_term_ind
from qtind_trainer.synthdata import synthetic_triples
from qtind_trainer.training import TrainConfig, evaluate_loss, gradient_check, train


class TestTrain:
    def test_heldout_loss_decreases_with_planted_signal(self):
        train_triples = synthetic_triples(200, seed=11)
        held_out = synthetic_triples(80, seed=12)
        vocab = build_vocab(train_triples)
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=0)
        before = evaluate_loss(model, held_out, LossConfig("ranknet"))
        train(model, train_triples, LossConfig("ranknet"), TrainConfig(epochs=6, seed=0))
        after = evaluate_loss(model, held_out, LossConfig("ranknet"))
        assert after < before

    def test_hinge_at_zero_margin_is_exactly_one(self):
        # Reordering the same bag of words scores identically, so the margin
        # is exactly 0 and the hinge loss is exactly its margin parameter.
        triple = TrainingTriple(("m00",), ("a", "b", "m00"), ("m00", "a", "b"))
        vocab = build_vocab([triple])
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=1)
        assert evaluate_loss(model, [triple], LossConfig("hinge", margin=1.0)) == 1.0

    def test_full_mode_trains(self):
        triples = synthetic_triples(150, seed=13)
        vocab = build_vocab(triples)
        model = ToyScorerModel(vocab, mode=FULL_QUERY, seed=0)
        history = train(model, triples, LossConfig("hinge"), TrainConfig(epochs=5, seed=0))
        assert history[-1] < history[0]

    def test_empty_stream_rejected(self):
        model = ToyScorerModel({"a": 1})
        with pytest.raises(ValueError):
            train(model, [], LossConfig())

    def test_trained_scoring_matches_margin_definition(self):
        triples = synthetic_triples(100, seed=14)
        vocab = build_vocab(triples)
        model = ToyScorerModel(vocab, mode=TERM_INDEPENDENT, seed=0)
        train(model, triples, LossConfig(), TrainConfig(epochs=2, seed=0))
        t = triples[0]
        via_sums = model.score_query_term_independent(t.query, t.pos_doc) - (
            model.score_query_term_independent(t.query, t.neg_doc)
        )
        assert via_sums == pytest.approx(pair_margin_term_ind(model, t), rel=1e-5, abs=1e-6)


class TestGradientCheck:
    def test_term_independent_ranknet(self):
        triples = synthetic_triples(10, seed=21)
        model = ToyScorerModel(build_vocab(triples), mode=TERM_INDEPENDENT, seed=2)
        assert gradient_check(model, triples, LossConfig("ranknet"), n_coords=25) < 1e-4

    def test_full_query_hinge(self):
        triples = synthetic_triples(10, seed=22)
        model = ToyScorerModel(build_vocab(triples), mode=FULL_QUERY, seed=2)
        assert gradient_check(model, triples, LossConfig("hinge", margin=2.0), n_coords=25) < 1e-4

    def test_relu_output_mode(self):
        triples = synthetic_triples(10, seed=23)
        model = ToyScorerModel(build_vocab(triples), mode=TERM_INDEPENDENT, relu_output=True, seed=2)
        assert gradient_check(model, triples, LossConfig("ranknet"), n_coords=20) < 1e-4
