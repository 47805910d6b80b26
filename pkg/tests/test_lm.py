import math

import numpy as np
import pytest

from subtok.autodiff import Tensor
from subtok.bpe import BpeSegmenter
from subtok.corpus import BOS, EOS, stream_sentences
from subtok.errors import NumericalError, ParameterError
from subtok.lm import (
    UNK,
    LmModel,
    ModelConfig,
    TrainConfig,
    WordVocab,
    extract_embeddings,
    forward_sentence,
    load_lm,
    nll_loss,
    perplexity,
    save_lm,
    train,
    unigram_baseline_ppl,
)

LINES = [
    "the cat walked home",
    "a dog ran off",
    "the bird sang a song",
    "cats walk slowly",
    "dogs run home",
    "the cat sang",
    "a bird walked",
]


@pytest.fixture(scope="module")
def small_setup():
    segmenter = BpeSegmenter(vocab_size=40).fit(LINES)
    sentences = list(stream_sentences(LINES))
    word_vocab = WordVocab.build(sentences, 100)
    config = ModelConfig(d_sub=6, kernel_widths=(1, 2), kernel_channels=(4, 4),
                         highway_layers=1, hidden_size=8, num_layers=2, dtype="float64")
    return segmenter, sentences, word_vocab, config


def fresh_model(small_setup, seed=11):
    segmenter, sentences, word_vocab, config = small_setup
    return LmModel(segmenter.vocab_, word_vocab, config, seed=seed)


class TestWordVocab:
    def test_build_orders_by_count_then_form(self):
        sents = list(stream_sentences(["b a", "a c", "c"]))
        vocab = WordVocab.build(sents, 2)
        assert vocab.forms == [UNK, BOS, EOS, "a", "c"]

    def test_unknown_maps_to_unk(self):
        vocab = WordVocab([UNK, BOS, EOS, "a"])
        assert vocab.id_of("zzz") == vocab.unk_id
        assert vocab.id_of("a") == 3

    def test_requires_reserved_prefix(self):
        with pytest.raises(ParameterError):
            WordVocab(["a", "b", "c"])


class TestForwardSentence:
    def test_rows_are_normalized(self, small_setup):
        model = fresh_model(small_setup)
        result = forward_sentence(model, small_setup[1][0], small_setup[0])
        for rows in (result.fwd_rows, result.bwd_rows):
            np.testing.assert_allclose(np.exp(rows.data).sum(axis=1), 1.0, atol=1e-6)

    def test_zero_output_affine_gives_uniform(self, small_setup):
        segmenter, sentences, word_vocab, _ = small_setup
        model = fresh_model(small_setup)
        model.out_w.data[:] = 0.0
        model.out_b.data[:] = 0.0
        result = forward_sentence(model, sentences[0], segmenter)
        expected = math.log(word_vocab.size)
        np.testing.assert_allclose(-result.fwd_rows.data, expected, atol=1e-9)
        assert result.loss.item() == pytest.approx(expected, abs=1e-9)

    def test_direction_symmetry_with_mirrored_weights(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup, seed=21)
        mirror = fresh_model(small_setup, seed=21)
        for mine, theirs in zip(mirror.f_stack, model.b_stack):
            for p, q in zip(mine.parameters(), theirs.parameters()):
                p.data = q.data.copy()
        for mine, theirs in zip(mirror.b_stack, model.f_stack):
            for p, q in zip(mine.parameters(), theirs.parameters()):
                p.data = q.data.copy()
        mirror.bos_vec.data = model.eos_vec.data.copy()
        mirror.eos_vec.data = model.bos_vec.data.copy()

        sentence = sentences[0]
        reversed_sentence = [BOS, *reversed(sentence[1:-1]), EOS]
        fwd = forward_sentence(model, sentence, segmenter).fwd_rows.data
        bwd = forward_sentence(mirror, reversed_sentence, segmenter).bwd_rows.data
        np.testing.assert_allclose(fwd, bwd, atol=1e-12)

    def test_two_direction_mean_matches_hand_sum(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        sentence = [BOS, "the", "cat", "sang", EOS]
        result = forward_sentence(model, sentence, segmenter)
        rows_f, rows_b = result.fwd_rows.data, result.bwd_rows.data
        n_rows = rows_f.shape[0]
        assert n_rows == 4  # 3 words + sentinel prediction
        hand = 0.0
        for k in range(n_rows):
            hand -= rows_f[k, result.fwd_targets[k]]
            hand -= rows_b[k, result.bwd_targets[k]]
        assert result.loss.item() == pytest.approx(hand / (2 * n_rows), rel=1e-12)

    def test_forward_prediction_ignores_future_words(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        base = forward_sentence(model, [BOS, "the", "cat", "sang", EOS], segmenter)
        poked = forward_sentence(model, [BOS, "the", "cat", "walked", EOS], segmenter)
        # rows 0..2 consumed only <bos>, the, cat -> unchanged
        np.testing.assert_array_equal(base.fwd_rows.data[:3], poked.fwd_rows.data[:3])
        assert not np.allclose(base.fwd_rows.data[3], poked.fwd_rows.data[3])
        # backward direction: perturbing the first word leaves its first rows alone
        base_b = forward_sentence(model, [BOS, "the", "cat", "sang", EOS], segmenter)
        poked_b = forward_sentence(model, [BOS, "a", "cat", "sang", EOS], segmenter)
        np.testing.assert_array_equal(base_b.bwd_rows.data[:3], poked_b.bwd_rows.data[:3])

    def test_empty_or_unwrapped_sentence_rejected(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        with pytest.raises(ParameterError):
            forward_sentence(model, [], segmenter)
        with pytest.raises(ParameterError):
            forward_sentence(model, ["the", "cat"], segmenter)

    def test_zero_word_sentence_allowed(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        result = forward_sentence(model, [BOS, EOS], segmenter)
        assert result.fwd_rows.shape[0] == 1


class TestNllLoss:
    def test_perfect_prediction_is_zero(self):
        rows = Tensor(np.log(np.array([[1.0 - 1e-300, 1e-300], [1e-300, 1.0 - 1e-300]])))
        assert nll_loss(rows, [0, 1]).item() == pytest.approx(0.0, abs=1e-12)

    def test_uniform_hundred_way(self):
        rows = Tensor(np.full((5, 100), math.log(1 / 100)))
        assert nll_loss(rows, [3, 7, 99, 0, 42]).item() == pytest.approx(math.log(100))

    def test_target_out_of_range(self):
        rows = Tensor(np.zeros((2, 4)))
        with pytest.raises(ParameterError):
            nll_loss(rows, [0, 4])


class TestPerplexity:
    def test_uniform_model_ppl_equals_vocab_size(self):
        words = [f"w{i:02d}" for i in range(97)]
        word_vocab = WordVocab([UNK, BOS, EOS] + words)
        assert word_vocab.size == 100
        lines = [" ".join(words[:5]), " ".join(words[5:8])]
        segmenter = BpeSegmenter(vocab_size=15).fit(lines)
        config = ModelConfig(d_sub=4, kernel_widths=(1,), kernel_channels=(4,),
                             highway_layers=1, hidden_size=4, num_layers=1, dtype="float64")
        model = LmModel(segmenter.vocab_, word_vocab, config, seed=0)
        model.out_w.data[:] = 0.0
        model.out_b.data[:] = 0.0
        report = perplexity(model, list(stream_sentences(lines)), segmenter)
        assert report.forward == pytest.approx(100.0, abs=1e-6)
        assert report.backward == pytest.approx(100.0, abs=1e-6)
        assert report.combined == pytest.approx(100.0, abs=1e-6)

    def test_empty_corpus_rejected(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        with pytest.raises(ParameterError):
            perplexity(model, [], segmenter)

    def test_batching_does_not_change_result(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        one = perplexity(model, sentences, segmenter, batch_size=1)
        many = perplexity(model, sentences, segmenter, batch_size=64)
        assert one.combined == pytest.approx(many.combined, rel=1e-9)


class TestUnigramBaseline:
    def test_hand_computed(self):
        sentences = list(stream_sentences(["a b", "a"]))
        vocab = WordVocab([UNK, BOS, EOS, "a", "b"])
        # two occurrences of "a" and one of "b", each a target in both
        # directions; one <bos> and one <eos> event per sentence
        counts = {"a": 4, "b": 2, "bos": 2, "eos": 2}
        total = sum(counts.values())
        entropy = -sum(c / total * math.log(c / total) for c in counts.values())
        assert unigram_baseline_ppl(sentences, vocab) == pytest.approx(math.exp(entropy))

    def test_unk_mapping_matches_model_vocab(self):
        sentences = list(stream_sentences(["a rare", "a"]))
        vocab = WordVocab([UNK, BOS, EOS, "a"])
        counts = {"a": 4, "unk": 2, "bos": 2, "eos": 2}
        total = sum(counts.values())
        entropy = -sum(c / total * math.log(c / total) for c in counts.values())
        assert unigram_baseline_ppl(sentences, vocab) == pytest.approx(math.exp(entropy))


class TestTraining:
    def config(self, **kw):
        base = dict(seed=5, batch_size=4, epochs=2, learning_rate=1e-2)
        base.update(kw)
        return TrainConfig(**base)

    def test_same_seed_identical_trajectory(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        r1 = train(fresh_model(small_setup), sentences, self.config(), segmenter)
        r2 = train(fresh_model(small_setup), sentences, self.config(), segmenter)
        assert r1.epochs[0].train_ppl == r2.epochs[0].train_ppl
        assert [e.train_ppl for e in r1.epochs] == [e.train_ppl for e in r2.epochs]

    def test_zero_learning_rate_is_inert(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        before = {p.name: p.data.copy() for p in model.parameters()}
        report = train(model, sentences, self.config(learning_rate=0.0, epochs=3), segmenter)
        for p in model.parameters():
            np.testing.assert_array_equal(p.data, before[p.name])
        ppls = [e.train_ppl for e in report.epochs]
        assert ppls[0] == pytest.approx(ppls[1], rel=1e-12)
        assert ppls[1] == pytest.approx(ppls[2], rel=1e-12)

    def test_loss_decreases_on_small_corpus(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        report = train(model, sentences * 4, self.config(epochs=5), segmenter)
        ppls = [e.train_ppl for e in report.epochs]
        assert ppls[-1] < ppls[0]

    def test_non_finite_loss_aborts_with_diagnostics(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        model.out_b.data[0] = np.nan
        with pytest.raises(NumericalError, match="epoch 1"):
            train(model, sentences, self.config(), segmenter)

    def test_sgd_optimizer_supported(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        report = train(model, sentences, self.config(optimizer="sgd"), segmenter)
        assert len(report.epochs) == 2

    def test_validation_column(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        report = train(fresh_model(small_setup), sentences, self.config(epochs=1),
                       segmenter, valid_corpus=sentences[:2])
        assert report.epochs[0].valid_ppl is not None
        lines = report.format_lines().splitlines()
        assert lines[0].count("\t") == 2

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            TrainConfig(seed=1, optimizer="momentum")
        with pytest.raises(ParameterError):
            TrainConfig(seed=1, epochs=0)
        with pytest.raises(ParameterError):
            TrainConfig(seed=1, clip_norm=0.0)


class TestEmbeddings:
    def test_dimension_formula(self, small_setup):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        embs = extract_embeddings(model, sentences[0], segmenter)
        assert len(embs) == len(sentences[0]) - 2
        d = model.config.d_cnn + 2 * model.config.hidden_size
        assert all(e.shape == (d,) for e in embs)

    def test_toy_preset_dimension_is_176(self):
        assert ModelConfig().d_cnn + 2 * ModelConfig().hidden_size == 176

    def test_single_word_sentence(self, small_setup):
        segmenter, _, _, _ = small_setup
        model = fresh_model(small_setup)
        embs = extract_embeddings(model, [BOS, "cat", EOS], segmenter)
        assert len(embs) == 1
        assert np.all(np.isfinite(embs[0]))

    def test_same_word_differs_across_contexts(self, toy_lm):
        model, segmenter = toy_lm["model"], toy_lm["segmenter"]
        a = extract_embeddings(model, [BOS, "the", "cat", "sang", EOS], segmenter)
        b = extract_embeddings(model, [BOS, "a", "dog", "follows", "the", "cat", EOS], segmenter)
        cat_a, cat_b = a[1], b[4]
        assert not np.allclose(cat_a, cat_b)
        d = model.config.d_cnn
        np.testing.assert_array_equal(cat_a[:d], cat_b[:d])  # static input part matches


class TestCheckpointRoundTrip:
    def test_save_load_preserves_behaviour(self, small_setup, tmp_path):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        train(model, sentences, TrainConfig(seed=9, epochs=1, batch_size=4), segmenter)
        path = tmp_path / "m.ckpt"
        save_lm(model, segmenter, path, vocab_file_hash="abc123")
        loaded, loaded_segmenter = load_lm(path)
        orig = perplexity(model, sentences, segmenter)
        redone = perplexity(loaded, sentences, loaded_segmenter)
        assert orig.combined == pytest.approx(redone.combined, rel=1e-12)
        seg_a = segmenter.segment_word("walked")
        seg_b = loaded_segmenter.segment_word("walked")
        assert seg_a == seg_b

    def test_resave_is_byte_identical(self, small_setup, tmp_path):
        segmenter, sentences, _, _ = small_setup
        model = fresh_model(small_setup)
        p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        save_lm(model, segmenter, p1)
        loaded, loaded_segmenter = load_lm(p1)
        save_lm(loaded, loaded_segmenter, p2)
        assert p1.read_bytes() == p2.read_bytes()
