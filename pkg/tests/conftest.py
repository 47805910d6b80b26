import time

import pytest

from subtok.bpe import BpeSegmenter, train_bpe
from subtok.corpus import bundled_data_path, count_word_types, stream_sentences
from subtok.lm import LmModel, ModelConfig, TrainConfig, WordVocab, train
from subtok.ulm import train_ulm

TOY_TRAIN = bundled_data_path("toy_train.txt")
TOY_VALID = bundled_data_path("toy_valid.txt")


@pytest.fixture(scope="session")
def toy_train_lines():
    return TOY_TRAIN.read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def toy_valid_lines():
    return TOY_VALID.read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def toy_stats():
    return count_word_types(TOY_TRAIN)


@pytest.fixture(scope="session")
def toy_sentences(toy_train_lines):
    return list(stream_sentences(toy_train_lines))


@pytest.fixture(scope="session")
def toy_valid_sentences(toy_valid_lines):
    return list(stream_sentences(toy_valid_lines))


@pytest.fixture(scope="session")
def bpe500(toy_stats):
    return train_bpe(toy_stats, 500)


@pytest.fixture(scope="session")
def ulm500(toy_stats):
    return train_ulm(toy_stats, 500)


@pytest.fixture(scope="session")
def bpe_segmenter(toy_train_lines):
    return BpeSegmenter(vocab_size=500).fit(toy_train_lines)


@pytest.fixture(scope="session")
def toy_lm(bpe_segmenter, toy_sentences):
    """The toy-preset model trained for 20 epochs; shared by LM tests and
    the acceptance suite.  Also records the wall-clock training time."""
    word_vocab = WordVocab.build(toy_sentences, 5000)
    model = LmModel(bpe_segmenter.vocab_, word_vocab, ModelConfig(), seed=42)
    cfg = TrainConfig(seed=42, batch_size=64, epochs=20)
    start = time.perf_counter()
    report = train(model, toy_sentences, cfg, bpe_segmenter)
    elapsed = time.perf_counter() - start
    return {
        "model": model,
        "segmenter": bpe_segmenter,
        "word_vocab": word_vocab,
        "report": report,
        "elapsed": elapsed,
    }
