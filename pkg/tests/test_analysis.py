import json

from subtok.analysis import segmentation_consistency, vocab_overlap
from subtok.bpe import BpeSegmenter
from subtok.corpus import stream_sentences
from subtok.ulm import UnigramSegmenter
from subtok.vocab import SubwordVocab


def bpe_vocab(forms):
    return SubwordVocab({f: 1 for f in forms}, "bpe")


def test_identical_vocabs_have_rate_one():
    a = bpe_vocab(["a", "b", "ab"])
    report = vocab_overlap(a, a)
    assert report.rate == 1.0
    assert report.shared_count == 3


def test_half_overlap():
    a = bpe_vocab(["a", "b", "c", "d"])
    b = bpe_vocab(["a", "b", "x", "y"])
    report = vocab_overlap(a, b)
    assert report.shared_count == 2
    assert report.rate == 0.5


def test_shared_count_is_symmetric_and_bounded():
    a = bpe_vocab(["a", "b", "c"])
    b = bpe_vocab(["b", "c", "d", "e"])
    ab = vocab_overlap(a, b)
    ba = vocab_overlap(b, a)
    assert ab.shared_count == ba.shared_count == 2
    assert ab.shared_count <= min(ab.size_a, ab.size_b)
    # unequal sizes divide by the smaller vocabulary
    assert ab.rate == 2 / 3
    assert ba.rate == 2 / 3


def test_single_char_exclusion_flag():
    a = bpe_vocab(["a", "b", "ab", "cd"])
    b = bpe_vocab(["a", "b", "ab", "xy"])
    full = vocab_overlap(a, b)
    multi = vocab_overlap(a, b, include_single_chars=False)
    assert full.shared_count == 3
    assert multi.shared_count == 1
    assert multi.rate == 0.5


def test_overlap_report_serialization():
    report = vocab_overlap(bpe_vocab(["a"]), bpe_vocab(["a"]), "x.vocab", "y.vocab")
    assert "x.vocab\ty.vocab" in report.format_tsv()
    payload = json.loads(report.to_json())
    assert payload["rate"] == 1.0


def test_deterministic_segmenters_are_fully_consistent(toy_train_lines):
    lines = toy_train_lines[:150]
    corpus = list(stream_sentences(lines))
    for segmenter in (
        BpeSegmenter(vocab_size=120).fit(lines),
        UnigramSegmenter(vocab_size=120).fit(lines),
    ):
        report = segmentation_consistency(segmenter, corpus)
        assert report.consistent_fraction == 1.0
        assert all(n == 1 for n in report.distinct_segmentations.values())


def test_single_word_type_corpus():
    lines = ["hop hop", "hop"]
    segmenter = BpeSegmenter(vocab_size=4).fit(lines)
    report = segmentation_consistency(segmenter, stream_sentences(lines))
    assert list(report.distinct_segmentations) == ["hop"]
    assert report.consistent_fraction == 1.0


def test_consistency_report_serialization():
    lines = ["hop"]
    segmenter = BpeSegmenter(vocab_size=4).fit(lines)
    report = segmentation_consistency(segmenter, stream_sentences(lines))
    assert "#consistent_fraction\t1.000000" in report.format_tsv()
    assert json.loads(report.to_json())["consistent_fraction"] == 1.0
