import math

import pytest

from subtok.errors import FormatError, ParameterError
from subtok.vocab import (
    MergeTable,
    Segmentation,
    SubwordVocab,
    format_vocab,
    parse_segmented_header,
    read_merges,
    read_vocab,
    render_segmented_line,
    segmented_header,
    strip_segmented_line,
    write_merges,
    write_vocab,
)


def test_vocab_round_trip_bpe(tmp_path):
    vocab = SubwordVocab({"a": 5, "b": 3, "ab": 5, "</w>": 8}, "bpe", "</w>")
    path = tmp_path / "v.vocab"
    write_vocab(vocab, path)
    loaded = read_vocab(path)
    assert loaded.entries == vocab.entries
    assert loaded.algo_tag == "bpe"
    assert loaded.marker == "</w>"


def test_vocab_round_trip_ulm_exact_floats(tmp_path):
    entries = {"a": math.log(0.25), "b": math.log(0.25), "ab": math.log(0.5)}
    vocab = SubwordVocab(entries, "ulm")
    path = tmp_path / "v.vocab"
    write_vocab(vocab, path)
    loaded = read_vocab(path)
    assert loaded.entries == entries  # repr round-trips doubles bit-exactly
    assert loaded.marker is None


def test_vocab_file_sorted_by_score_then_form():
    vocab = SubwordVocab({"b": 2, "a": 2, "c": 5}, "bpe")
    lines = format_vocab(vocab).splitlines()
    assert lines[0] == "#subtok-vocab v1 algo=bpe size=3"
    assert lines[1:] == ["c\t5", "a\t2", "b\t2"]


def test_vocab_header_mismatches_rejected(tmp_path):
    path = tmp_path / "bad.vocab"
    path.write_text("#subtok-vocab v2 algo=bpe size=1\na\t1\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_vocab(path)
    path.write_text("#subtok-vocab v1 algo=bpe size=2\na\t1\n", encoding="utf-8")
    with pytest.raises(FormatError, match="size"):
        read_vocab(path)


def test_vocab_duplicate_entry_rejected(tmp_path):
    path = tmp_path / "dup.vocab"
    path.write_text("#subtok-vocab v1 algo=bpe size=2\na\t1\na\t2\n", encoding="utf-8")
    with pytest.raises(FormatError, match="duplicate"):
        read_vocab(path)


def test_unnormalized_ulm_vocab_rejected(tmp_path):
    path = tmp_path / "u.vocab"
    path.write_text(
        "#subtok-vocab v1 algo=ulm size=2\na\t-0.1\nb\t-0.1\n", encoding="utf-8"
    )
    with pytest.raises(ParameterError, match="not normalized"):
        read_vocab(path)


def test_empty_form_rejected():
    with pytest.raises(ParameterError):
        SubwordVocab({"": 1.0}, "bpe")


def test_merges_round_trip(tmp_path):
    table = MergeTable([("a", "b"), ("ab", "c")], "</w>")
    path = tmp_path / "m.merges"
    write_merges(table, path)
    loaded = read_merges(path)
    assert loaded.rules == table.rules
    assert loaded.marker == "</w>"


def test_merges_validate_order():
    MergeTable([("a", "b"), ("ab", "c")]).validate()
    with pytest.raises(ParameterError):
        MergeTable([("ab", "c"), ("a", "b")]).validate()


def test_merges_validate_accepts_marker_operand():
    MergeTable([("g", "</w>"), ("n", "g</w>")], "</w>").validate()


def test_segmentation_surface_strips_one_marker():
    seg = Segmentation("sing", ("s", "ing</w>"))
    assert seg.surface("</w>") == "sing"
    tricky = Segmentation("x</w>", ("x", "</w></w>"))
    assert tricky.surface("</w>") == "x</w>"


def test_segmented_line_round_trip():
    segs = [
        Segmentation("useless", ("use", "less</w>")),
        Segmentation("cats", ("cat", "s</w>")),
    ]
    line = render_segmented_line(segs, strip_marker="</w>")
    assert line == "▁use less ▁cat s"
    assert strip_segmented_line(line) == "useless cats"


def test_segmented_header_round_trip():
    assert parse_segmented_header(segmented_header("▁")) == "▁"
    with pytest.raises(FormatError):
        parse_segmented_header("#subtok-segmented v2 word-marker=▁")
