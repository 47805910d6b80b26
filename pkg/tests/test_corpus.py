import pytest
from hypothesis import given, strategies as st

from subtok.corpus import (
    BOS,
    EOS,
    CorpusStats,
    count_word_types,
    format_stats,
    iter_lines,
    merge_stats,
    stream_sentences,
)
from subtok.errors import CorpusDecodeError, ParameterError

words = st.text(alphabet="abcde", min_size=1, max_size=5)
lines = st.lists(st.lists(words, max_size=6).map(" ".join), max_size=10)


def test_count_simple():
    stats = count_word_types(["a b a"])
    assert stats.word_types == {"a": 2, "b": 1}
    assert stats.total_tokens == 3
    assert stats.character_set == {"a", "b"}


def test_count_empty_input():
    stats = count_word_types([])
    assert stats.word_types == {}
    assert stats.total_tokens == 0
    assert stats.character_set == frozenset()


def test_count_multi_line():
    stats = count_word_types(["low low low", "lower", "lower"])
    assert stats.word_types == {"low": 3, "lower": 2}
    assert stats.total_tokens == 5


def test_count_from_bytes_and_path(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("x y\nx\n", encoding="utf-8")
    assert count_word_types(path).word_types == {"x": 2, "y": 1}
    assert count_word_types(b"x y\nx\n").word_types == {"x": 2, "y": 1}


def test_decode_error_names_byte_offset():
    data = "ab c\n".encode("utf-8") + b"\xff" + b"rest"
    with pytest.raises(CorpusDecodeError) as exc:
        count_word_types(data)
    assert exc.value.byte_offset == 5
    assert "byte offset 5" in str(exc.value)


def test_stats_rejects_inconsistent_totals():
    with pytest.raises(ParameterError):
        CorpusStats({"a": 2}, 3, frozenset("a"))


@given(lines)
def test_chunked_counting_matches_single_pass(all_lines):
    whole = count_word_types(all_lines)
    mid = len(all_lines) // 2
    merged = merge_stats(count_word_types(all_lines[:mid]), count_word_types(all_lines[mid:]))
    assert merged == whole


@given(lines)
def test_counts_match_stream_occurrences(all_lines):
    stats = count_word_types(all_lines)
    seen = {}
    for sentence in stream_sentences(all_lines):
        for word in sentence[1:-1]:
            seen[word] = seen.get(word, 0) + 1
    assert seen == stats.word_types


def test_determinism_identical_input():
    payload = ["the cat", "sat down", "the cat"]
    assert count_word_types(payload) == count_word_types(payload)
    assert list(stream_sentences(payload)) == list(stream_sentences(payload))


def test_stream_wraps_in_sentinels():
    assert list(stream_sentences(["a b"])) == [[BOS, "a", "b", EOS]]


def test_stream_one_sentence_per_line():
    sents = list(stream_sentences(["a", "b"]))
    assert sents == [[BOS, "a", EOS], [BOS, "b", EOS]]


def test_blank_lines_are_skipped():
    assert len(list(stream_sentences(["a", "", "  ", "b"]))) == 2


def test_sentinel_collision_rejected():
    with pytest.raises(ParameterError):
        list(stream_sentences([f"a {BOS} b"]))


def test_stats_tsv_sorted_by_count_then_form():
    stats = count_word_types(["b a a c c"])
    assert format_stats(stats) == "a\t2\nc\t2\nb\t1\n"


def test_iter_lines_splits_on_newline_only():
    assert list(iter_lines(b"a\tb c\n")) == ["a\tb c"]
    assert list(iter_lines(b"a\n\nb")) == ["a", "", "b"]
    assert list(iter_lines(b"")) == []
