"""Corpus ingestion: word-type counting and sentinel-framed sentence streaming.

Input is assumed pre-tokenized: one sentence per line, words separated by
ASCII whitespace.  No case folding or Unicode normalization is applied, so
subword statistics reflect the input bytes exactly.  Blank lines are skipped.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator

from .errors import CorpusDecodeError, ParameterError

BOS = "<bos>"
EOS = "<eos>"
SENTINELS = (BOS, EOS)

_ASCII_WS = re.compile(r"[ \t\f\v\r]+")

LineSource = "str | os.PathLike[str] | bytes | Iterable[str]"


@dataclass(frozen=True)
class CorpusStats:
    """Word-type counts plus the character inventory they induce."""

    word_types: dict[str, int]
    total_tokens: int
    character_set: frozenset[str]

    def __post_init__(self):
        if self.total_tokens != sum(self.word_types.values()):
            raise ParameterError("total_tokens does not match word_types counts")

    @property
    def num_types(self) -> int:
        return len(self.word_types)

    def sorted_items(self) -> list[tuple[str, int]]:
        """Entries sorted by descending count, then lexicographic form."""
        return sorted(self.word_types.items(), key=lambda kv: (-kv[1], kv[0]))


def split_words(line: str) -> list[str]:
    """Split one line into words on ASCII whitespace."""
    return [w for w in _ASCII_WS.split(line) if w]





def bundled_data_path(name: str) -> Path:
    """Path to a bundled data file (e.g. ``toy_train.txt``, ``lm_toy.cfg``)."""
    return Path(str(resources.files("subtok") / "data" / name))


def iter_lines(source) -> Iterator[str]:
    """Yield newline-delimited lines from a path, raw bytes, or an iterable
    of strings.  A trailing newline does not produce an empty final line.

    Byte input is decoded as UTF-8; a decode failure reports the absolute
    byte offset of the offending byte.
    """
    if isinstance(source, (str, os.PathLike)):
        data = open(source, "rb").read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        yield from source
        return
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusDecodeError(exc.start, exc.reason) from exc
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    yield from lines


def count_word_types(text_source) -> CorpusStats:
    """Count word types in a line-oriented text source.

    Counts are exact and independent of chunking (see ``merge_stats``).
    Empty input yields empty stats.
    """
    counts: Counter[str] = Counter()
    for line in iter_lines(text_source):
        counts.update(split_words(line))
    chars = frozenset(c for form in counts for c in form)
    return CorpusStats(dict(counts), sum(counts.values()), chars)


def merge_stats(*parts: CorpusStats) -> CorpusStats:
    """Combine chunk-level stats; equals single-pass counting exactly."""
    counts: Counter[str] = Counter()
    for part in parts:
        counts.update(part.word_types)
    chars = frozenset().union(*(p.character_set for p in parts)) if parts else frozenset()
    return CorpusStats(dict(counts), sum(counts.values()), chars)


def stream_sentences(text_source, bos: str = BOS, eos: str = EOS) -> Iterator[list[str]]:
    """Yield one sentinel-framed sentence per non-blank input line.

    The sentinel forms are reserved: a line containing either of them as an
    ordinary word is rejected.
    """
    for line in iter_lines(text_source):
        words = split_words(line)
        if not words:
            continue
        for w in words:
            if w == bos or w == eos:
                raise ParameterError(f"sentinel form {w!r} appears as an ordinary word")
        yield [bos, *words, eos]


def format_stats(stats: CorpusStats) -> str:
    """Render stats as ``form<TAB>count`` lines, descending count then form."""
    return "".join(f"{form}\t{count}\n" for form, count in stats.sorted_items())


def write_stats(stats: CorpusStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_stats(stats))
