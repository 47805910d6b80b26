"""Subword vocabulary / merge-table types and their on-disk formats.

Formats (all UTF-8, LF line endings):

* vocab file:   header ``#subtok-vocab v1 algo=<bpe|ulm> size=<n>[ marker=<m>]``,
  then one ``subword<TAB>score`` line per entry, sorted by descending score
  then lexicographic form.  BPE scores are integer frequencies; ULM scores
  are natural-log probabilities written with full round-trip precision.
* merges file:  header ``#subtok-merges v1[ marker=<m>]``, then one
  ``left<SPACE>right`` line per rule, in merge-creation order.
* segmented text: header ``#subtok-segmented v1 word-marker=<m>``, then the
  input lines with each word replaced by its pieces, space-joined, the first
  piece of every word prefixed with the word-initial marker.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import FormatError, ParameterError

# Appended to every word type before BPE training so suffix position is
# distinguishable; ULM vocabularies carry no marker.
DEFAULT_BPE_MARKER = "</w>"

# Word-initial marker used when rendering segmented text.
DEFAULT_WORD_MARKER = "▁"  # '▁'

NORMALIZATION_TOL = 1e-6


@dataclass
class SubwordVocab:
    """Subword inventory with per-subword scores.

    ``entries`` maps each subword form to its score: a corpus frequency for
    BPE vocabularies, a natural-log probability for ULM vocabularies.
    """

    entries: dict[str, float]
    algo_tag: str
    marker: str | None = None

    def __post_init__(self):
        if self.algo_tag not in ("bpe", "ulm"):
            raise ParameterError(f"algo_tag must be 'bpe' or 'ulm', got {self.algo_tag!r}")
        if any(not form for form in self.entries):
            raise ParameterError("vocabulary contains an empty subword form")

    @property
    def size(self) -> int:
        return len(self.entries)

    def __contains__(self, form: str) -> bool:
        return form in self.entries

    def forms(self) -> set[str]:
        return set(self.entries)

    def log_prob(self, form: str) -> float:
        if self.algo_tag != "ulm":
            raise ParameterError("log_prob is only defined for ULM vocabularies")
        return self.entries[form]

    def sorted_items(self) -> list[tuple[str, float]]:
        return sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))

    def max_form_len(self) -> int:
        return max(len(f) for f in self.entries)

    def check_normalized(self, tol: float = NORMALIZATION_TOL) -> None:
        """Raise unless ULM probabilities sum to 1 within ``tol``."""
        total = sum(math.exp(s) for s in self.entries.values())
        if abs(total - 1.0) > tol:
            raise ParameterError(f"ULM vocabulary not normalized: sum(exp(score)) = {total!r}")


@dataclass
class MergeTable:
    """Ordered BPE merge rules; the decoding program for greedy segmentation."""

    rules: list[tuple[str, str]]
    marker: str | None = None

    def __len__(self) -> int:
        return len(self.rules)

    def validate(self) -> None:
        """Check every operand is a base symbol or the output of an earlier rule."""
        produced: set[str] = set()
        for k, (left, right) in enumerate(self.rules):
            for operand in (left, right):
                base = len(operand) == 1 or operand == self.marker
                if not base and operand not in produced:
                    raise ParameterError(
                        f"rule {k} uses operand {operand!r} not produced by any earlier rule"
                    )
            produced.add(left + right)


@dataclass(frozen=True)
class Segmentation:
    """A word rendered as an ordered sequence of subword pieces.

    ``unknown`` holds indices of pieces that are out-of-inventory single
    characters; the raw character is kept as the piece text so that
    concatenation always reconstructs the word.
    """

    word: str
    pieces: tuple[str, ...]
    unknown: tuple[int, ...] = ()

    @property
    def has_unknown(self) -> bool:
        return bool(self.unknown)

    def surface(self, marker: str | None = None) -> str:
        """Concatenate pieces, stripping one trailing boundary marker."""
        text = "".join(self.pieces)
        if marker and text.endswith(marker):
            text = text[: -len(marker)]
        return text


@dataclass(frozen=True)
class SeedVocabParams:
    """Knobs for ULM seed-vocabulary construction."""

    max_subword_len: int = 8
    max_seed_size: int = 8000

    def __post_init__(self):
        if self.max_subword_len < 1:
            raise ParameterError("max_subword_len must be >= 1")
        if self.max_seed_size < 1:
            raise ParameterError("max_seed_size must be >= 1")


def _format_score(score: float) -> str:
    # repr() round-trips doubles exactly, so written files reload bit-identical.
    return str(score) if isinstance(score, int) else repr(float(score))


_VOCAB_HEADER = re.compile(
    r"#subtok-vocab v1 algo=(?P<algo>bpe|ulm) size=(?P<size>\d+)(?: marker=(?P<marker>\S+))?$"
)
_MERGES_HEADER = re.compile(r"#subtok-merges v1(?: marker=(?P<marker>\S+))?$")
_SEGMENTED_HEADER = re.compile(r"#subtok-segmented v1 word-marker=(?P<marker>\S+)$")


def format_vocab(vocab: SubwordVocab) -> str:
    header = f"#subtok-vocab v1 algo={vocab.algo_tag} size={vocab.size}"
    if vocab.marker:
        header += f" marker={vocab.marker}"
    lines = [header]
    for form, score in vocab.sorted_items():
        lines.append(f"{form}\t{_format_score(score)}")
    return "\n".join(lines) + "\n"


def write_vocab(vocab: SubwordVocab, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_vocab(vocab))


def read_vocab(path) -> SubwordVocab:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines:
        raise FormatError(f"{path}: empty vocab file")
    m = _VOCAB_HEADER.match(lines[0])
    if m is None:
        raise FormatError(f"{path}: bad vocab header {lines[0]!r}")
    algo = m.group("algo")
    entries: dict[str, float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            form, score_text = line.split("\t")
        except ValueError:
            raise FormatError(f"{path}:{lineno}: expected 'subword<TAB>score'") from None
        if form in entries:
            raise FormatError(f"{path}:{lineno}: duplicate subword {form!r}")
        score = int(score_text) if algo == "bpe" else float(score_text)
        entries[form] = score
    declared = int(m.group("size"))
    if declared != len(entries):
        raise FormatError(f"{path}: header declares size={declared}, found {len(entries)} entries")
    vocab = SubwordVocab(entries, algo, m.group("marker"))
    if algo == "ulm":
        vocab.check_normalized(1e-4)
    return vocab


def format_merges(table: MergeTable) -> str:
    header = "#subtok-merges v1"
    if table.marker:
        header += f" marker={table.marker}"
    lines = [header]
    lines.extend(f"{left} {right}" for left, right in table.rules)
    return "\n".join(lines) + "\n"


def write_merges(table: MergeTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_merges(table))


def read_merges(path) -> MergeTable:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    m = _MERGES_HEADER.match(lines[0]) if lines else None
    if m is None:
        raise FormatError(f"{path}: bad merges header {lines[0] if lines else ''!r}")
    rules = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 'left<SPACE>right'")
        rules.append((parts[0], parts[1]))
    return MergeTable(rules, m.group("marker"))


def segmented_header(word_marker: str = DEFAULT_WORD_MARKER) -> str:
    return f"#subtok-segmented v1 word-marker={word_marker}"


def parse_segmented_header(line: str) -> str:
    m = _SEGMENTED_HEADER.match(line)
    if m is None:
        raise FormatError(f"bad segmented-text header {line!r}")
    return m.group("marker")


def render_segmented_line(
    segmentations: Iterable[Segmentation],
    word_marker: str = DEFAULT_WORD_MARKER,
    strip_marker: str | None = None,
) -> str:
    """Render one sentence of segmentations as marker-prefixed pieces."""
    out: list[str] = []
    for seg in segmentations:
        pieces = list(seg.pieces)
        if strip_marker:
            pieces = [p for p in (_strip_suffix(p, strip_marker) for p in pieces) if p]
        out.extend(f"{word_marker}{p}" if i == 0 else p for i, p in enumerate(pieces))
    return " ".join(out)


def _strip_suffix(piece: str, marker: str) -> str:
    return piece[: -len(marker)] if piece.endswith(marker) else piece


def strip_segmented_line(line: str, word_marker: str = DEFAULT_WORD_MARKER) -> str:
    """Invert ``render_segmented_line``: recover the space-joined words."""
    words: list[str] = []
    for token in line.split(" "):
        if not token:
            continue
        if token.startswith(word_marker):
            words.append(token[len(word_marker):])
        elif words:
            words[-1] += token
        else:
            raise FormatError("segmented line does not start with the word marker")
    return " ".join(words)
