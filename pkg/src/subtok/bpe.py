"""Greedy bigram-merge subword training and segmentation.

Training starts from single characters (plus an optional end-of-word marker
appended to every word type), then repeatedly merges the most frequent
adjacent symbol pair until the vocabulary reaches the requested size.
Frequencies are weighted by word-type counts.  Ties are broken toward the
lexicographically smallest (left, right) pair so training is reproducible
across platforms.
"""

from __future__ import annotations

import logging
from collections import Counter

from .base import Segmenter
from .corpus import CorpusStats
from .errors import ParameterError
from .vocab import DEFAULT_BPE_MARKER, MergeTable, Segmentation, SubwordVocab

logger = logging.getLogger(__name__)


def bpe_size_floor(num_chars: int, marker: str | None) -> int:
    """Smallest legal vocabulary size: all characters plus the marker."""
    return num_chars + (1 if marker else 0)


def train_bpe(
    stats: CorpusStats,
    target_size: int,
    marker: str | None = DEFAULT_BPE_MARKER,
) -> tuple[SubwordVocab, MergeTable]:
    """Learn a subword vocabulary of exactly ``target_size`` entries.

    Returns the vocabulary (single characters, the marker if enabled, and
    one entry per distinct merged form) together with the ordered merge
    rules.  If the corpus runs out of adjacent pairs first, training stops
    early with a warning and the vocabulary is smaller than requested.
    """
    if not stats.word_types:
        raise ParameterError("cannot train on an empty corpus")
    chars = sorted(stats.character_set)
    floor = bpe_size_floor(len(chars), marker)
    if target_size < floor:
        raise ParameterError(
            f"size below character floor {len(chars)}"
            + ("(+marker)" if marker else "")
        )
    if marker and marker in stats.character_set:
        raise ParameterError(f"boundary marker {marker!r} collides with a corpus character")

    words: list[list[str]] = []
    counts: list[int] = []
    char_freq: Counter[str] = Counter()
    for form, count in stats.sorted_items():
        symbols = list(form)
        if marker:
            symbols.append(marker)
        words.append(symbols)
        counts.append(count)
        for sym in symbols:
            char_freq[sym] += count

    entries: dict[str, float] = {c: char_freq[c] for c in chars}
    if marker:
        entries[marker] = char_freq[marker]

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}
    for wi, symbols in enumerate(words):
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += counts[wi]
            pair_words.setdefault(pair, set()).add(wi)

    rules: list[tuple[str, str]] = []
    while len(entries) < target_size:
        best_pair, best_freq = None, 0
        for pair, freq in pair_counts.items():
            if freq > best_freq or (freq == best_freq and best_pair is not None and pair < best_pair):
                best_pair, best_freq = pair, freq
        if best_pair is None or best_freq <= 0:
            logger.warning(
                "corpus exhausted distinct bigrams at vocabulary size %d "
                "(requested %d)", len(entries), target_size,
            )
            break
        rules.append(best_pair)
        merged = best_pair[0] + best_pair[1]
        if merged not in entries:
            entries[merged] = best_freq

        touched = sorted(pair_words.pop(best_pair, ()))
        for wi in touched:
            old = words[wi]
            new = _merge_once(old, best_pair)
            if new is old:
                continue  # stale index entry
            weight = counts[wi]
            for pair in zip(old, old[1:]):
                pair_counts[pair] -= weight
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
            for pair in zip(new, new[1:]):
                pair_counts[pair] += weight
                pair_words.setdefault(pair, set()).add(wi)
            words[wi] = new

    vocab = SubwordVocab(entries, "bpe", marker)
    return vocab, MergeTable(rules, marker)


def _merge_once(symbols: list[str], pair: tuple[str, str]) -> list[str]:
    """Replace every non-overlapping (left, right) occurrence, left to right.

    Returns the original list object when the pair does not occur.
    """
    left, right = pair
    out: list[str] = []
    i, n = 0, len(symbols)
    changed = False
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
            changed = True
        else:
            out.append(symbols[i])
            i += 1
    return out if changed else symbols


def segment_bpe(
    word: str,
    merges: MergeTable,
    known_chars: set[str] | None = None,
) -> Segmentation:
    """Segment a word by replaying merge rules in priority order.

    The word is split into single characters (the marker appended when the
    table was trained with one); the applicable rule with the smallest table
    index is applied to all its occurrences, repeatedly, until none applies.
    Characters outside ``known_chars`` never merge and are flagged as
    unknown in the result.  Pure and idempotent per word.
    """
    if not word:
        raise ParameterError("cannot segment an empty word")
    ranks: dict[tuple[str, str], int] = {}
    for k, rule in enumerate(merges.rules):
        ranks.setdefault(rule, k)

    unknown_chars = {c for c in word if known_chars is not None and c not in known_chars}
    symbols = list(word)
    if merges.marker:
        symbols.append(merges.marker)

    while len(symbols) > 1:
        best_rank, best_pair = None, None
        for pair in zip(symbols, symbols[1:]):
            if pair[0] in unknown_chars or pair[1] in unknown_chars:
                continue
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        symbols = _merge_once(symbols, best_pair)

    unknown = tuple(i for i, s in enumerate(symbols) if s in unknown_chars)
    return Segmentation(word, tuple(symbols), unknown)


class BpeSegmenter(Segmenter):
    """Greedy-merge subword segmenter with a fit/transform interface.

    Parameters
    ----------
    vocab_size : int, default=500
        Exact number of vocabulary entries to learn (characters, marker,
        and merged forms together).
    boundary_marker : str or None, default="</w>"
        End-of-word marker appended to every word type before training so
        suffix subwords are distinguishable; ``None`` disables it.

    Attributes
    ----------
    vocab_ : SubwordVocab
    merges_ : MergeTable
    char_set_ : set of str
        Characters seen at fit time; anything else is flagged unknown.
    """

    def __init__(self, vocab_size: int = 500, boundary_marker: str | None = DEFAULT_BPE_MARKER):
        self.vocab_size = vocab_size
        self.boundary_marker = boundary_marker

    def _fit_stats(self, stats: CorpusStats) -> None:
        self.vocab_, self.merges_ = train_bpe(stats, self.vocab_size, self.boundary_marker)
        self.char_set_ = set(stats.character_set)

    def _segment_uncached(self, word: str) -> Segmentation:
        return segment_bpe(word, self.merges_, self.char_set_)

    @classmethod
    def from_trained(cls, vocab: SubwordVocab, merges: MergeTable) -> "BpeSegmenter":
        """Wrap an already-trained vocabulary/merge table (e.g. from disk)."""
        est = cls(vocab_size=vocab.size, boundary_marker=merges.marker)
        est.vocab_ = vocab
        est.merges_ = merges
        est.char_set_ = {f for f in vocab.entries if len(f) == 1}
        est._cache = {}
        return est
