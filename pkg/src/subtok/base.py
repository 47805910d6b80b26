"""Shared estimator machinery for the trainable segmenters."""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import CorpusStats, count_word_types, split_words
from .vocab import Segmentation


class Segmenter(BaseEstimator, TransformerMixin):
    """Base class for word segmenters: fit a subword inventory, then map
    each word to an ordered sequence of subword pieces.

    Subclasses implement ``_fit_stats`` and ``_segment_uncached``; the base
    class provides the sklearn surface (``fit``/``transform``/``get_params``)
    and a per-word cache, which is sound because both decoders are pure
    functions of the word.
    """

    def fit(self, X, y=None):
        """Train the subword inventory.

        ``X`` is an iterable of pre-tokenized text lines (or a path to such
        a file, or a precomputed :class:`CorpusStats`).
        """
        stats = X if isinstance(X, CorpusStats) else count_word_types(X)
        self._fit_stats(stats)
        self._cache: dict[str, Segmentation] = {}
        return self

    def segment_word(self, word: str) -> Segmentation:
        check_is_fitted(self, "vocab_")
        seg = self._cache.get(word)
        if seg is None:
            seg = self._segment_uncached(word)
            self._cache[word] = seg
        return seg

    def segment_words(self, words: Iterable[str]) -> list[Segmentation]:
        return [self.segment_word(w) for w in words]

    def transform(self, X) -> list[list[str]]:
        """Segment each line of ``X`` into a flat list of subword pieces."""
        check_is_fitted(self, "vocab_")
        out = []
        for line in X:
            pieces: list[str] = []
            for word in split_words(line):
                pieces.extend(self.segment_word(word).pieces)
            out.append(pieces)
        return out

    def _fit_stats(self, stats: CorpusStats) -> None:
        raise NotImplementedError

    def _segment_uncached(self, word: str) -> Segmentation:
        raise NotImplementedError
