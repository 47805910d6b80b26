"""Vocabulary-overlap and segmentation-consistency reports."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .base import Segmenter
from .corpus import BOS, EOS
from .vocab import SubwordVocab


@dataclass(frozen=True)
class OverlapReport:
    vocab_a: str
    vocab_b: str
    size_a: int
    size_b: int
    shared_count: int
    rate: float

    def format_tsv(self) -> str:
        return (
            "vocab_a\tvocab_b\tsize_a\tsize_b\tshared\trate\n"
            f"{self.vocab_a}\t{self.vocab_b}\t{self.size_a}\t{self.size_b}\t"
            f"{self.shared_count}\t{self.rate:.6f}\n"
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "vocab_a": self.vocab_a, "vocab_b": self.vocab_b,
                "size_a": self.size_a, "size_b": self.size_b,
                "shared_count": self.shared_count, "rate": self.rate,
            },
            sort_keys=True,
        )


def vocab_overlap(a: SubwordVocab, b: SubwordVocab, name_a: str = "a", name_b: str = "b",
                  include_single_chars: bool = True) -> OverlapReport:
    """Shared-form count and overlap rate between two vocabularies.

    The rate divides by the (common) vocabulary size when sizes match, by
    the smaller size otherwise.  Single characters are counted unless
    ``include_single_chars`` is false.
    """
    forms_a = a.forms() if include_single_chars else {f for f in a.entries if len(f) > 1}
    forms_b = b.forms() if include_single_chars else {f for f in b.entries if len(f) > 1}
    shared = len(forms_a & forms_b)
    denom = len(forms_a) if len(forms_a) == len(forms_b) else min(len(forms_a), len(forms_b))
    rate = shared / denom if denom else 0.0
    return OverlapReport(name_a, name_b, len(forms_a), len(forms_b), shared, rate)


@dataclass(frozen=True)
class ConsistencyReport:
    distinct_segmentations: dict[str, int]
    consistent_fraction: float

    def format_tsv(self) -> str:
        lines = ["word\tdistinct_segmentations"]
        for word in sorted(self.distinct_segmentations):
            lines.append(f"{word}\t{self.distinct_segmentations[word]}")
        lines.append(f"#consistent_fraction\t{self.consistent_fraction:.6f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "consistent_fraction": self.consistent_fraction,
                "distinct_segmentations": dict(sorted(self.distinct_segmentations.items())),
            },
            sort_keys=True,
        )


def segmentation_consistency(segmenter: Segmenter, corpus) -> ConsistencyReport:
    """Segment every token occurrence and count distinct piece sequences
    per word type; reports the fraction of types with exactly one."""
    variants: dict[str, set[tuple[str, ...]]] = {}
    for sentence in corpus:
        for word in sentence:
            if word in (BOS, EOS):
                continue
            variants.setdefault(word, set()).add(segmenter.segment_word(word).pieces)
    per_word = {w: len(v) for w, v in variants.items()}
    consistent = sum(1 for n in per_word.values() if n == 1)
    fraction = consistent / len(per_word) if per_word else 1.0
    return ConsistencyReport(per_word, fraction)
