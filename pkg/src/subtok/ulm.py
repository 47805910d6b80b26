"""Unigram-LM subword training (EM) and Viterbi segmentation.

The model assumes each subword occurs independently.  Training seeds a
large candidate vocabulary from frequent substrings, then alternates EM
probability estimation with pruning of the lowest-probability multi-char
entries until the requested size is reached.  Single characters are never
pruned, so every word over the training character set stays segmentable.

All probabilities are stored and combined as natural logs in double
precision.  Unknown characters at segmentation time receive a fixed
log-score of ``UNKNOWN_CHAR_LOGP``; since an unknown character can only be
covered by its own forced single-character piece, the constant cancels out
of every argmax.
"""

from __future__ import annotations

import logging
import math
from collections import Counter

from .corpus import CorpusStats
from .errors import ParameterError, SubtokError
from .vocab import SeedVocabParams, Segmentation, SubwordVocab
from .base import Segmenter

logger = logging.getLogger(__name__)

UNKNOWN_CHAR_LOGP = -100.0

_MAX_BRUTE_FORCE_LEN = 16


def build_seed_vocab(stats: CorpusStats, params: SeedVocabParams) -> SubwordVocab:
    """Seed vocabulary: all characters plus the most frequent substrings.

    Substring frequencies count overlapping occurrences, weighted by
    word-type counts.  Multi-character candidates fill the seed up to
    ``max_seed_size``, ranked by descending frequency then lexicographic
    form.  Initial probabilities are frequency-proportional.
    """
    if not stats.word_types:
        raise ParameterError("cannot build a seed vocabulary from an empty corpus")
    if params.max_seed_size < len(stats.character_set):
        raise ParameterError(
            f"max_seed_size {params.max_seed_size} is below the character floor "
            f"{len(stats.character_set)}"
        )
    freq: Counter[str] = Counter()
    for form, count in stats.word_types.items():
        n = len(form)
        for i in range(n):
            for j in range(i + 1, min(i + params.max_subword_len, n) + 1):
                freq[form[i:j]] += count

    chars = sorted(stats.character_set)
    multi = sorted(
        (f for f in freq if len(f) > 1),
        key=lambda f: (-freq[f], f),
    )
    budget = params.max_seed_size - len(chars)
    selected = chars + multi[:budget]
    total = sum(freq[f] for f in selected)
    entries = {f: math.log(freq[f]) - math.log(total) for f in selected}
    return SubwordVocab(entries, "ulm")


def _position_matches(word: str, vocab: SubwordVocab, max_len: int) -> list[list[tuple[int, str, float]]]:
    """For each start position, the (end, piece, logp) lattice edges.

    Unknown characters get a forced single-character edge with the fixed
    unknown log-score.
    """
    n = len(word)
    edges: list[list[tuple[int, str, float]]] = [[] for _ in range(n)]
    for i in range(n):
        single = vocab.entries.get(word[i], UNKNOWN_CHAR_LOGP)
        edges[i].append((i + 1, word[i], single))
        for j in range(i + 2, min(i + max_len, n) + 1):
            piece = word[i:j]
            logp = vocab.entries.get(piece)
            if logp is not None:
                edges[i].append((j, piece, logp))
    return edges


def _log_add(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def word_lattice_expectations(
    vocab: SubwordVocab, word: str
) -> tuple[dict[str, float], float]:
    """Forward-backward over one word's segmentation lattice.

    Returns (expected piece counts, log of the total probability mass Z
    summed over all segmentations).
    """
    n = len(word)
    max_len = vocab.max_form_len()
    edges = _position_matches(word, vocab, max_len)

    log_alpha = [-math.inf] * (n + 1)
    log_alpha[0] = 0.0
    for i in range(n):
        if log_alpha[i] == -math.inf:
            continue
        for j, _piece, logp in edges[i]:
            log_alpha[j] = _log_add(log_alpha[j], log_alpha[i] + logp)
    log_z = log_alpha[n]
    if log_z == -math.inf:
        raise SubtokError(f"word {word!r} has no segmentation; invariant violated")

    log_beta = [-math.inf] * (n + 1)
    log_beta[n] = 0.0
    for i in range(n - 1, -1, -1):
        for j, _piece, logp in edges[i]:
            log_beta[i] = _log_add(log_beta[i], logp + log_beta[j])

    expected: dict[str, float] = {}
    for i in range(n):
        for j, piece, logp in edges[i]:
            posterior = math.exp(log_alpha[i] + logp + log_beta[j] - log_z)
            if posterior > 0.0:
                expected[piece] = expected.get(piece, 0.0) + posterior
    return expected, log_z


def em_step(vocab: SubwordVocab, stats: CorpusStats) -> tuple[SubwordVocab, float]:
    """One EM step: expected piece counts over every word type's lattice,
    then renormalization.

    Returns the updated vocabulary and the corpus log-likelihood of the
    *input* vocabulary, sum over word types of count * log Z(word).
    """
    if vocab.algo_tag != "ulm":
        raise ParameterError("em_step requires a ULM vocabulary")
    expected: dict[str, float] = {form: 0.0 for form in vocab.entries}
    log_likelihood = 0.0
    for form, count in sorted(stats.word_types.items()):
        word_expected, log_z = word_lattice_expectations(vocab, form)
        log_likelihood += count * log_z
        for piece, value in word_expected.items():
            if piece in expected:
                expected[piece] += count * value

    total = sum(expected.values())
    if total <= 0.0:
        raise SubtokError("EM produced no expected counts; invariant violated")
    log_total = math.log(total)
    entries = {}
    for form in vocab.entries:
        count = expected[form]
        entries[form] = (math.log(count) - log_total) if count > 0.0 else -math.inf
    return SubwordVocab(entries, "ulm"), log_likelihood


def prune_vocab(vocab: SubwordVocab, keep_fraction: float) -> SubwordVocab:
    """Keep the top ``keep_fraction`` of multi-character entries by
    probability (ties lexicographic); single characters always survive.
    """
    if not (0.0 < keep_fraction <= 1.0):
        raise ParameterError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    multi = [f for f in vocab.entries if len(f) > 1]
    keep = math.ceil(keep_fraction * len(multi))
    return _prune_to_multi_count(vocab, keep)


def _prune_to_multi_count(vocab: SubwordVocab, n_multi: int) -> SubwordVocab:
    multi = sorted(
        (f for f in vocab.entries if len(f) > 1),
        key=lambda f: (-vocab.entries[f], f),
    )
    kept = [f for f in vocab.entries if len(f) == 1] + multi[:n_multi]
    log_total = _log_sum(vocab.entries[f] for f in kept)
    entries = {f: vocab.entries[f] - log_total for f in kept}
    return SubwordVocab(entries, "ulm")


def _log_sum(values) -> float:
    acc = -math.inf
    for v in values:
        acc = _log_add(acc, v)
    return acc


def train_ulm(
    stats: CorpusStats,
    target_size: int,
    params: SeedVocabParams | None = None,
    em_iters_per_round: int = 2,
    keep_fraction: float = 0.8,
) -> SubwordVocab:
    """Train a unigram-LM vocabulary of exactly ``target_size`` entries.

    Alternates ``em_iters_per_round`` EM steps with pruning rounds; the
    final round prunes exactly to the target, then probabilities are
    re-estimated once more on the final support.
    """
    n_chars = len(stats.character_set)
    if target_size < n_chars:
        raise ParameterError(
            f"target_size {target_size} is below the character floor {n_chars}; "
            "single characters cannot be pruned"
        )
    if em_iters_per_round < 1:
        raise ParameterError("em_iters_per_round must be >= 1")
    if not (0.0 < keep_fraction <= 1.0):
        raise ParameterError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    if params is None:
        params = SeedVocabParams(max_seed_size=max(4 * target_size, n_chars))

    vocab = build_seed_vocab(stats, params)
    if vocab.size < target_size:
        logger.warning(
            "seed vocabulary has only %d entries (requested %d); returning the maximum",
            vocab.size, target_size,
        )
    target_multi = max(target_size - n_chars, 0)

    def run_em(v: SubwordVocab) -> SubwordVocab:
        for _ in range(em_iters_per_round):
            v, _ll = em_step(v, stats)
        return v

    while sum(1 for f in vocab.entries if len(f) > 1) > target_multi:
        vocab = run_em(vocab)
        n_multi = sum(1 for f in vocab.entries if len(f) > 1)
        keep = math.ceil(keep_fraction * n_multi)
        if keep >= n_multi:
            keep = n_multi - 1  # force progress when keep_fraction rounds to identity
        keep = max(keep, target_multi)
        vocab = _prune_to_multi_count(vocab, keep)
    return run_em(vocab)


def _better(a: tuple[float, int, tuple[str, ...]], b: tuple[float, int, tuple[str, ...]]) -> bool:
    """True when candidate ``a`` beats ``b``: higher score, then fewer
    pieces, then lexicographically earlier piece sequence."""
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] < b[1]
    return a[2] < b[2]


def segment_viterbi(word: str, vocab: SubwordVocab) -> Segmentation:
    """Best segmentation by total log-probability, via dynamic programming
    over word positions.  Tie order matches :func:`_better`.
    """
    if not word:
        raise ParameterError("cannot segment an empty word")
    if vocab.algo_tag != "ulm":
        raise ParameterError("segment_viterbi requires a ULM vocabulary")
    n = len(word)
    edges = _position_matches(word, vocab, vocab.max_form_len())

    best: list[tuple[float, int, tuple[str, ...]] | None] = [None] * (n + 1)
    best[0] = (0.0, 0, ())
    for i in range(n):
        state = best[i]
        if state is None:
            continue
        score, pieces, seq = state
        for j, piece, logp in edges[i]:
            cand = (score + logp, pieces + 1, seq + (piece,))
            if best[j] is None or _better(cand, best[j]):
                best[j] = cand
    final = best[n]
    assert final is not None  # single-character edges make the lattice total
    return _to_segmentation(word, final[2], vocab)


def brute_force_best_segmentation(word: str, vocab: SubwordVocab) -> Segmentation:
    """Exhaustive oracle for :func:`segment_viterbi`.

    Enumerates every split pattern of the word and scores the vocab-valid
    ones directly, applying the same tie order.  Bounded to short words.
    """
    if not word:
        raise ParameterError("cannot segment an empty word")
    n = len(word)
    if n > _MAX_BRUTE_FORCE_LEN:
        raise ParameterError(f"word length {n} exceeds enumeration bound {_MAX_BRUTE_FORCE_LEN}")

    best: tuple[float, int, tuple[str, ...]] | None = None
    for mask in range(1 << (n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        pieces = tuple(word[a:b] for a, b in zip(cuts, cuts[1:]))
        score = 0.0
        valid = True
        for piece in pieces:
            logp = vocab.entries.get(piece)
            if logp is None:
                if len(piece) == 1 and piece not in vocab.entries:
                    logp = UNKNOWN_CHAR_LOGP
                else:
                    valid = False
                    break
            score += logp
        if not valid:
            continue
        cand = (score, len(pieces), pieces)
        if best is None or _better(cand, best):
            best = cand
    assert best is not None
    return _to_segmentation(word, best[2], vocab)


def _to_segmentation(word: str, pieces: tuple[str, ...], vocab: SubwordVocab) -> Segmentation:
    unknown = tuple(i for i, p in enumerate(pieces) if p not in vocab.entries)
    return Segmentation(word, pieces, unknown)


class UnigramSegmenter(Segmenter):
    """EM-trained unigram-LM segmenter with a fit/transform interface.

    Parameters
    ----------
    vocab_size : int, default=500
        Exact number of vocabulary entries to keep.
    max_subword_len : int, default=8
        Longest candidate substring admitted to the seed vocabulary.
    max_seed_size : int or None, default=None
        Seed vocabulary cap; ``None`` uses 4x ``vocab_size``.
    em_iters_per_round : int, default=2
        EM steps between pruning rounds.
    keep_fraction : float, default=0.8
        Fraction of multi-character entries kept per pruning round.

    Attributes
    ----------
    vocab_ : SubwordVocab
    char_set_ : set of str
    """

    def __init__(
        self,
        vocab_size: int = 500,
        max_subword_len: int = 8,
        max_seed_size: int | None = None,
        em_iters_per_round: int = 2,
        keep_fraction: float = 0.8,
    ):
        self.vocab_size = vocab_size
        self.max_subword_len = max_subword_len
        self.max_seed_size = max_seed_size
        self.em_iters_per_round = em_iters_per_round
        self.keep_fraction = keep_fraction

    def _fit_stats(self, stats) -> None:
        seed_size = self.max_seed_size
        if seed_size is None:
            seed_size = max(4 * self.vocab_size, len(stats.character_set))
        params = SeedVocabParams(self.max_subword_len, seed_size)
        self.vocab_ = train_ulm(
            stats,
            self.vocab_size,
            params,
            self.em_iters_per_round,
            self.keep_fraction,
        )
        self.char_set_ = set(stats.character_set)

    def _segment_uncached(self, word: str) -> Segmentation:
        return segment_viterbi(word, self.vocab_)

    @classmethod
    def from_trained(cls, vocab: SubwordVocab) -> "UnigramSegmenter":
        """Wrap an already-trained vocabulary (e.g. loaded from disk)."""
        est = cls(vocab_size=vocab.size)
        est.vocab_ = vocab
        est.char_set_ = {f for f in vocab.entries if len(f) == 1}
        est._cache = {}
        return est
