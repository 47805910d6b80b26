"""subtok: subword vocabulary training and a subword-aware language model.

Two unsupervised segmenters over a shared frequency-based scoring scheme
(greedy bigram merges and an EM-trained unigram model with Viterbi
decoding), a convolution + highway word composer, and a bidirectional LSTM
language model with perplexity evaluation and contextual-embedding
extraction.
"""

from .analysis import segmentation_consistency, vocab_overlap
from .base import Segmenter
from .bpe import BpeSegmenter, segment_bpe, train_bpe
from .corpus import (
    BOS,
    EOS,
    CorpusStats,
    count_word_types,
    merge_stats,
    stream_sentences,
)
from .errors import (
    CorpusDecodeError,
    FormatError,
    NumericalError,
    ParameterError,
    ShapeError,
    SubtokError,
)
from .lm import (
    LmModel,
    ModelConfig,
    PerplexityReport,
    SubwordLanguageModel,
    TrainConfig,
    WordVocab,
    extract_embeddings,
    forward_sentence,
    load_lm,
    nll_loss,
    perplexity,
    save_lm,
    train,
    unigram_baseline_ppl,
)
from .ulm import (
    UnigramSegmenter,
    brute_force_best_segmentation,
    build_seed_vocab,
    em_step,
    prune_vocab,
    segment_viterbi,
    train_ulm,
)
from .vocab import (
    MergeTable,
    SeedVocabParams,
    Segmentation,
    SubwordVocab,
    read_merges,
    read_vocab,
    write_merges,
    write_vocab,
)

__version__ = "0.1.0"

__all__ = [
    "BOS", "EOS", "BpeSegmenter", "CorpusDecodeError", "CorpusStats",
    "FormatError", "LmModel", "MergeTable", "ModelConfig", "NumericalError",
    "ParameterError", "PerplexityReport", "SeedVocabParams", "Segmentation",
    "Segmenter", "ShapeError", "SubtokError", "SubwordLanguageModel",
    "SubwordVocab", "TrainConfig", "UnigramSegmenter", "WordVocab",
    "brute_force_best_segmentation", "build_seed_vocab", "count_word_types",
    "em_step", "extract_embeddings", "forward_sentence", "load_lm",
    "merge_stats", "nll_loss", "perplexity", "prune_vocab", "read_merges",
    "read_vocab", "save_lm", "segment_bpe", "segment_viterbi",
    "segmentation_consistency", "stream_sentences", "train", "train_bpe",
    "train_ulm", "unigram_baseline_ppl", "vocab_overlap", "write_merges",
    "write_vocab",
]
