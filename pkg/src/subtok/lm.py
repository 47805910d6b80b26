"""Bidirectional LSTM language model over composed word vectors.

The forward direction consumes ``[<bos>, w_1 .. w_n]`` and predicts
``[w_1 .. w_n, <eos>]``; the backward direction consumes the mirrored
sequence and predicts ``[w_n .. w_1, <bos>]``.  Real words enter through
the subword composer; the sentinels have dedicated whole-token input
vectors.  Out-of-vocabulary prediction targets map to ``<unk>``.

LSTM gate order throughout is (input, forget, cell-candidate, output),
with the forget-gate bias initialized to 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator

from . import autodiff as ad
from .autodiff import Parameter, Tensor, backward, no_grad, zero_grads
from .base import Segmenter
from .bpe import BpeSegmenter
from .checkpoint import load_checkpoint, save_checkpoint
from .composer import Composer
from .corpus import BOS, EOS, stream_sentences
from .errors import FormatError, NumericalError, ParameterError
from .ulm import UnigramSegmenter
from .vocab import MergeTable, SubwordVocab

logger = logging.getLogger(__name__)

UNK = "<unk>"


class WordVocab:
    """Closed word-level output vocabulary: ``<unk>``, sentinels, then the
    most frequent training word types."""

    def __init__(self, forms: list[str]):
        if forms[:3] != [UNK, BOS, EOS]:
            raise ParameterError("word vocabulary must start with <unk>, <bos>, <eos>")
        if len(set(forms)) != len(forms):
            raise ParameterError("duplicate forms in word vocabulary")
        self.forms = list(forms)
        self.form_to_id = {f: i for i, f in enumerate(self.forms)}
        self.unk_id = 0
        self.bos_id = 1
        self.eos_id = 2

    @classmethod
    def build(cls, sentences: list[list[str]], max_words: int) -> "WordVocab":
        counts: Counter[str] = Counter()
        for sent in sentences:
            counts.update(_real_words(sent))
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        keep = [form for form, _ in ranked[:max_words]]
        return cls([UNK, BOS, EOS] + keep)

    @property
    def size(self) -> int:
        return len(self.forms)

    def id_of(self, word: str) -> int:
        return self.form_to_id.get(word, self.unk_id)


def _real_words(sentence: list[str]) -> list[str]:
    if len(sentence) < 2 or sentence[0] != BOS or sentence[-1] != EOS:
        raise ParameterError("sentence must be wrapped in <bos>/<eos> sentinels")
    return sentence[1:-1]


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters.  Defaults are the desk-scale preset."""

    d_sub: int = 16
    kernel_widths: tuple[int, ...] = (1, 2, 3, 4)
    kernel_channels: tuple[int, ...] = (8, 8, 16, 16)
    highway_layers: int = 1
    hidden_size: int = 64
    num_layers: int = 2
    max_pieces: int = 24
    dtype: str = "float32"

    @property
    def d_cnn(self) -> int:
        return int(sum(self.kernel_channels))

    def np_dtype(self):
        if self.dtype not in ("float32", "float64"):
            raise ParameterError(f"dtype must be float32 or float64, got {self.dtype!r}")
        return np.dtype(self.dtype)


@dataclass
class TrainConfig:
    """Optimization knobs; the seed is mandatory."""

    seed: int
    batch_size: int = 32
    max_sentence_len: int = 24
    learning_rate: float = 2e-3
    optimizer: str = "adam"
    clip_norm: float = 5.0
    epochs: int = 20

    def __post_init__(self):
        if self.optimizer not in ("sgd", "adam"):
            raise ParameterError(f"optimizer must be 'sgd' or 'adam', got {self.optimizer!r}")
        for name in ("batch_size", "max_sentence_len", "epochs"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")
        if self.learning_rate < 0 or self.clip_norm <= 0:
            raise ParameterError("learning_rate must be >= 0 and clip_norm > 0")


class LstmLayer:
    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator, dtype, name: str):
        self.hidden = hidden
        scale_x = np.sqrt(6.0 / (d_in + 4 * hidden))
        scale_h = np.sqrt(6.0 / (hidden + 4 * hidden))
        self.w_x = Parameter(rng.uniform(-scale_x, scale_x, (d_in, 4 * hidden)).astype(dtype),
                             name=f"{name}.w_x")
        self.w_h = Parameter(rng.uniform(-scale_h, scale_h, (hidden, 4 * hidden)).astype(dtype),
                             name=f"{name}.w_h")
        bias = np.zeros(4 * hidden, dtype=dtype)
        bias[hidden:2 * hidden] = 1.0
        self.b = Parameter(bias, name=f"{name}.b")

    def parameters(self) -> list[Parameter]:
        return [self.w_x, self.w_h, self.b]


class LmModel:
    """All learned parameters: composer, both LSTM stacks, output affine."""

    def __init__(self, subword_vocab: SubwordVocab, word_vocab: WordVocab,
                 config: ModelConfig = ModelConfig(), seed: int = 0):
        self.subword_vocab = subword_vocab
        self.word_vocab = word_vocab
        self.config = config
        self.seed = seed
        dtype = config.np_dtype()
        rng = np.random.default_rng(seed)

        piece_forms = [form for form, _ in subword_vocab.sorted_items()]
        self.composer = Composer(
            piece_forms, config.d_sub, config.kernel_widths, config.kernel_channels,
            config.highway_layers, rng, dtype, config.max_pieces,
        )
        d_cnn, h = config.d_cnn, config.hidden_size
        self.f_stack = [
            LstmLayer(d_cnn if l == 0 else h, h, rng, dtype, f"lstm_f{l}")
            for l in range(config.num_layers)
        ]
        self.b_stack = [
            LstmLayer(d_cnn if l == 0 else h, h, rng, dtype, f"lstm_b{l}")
            for l in range(config.num_layers)
        ]
        scale = np.sqrt(6.0 / (h + word_vocab.size))
        self.out_w = Parameter(rng.uniform(-scale, scale, (h, word_vocab.size)).astype(dtype),
                               name="out.w")
        self.out_b = Parameter(np.zeros(word_vocab.size, dtype=dtype), name="out.b")
        vec_scale = 1.0 / np.sqrt(d_cnn)
        self.bos_vec = Parameter(rng.uniform(-vec_scale, vec_scale, (1, d_cnn)).astype(dtype),
                                 name="in.bos")
        self.eos_vec = Parameter(rng.uniform(-vec_scale, vec_scale, (1, d_cnn)).astype(dtype),
                                 name="in.eos")

    def parameters(self) -> list[Parameter]:
        params = self.composer.parameters()
        for layer in self.f_stack + self.b_stack:
            params.extend(layer.parameters())
        params.extend([self.out_w, self.out_b, self.bos_vec, self.eos_vec])
        names = [p.name for p in params]
        assert len(set(names)) == len(names)
        return params

    @property
    def embedding_dim(self) -> int:
        """Dimension of one contextual embedding: d_cnn + 2h."""
        return self.config.d_cnn + 2 * self.config.hidden_size


def _run_stack(layers: list[LstmLayer], x: Tensor, steps: int, batch: int, dtype) -> Tensor:
    """Run an LSTM stack over a time-major (steps*batch, d_in) input.

    Returns the last layer's hidden states, time-major (steps*batch, h).
    """
    inp = x
    for layer in layers:
        h = layer.hidden
        proj = ad.add(ad.matmul(inp, layer.w_x), layer.b)
        proj3 = ad.reshape(proj, (steps, batch, 4 * h))
        h_prev = Tensor(np.zeros((batch, h), dtype=dtype))
        c_prev = Tensor(np.zeros((batch, h), dtype=dtype))
        outs = []
        for t in range(steps):
            pre = ad.add(proj3[t], ad.matmul(h_prev, layer.w_h))
            i_g = ad.sigmoid(pre[:, :h])
            f_g = ad.sigmoid(pre[:, h:2 * h])
            g_g = ad.tanh(pre[:, 2 * h:3 * h])
            o_g = ad.sigmoid(pre[:, 3 * h:])
            c_prev = ad.add(ad.mul(f_g, c_prev), ad.mul(i_g, g_g))
            h_prev = ad.mul(o_g, ad.tanh(c_prev))
            outs.append(h_prev)
        inp = ad.concat(outs, axis=0)
    return inp


@dataclass
class BatchForward:
    """Everything computed by one bidirectional forward pass."""

    loss: Tensor
    n_events: int
    rows_f: Tensor
    rows_b: Tensor
    targets_f: np.ndarray
    targets_b: np.ndarray
    picked_f: Tensor
    picked_b: Tensor
    hidden_f: Tensor
    hidden_b: Tensor
    word_rows: Tensor
    word_row_index: dict[str, int]
    lengths: np.ndarray
    steps: int


def _forward_batch(model: LmModel, sentences: list[list[str]], segmenter: Segmenter,
                   max_sentence_len: int | None = None) -> BatchForward:
    if not sentences:
        raise ParameterError("empty sentence batch")
    reals = []
    for sent in sentences:
        words = _real_words(sent)
        if max_sentence_len is not None and len(words) > max_sentence_len:
            words = words[:max_sentence_len]
        reals.append(words)

    batch = len(reals)
    lengths = np.array([len(r) for r in reals], dtype=np.int64)
    steps = int(lengths.max()) + 1
    dtype = model.config.np_dtype()

    uniq: dict[str, int] = {}
    for words in reals:
        for w in words:
            uniq.setdefault(w, len(uniq))
    parts = []
    if uniq:
        segs = [segmenter.segment_word(w) for w in uniq]
        parts.append(model.composer.compose_batch(segs))
    parts.extend([model.bos_vec, model.eos_vec])
    word_rows = ad.concat(parts, axis=0)
    bos_row, eos_row = len(uniq), len(uniq) + 1

    vocab = model.word_vocab
    idx_f = np.full((steps, batch), eos_row, dtype=np.int64)
    idx_b = np.full((steps, batch), eos_row, dtype=np.int64)
    tgt_f = np.zeros((steps, batch), dtype=np.int64)
    tgt_b = np.zeros((steps, batch), dtype=np.int64)
    valid = np.zeros((steps, batch), dtype=bool)
    for b, words in enumerate(reals):
        n = len(words)
        rows = [uniq[w] for w in words]
        ids = [vocab.id_of(w) for w in words]
        idx_f[0, b] = bos_row
        idx_f[1:n + 1, b] = rows
        tgt_f[:n, b] = ids
        tgt_f[n, b] = vocab.eos_id
        idx_b[0, b] = eos_row
        idx_b[1:n + 1, b] = rows[::-1]
        tgt_b[:n, b] = ids[::-1]
        tgt_b[n, b] = vocab.bos_id
        valid[:n + 1, b] = True

    valid_flat = np.flatnonzero(valid.reshape(-1))

    def direction(idx, tgt, stack):
        x = ad.gather_rows(word_rows, idx.reshape(-1))
        hidden = _run_stack(stack, x, steps, batch, dtype)
        h_valid = ad.gather_rows(hidden, valid_flat)
        logits = ad.add(ad.matmul(h_valid, model.out_w), model.out_b)
        rows = ad.log_softmax(logits, axis=-1)
        targets = tgt.reshape(-1)[valid_flat]
        picked = ad.pick(rows, targets)
        return hidden, rows, targets, picked

    hidden_f, rows_f, targets_f, picked_f = direction(idx_f, tgt_f, model.f_stack)
    hidden_b, rows_b, targets_b, picked_b = direction(idx_b, tgt_b, model.b_stack)

    loss = ad.mean_all(ad.neg(ad.concat([picked_f, picked_b], axis=0)))
    return BatchForward(
        loss=loss,
        n_events=2 * len(valid_flat),
        rows_f=rows_f, rows_b=rows_b,
        targets_f=targets_f, targets_b=targets_b,
        picked_f=picked_f, picked_b=picked_b,
        hidden_f=hidden_f, hidden_b=hidden_b,
        word_rows=word_rows, word_row_index=uniq,
        lengths=lengths, steps=steps,
    )


@dataclass
class SentenceForward:
    """Per-position log-probability rows for one sentence, both directions.

    Forward row t is the distribution predicting the word after input t
    (``w_1 .. w_n, <eos>``); backward rows follow the mirrored consumption
    order (``w_n .. w_1, <bos>``).
    """

    fwd_rows: Tensor
    bwd_rows: Tensor
    fwd_targets: np.ndarray
    bwd_targets: np.ndarray
    loss: Tensor
    n_events: int


def forward_sentence(model: LmModel, sentence: list[str], segmenter: Segmenter) -> SentenceForward:
    if not sentence:
        raise ParameterError("empty sentence")
    fb = _forward_batch(model, [sentence], segmenter)
    return SentenceForward(
        fwd_rows=fb.rows_f, bwd_rows=fb.rows_b,
        fwd_targets=fb.targets_f, bwd_targets=fb.targets_b,
        loss=fb.loss, n_events=fb.n_events,
    )


def nll_loss(log_prob_rows: Tensor, targets) -> Tensor:
    """Mean negative log-likelihood of ``targets`` under log-probability rows."""
    return ad.mean_all(ad.neg(ad.pick(log_prob_rows, targets)))


def sentence_nll(model: LmModel, sentence: list[str], segmenter: Segmenter) -> Tensor:
    """Mean NLL over both directions of one sentence (differentiable)."""
    return _forward_batch(model, [sentence], segmenter).loss


@dataclass(frozen=True)
class PerplexityReport:
    forward: float
    backward: float
    combined: float
    n_predictions: int

    def __str__(self) -> str:
        return (f"forward_ppl={self.forward:.6f}\tbackward_ppl={self.backward:.6f}"
                f"\tcombined_ppl={self.combined:.6f}")


def perplexity(model: LmModel, corpus, segmenter: Segmenter, batch_size: int = 64) -> PerplexityReport:
    """exp(mean NLL) per direction and combined, over all prediction events."""
    sentences = list(corpus)
    if not sentences:
        raise ParameterError("empty corpus")
    sum_f = sum_b = 0.0
    n = 0
    with no_grad():
        for start in range(0, len(sentences), batch_size):
            fb = _forward_batch(model, sentences[start:start + batch_size], segmenter)
            sum_f -= float(fb.picked_f.data.sum())
            sum_b -= float(fb.picked_b.data.sum())
            n += len(fb.targets_f)
    return PerplexityReport(
        forward=math.exp(sum_f / n),
        backward=math.exp(sum_b / n),
        combined=math.exp((sum_f + sum_b) / (2 * n)),
        n_predictions=2 * n,
    )


def unigram_baseline_ppl(corpus, word_vocab: WordVocab) -> float:
    """Closed-form PPL of the empirical unigram distribution over the same
    prediction events the model is scored on (both directions, targets
    mapped through the output vocabulary)."""
    counts: Counter[int] = Counter()
    n_sent = 0
    for sent in corpus:
        n_sent += 1
        for w in _real_words(sent):
            counts[word_vocab.id_of(w)] += 2  # target once per direction
    if n_sent == 0:
        raise ParameterError("empty corpus")
    counts[word_vocab.bos_id] += n_sent
    counts[word_vocab.eos_id] += n_sent
    total = sum(counts.values())
    entropy = -sum(c / total * math.log(c / total) for c in counts.values())
    return math.exp(entropy)


class Sgd:
    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, params: list[Parameter]) -> None:
        for p in params:
            if p.grad is not None:
                p.data -= p.data.dtype.type(self.learning_rate) * p.grad


class Adam:
    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: list[Parameter]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for p in params:
            if p.grad is None:
                continue
            m = self._m.get(p.name)
            if m is None:
                m = np.zeros_like(p.data)
                self._m[p.name] = m
                self._v[p.name] = np.zeros_like(p.data)
            v = self._v[p.name]
            m *= b1
            m += (1 - b1) * p.grad
            v *= b2
            v += (1 - b2) * (p.grad * p.grad)
            update = (m / bias1) / (np.sqrt(v / bias2) + self.eps)
            p.data -= p.data.dtype.type(self.learning_rate) * update


def clip_gradients(params: list[Parameter], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most ``max_norm``."""
    total = 0.0
    for p in params:
        if p.grad is not None:
            total += float(np.sum(p.grad.astype(np.float64) ** 2))
    norm = math.sqrt(total)
    if norm > max_norm:
        factor = max_norm / norm
        for p in params:
            if p.grad is not None:
                p.grad *= p.grad.dtype.type(factor)
    return norm


@dataclass(frozen=True)
class EpochResult:
    epoch: int
    train_ppl: float
    valid_ppl: float | None


@dataclass
class TrainReport:
    epochs: list[EpochResult] = field(default_factory=list)

    def format_lines(self) -> str:
        lines = []
        for e in self.epochs:
            valid = f"{e.valid_ppl:.6f}" if e.valid_ppl is not None else "nan"
            lines.append(f"{e.epoch}\t{e.train_ppl:.6f}\t{valid}")
        return "\n".join(lines) + "\n"


def _make_batches(sentences: list[list[str]], batch_size: int,
                  max_sentence_len: int) -> list[list[list[str]]]:
    truncated = []
    for sent in sentences:
        words = _real_words(sent)
        if len(words) > max_sentence_len:
            words = words[:max_sentence_len]
        truncated.append([BOS, *words, EOS])
    order = sorted(range(len(truncated)), key=lambda i: (len(truncated[i]), i))
    return [
        [truncated[i] for i in order[start:start + batch_size]]
        for start in range(0, len(order), batch_size)
    ]


def train(model: LmModel, corpus, cfg: TrainConfig, segmenter: Segmenter,
          valid_corpus=None) -> TrainReport:
    """Train by mini-batch NLL minimization; deterministic given the seed.

    Sentences are batched by similar length and processed whole (truncated
    at ``cfg.max_sentence_len`` words).  Aborts with diagnostics if the
    loss goes non-finite.
    """
    sentences = list(corpus)
    if not sentences:
        raise ParameterError("empty training corpus")
    valid_sentences = list(valid_corpus) if valid_corpus is not None else None
    batches = _make_batches(sentences, cfg.batch_size, cfg.max_sentence_len)
    params = model.parameters()
    opt = Adam(cfg.learning_rate) if cfg.optimizer == "adam" else Sgd(cfg.learning_rate)
    rng = np.random.default_rng(cfg.seed)

    report = TrainReport()
    for epoch in range(1, cfg.epochs + 1):
        nll_sum = 0.0
        events = 0
        for bi in rng.permutation(len(batches)):
            fb = _forward_batch(model, batches[bi], segmenter, cfg.max_sentence_len)
            loss_value = fb.loss.item()
            if not math.isfinite(loss_value):
                norms = {p.name: float(np.linalg.norm(p.data)) for p in params}
                worst = max(norms, key=norms.get)
                raise NumericalError(
                    f"non-finite loss {loss_value} at epoch {epoch}, batch {bi}; "
                    f"largest parameter norm {worst}={norms[worst]:.3e}"
                )
            zero_grads(params)
            backward(fb.loss)
            clip_gradients(params, cfg.clip_norm)
            opt.step(params)
            nll_sum += loss_value * fb.n_events
            events += fb.n_events
        train_ppl = math.exp(nll_sum / events)
        valid_ppl = None
        if valid_sentences is not None:
            valid_ppl = perplexity(model, valid_sentences, segmenter).combined
        logger.info("epoch %d: train_ppl=%.4f valid_ppl=%s", epoch, train_ppl,
                    f"{valid_ppl:.4f}" if valid_ppl is not None else "-")
        report.epochs.append(EpochResult(epoch, train_ppl, valid_ppl))
    return report


def extract_embeddings(model: LmModel, sentence: list[str], segmenter: Segmenter) -> list[np.ndarray]:
    """One contextual embedding per real word: ``[y_i ; h_fwd ; h_bwd]``.

    ``y_i`` is the composed input vector; the hidden states are the last
    LSTM layer's outputs at the position where the word was consumed, in
    each direction.  Sentinels are excluded.
    """
    words = _real_words(sentence)
    if not words:
        return []
    with no_grad():
        fb = _forward_batch(model, [sentence], segmenter)
    h = model.config.hidden_size
    hf = fb.hidden_f.data.reshape(fb.steps, 1, h)
    hb = fb.hidden_b.data.reshape(fb.steps, 1, h)
    n = len(words)
    out = []
    for t, word in enumerate(words, start=1):
        y = fb.word_rows.data[fb.word_row_index[word]]
        emb = np.concatenate([y, hf[t, 0], hb[n - t + 1, 0]])
        out.append(emb)
    return out


def save_lm(model: LmModel, segmenter: Segmenter, path, vocab_file_hash: str = "") -> None:
    """Write a self-contained checkpoint: parameters plus a manifest that
    reconstructs the segmenter and both vocabularies."""
    merges = None
    if isinstance(segmenter, BpeSegmenter):
        merges = [list(rule) for rule in segmenter.merges_.rules]
    cfg = model.config
    manifest = {
        "format": "subtok-lm",
        "algo": model.subword_vocab.algo_tag,
        "marker": model.subword_vocab.marker,
        "subwords": [[f, s] for f, s in model.subword_vocab.sorted_items()],
        "merges": merges,
        "word_vocab": model.word_vocab.forms,
        "config": {
            "d_sub": cfg.d_sub,
            "kernel_widths": list(cfg.kernel_widths),
            "kernel_channels": list(cfg.kernel_channels),
            "highway_layers": cfg.highway_layers,
            "hidden_size": cfg.hidden_size,
            "num_layers": cfg.num_layers,
            "max_pieces": cfg.max_pieces,
            "dtype": cfg.dtype,
        },
        "seed": model.seed,
        "vocab_file_hash": vocab_file_hash,
        "embedding_dim": model.embedding_dim,
    }
    arrays = {p.name: p.data for p in model.parameters()}
    save_checkpoint(path, arrays, manifest)


def load_lm(path) -> tuple[LmModel, Segmenter]:
    manifest, arrays = load_checkpoint(path)
    if manifest.get("format") != "subtok-lm":
        raise FormatError(f"{path}: not a language-model checkpoint")
    subword_vocab = SubwordVocab(
        {form: score for form, score in manifest["subwords"]},
        manifest["algo"],
        manifest["marker"],
    )
    word_vocab = WordVocab(manifest["word_vocab"])
    c = manifest["config"]
    config = ModelConfig(
        d_sub=c["d_sub"],
        kernel_widths=tuple(c["kernel_widths"]),
        kernel_channels=tuple(c["kernel_channels"]),
        highway_layers=c["highway_layers"],
        hidden_size=c["hidden_size"],
        num_layers=c["num_layers"],
        max_pieces=c["max_pieces"],
        dtype=c["dtype"],
    )
    model = LmModel(subword_vocab, word_vocab, config, seed=manifest["seed"])
    for p in model.parameters():
        saved = arrays.get(p.name)
        if saved is None:
            raise FormatError(f"{path}: checkpoint is missing parameter {p.name!r}")
        if saved.shape != p.data.shape:
            raise FormatError(
                f"{path}: parameter {p.name!r} has shape {saved.shape}, expected {p.data.shape}"
            )
        p.data = saved.astype(config.np_dtype(), copy=False)
    if manifest["algo"] == "bpe":
        table = MergeTable([tuple(r) for r in manifest["merges"] or []], manifest["marker"])
        segmenter = BpeSegmenter.from_trained(subword_vocab, table)
    else:
        segmenter = UnigramSegmenter.from_trained(subword_vocab)
    return model, segmenter


class SubwordLanguageModel(BaseEstimator):
    """Subword-aware bidirectional language model with a fit/transform API.

    ``fit`` trains on an iterable of pre-tokenized text lines; ``transform``
    maps lines to per-word contextual embedding matrices.

    Parameters
    ----------
    segmenter : Segmenter, default=None
        Fitted segmenter to use; an unfitted one is fitted on the training
        lines.  ``None`` means a fresh default ``BpeSegmenter()``.
    output_vocab_size : int, default=5000
        Maximum word-level output vocabulary (most frequent types).
    config : ModelConfig, default=ModelConfig()
    seed : int, default=0
        Controls initialization and batch shuffling.
    batch_size, max_sentence_len, learning_rate, optimizer, clip_norm, epochs :
        Forwarded to :class:`TrainConfig`.

    Attributes
    ----------
    model_ : LmModel
    segmenter_ : Segmenter
    report_ : TrainReport
    """

    def __init__(self, segmenter: Segmenter | None = None, output_vocab_size: int = 5000,
                 config: ModelConfig = ModelConfig(), seed: int = 0, batch_size: int = 32,
                 max_sentence_len: int = 24, learning_rate: float = 2e-3,
                 optimizer: str = "adam", clip_norm: float = 5.0, epochs: int = 20):
        self.segmenter = segmenter
        self.output_vocab_size = output_vocab_size
        self.config = config
        self.seed = seed
        self.batch_size = batch_size
        self.max_sentence_len = max_sentence_len
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.clip_norm = clip_norm
        self.epochs = epochs

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            seed=self.seed, batch_size=self.batch_size,
            max_sentence_len=self.max_sentence_len, learning_rate=self.learning_rate,
            optimizer=self.optimizer, clip_norm=self.clip_norm, epochs=self.epochs,
        )

    def fit(self, X, y=None, valid_lines=None):
        lines = list(X)
        segmenter = self.segmenter if self.segmenter is not None else BpeSegmenter()
        if not hasattr(segmenter, "vocab_"):
            from sklearn.base import clone

            segmenter = clone(segmenter).fit(lines)
        self.segmenter_ = segmenter
        sentences = list(stream_sentences(lines))
        word_vocab = WordVocab.build(sentences, self.output_vocab_size)
        self.model_ = LmModel(segmenter.vocab_, word_vocab, self.config, self.seed)
        valid = list(stream_sentences(valid_lines)) if valid_lines is not None else None
        self.report_ = train(self.model_, sentences, self._train_config(),
                             segmenter, valid)
        return self

    def transform(self, X) -> list[np.ndarray]:
        from sklearn.utils.validation import check_is_fitted

        check_is_fitted(self, "model_")
        out = []
        for sentence in stream_sentences(X):
            embs = extract_embeddings(self.model_, sentence, self.segmenter_)
            out.append(np.stack(embs) if embs else np.zeros((0, self.model_.embedding_dim)))
        return out

    def perplexity(self, X) -> PerplexityReport:
        from sklearn.utils.validation import check_is_fitted

        check_is_fitted(self, "model_")
        return perplexity(self.model_, list(stream_sentences(X)), self.segmenter_)

    def score(self, X, y=None) -> float:
        """Negative mean NLL (= -log combined perplexity); higher is better."""
        return -math.log(self.perplexity(X).combined)
