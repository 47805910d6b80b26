"""Word-vector composition from subword pieces.

A word's pieces are embedded, run through several narrow convolutions of
different widths, tanh-activated, max-pooled per channel, concatenated,
and passed through a highway stack.  The resulting word vector is a plain
tensor of fixed length ``d_cnn`` regardless of piece count.

Words shorter than a kernel width are left-padded with the dedicated
padding embedding row; padded batch positions are masked to -inf before
the max so trailing padding never changes the output.
"""

from __future__ import annotations

import logging

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Tensor
from .errors import ParameterError
from .vocab import Segmentation

logger = logging.getLogger(__name__)

PAD_ID = 0
UNK_CHAR_ID = 1
_RESERVED_ROWS = 2

NEG_INF = -1e30  # mask value; finite to keep float32 arithmetic NaN-free


class SubwordEmbeddingTable:
    """Lookup table over subword pieces, with reserved padding/unknown rows."""

    def __init__(self, piece_forms: list[str], dim: int, rng: np.random.Generator,
                 dtype=np.float64, name: str = "embed"):
        if len(set(piece_forms)) != len(piece_forms):
            raise ParameterError("duplicate piece forms in embedding table")
        self.form_to_id = {form: i + _RESERVED_ROWS for i, form in enumerate(piece_forms)}
        self.dim = dim
        self.vocab_size = len(piece_forms) + _RESERVED_ROWS
        scale = 1.0 / np.sqrt(dim)
        weights = rng.uniform(-scale, scale, size=(self.vocab_size, dim))
        weights[PAD_ID] = 0.0
        self.weights = Parameter(weights.astype(dtype), name=f"{name}.weights")

    def ids_for(self, seg: Segmentation) -> np.ndarray:
        """Map a segmentation to embedding rows; flagged-unknown pieces get
        the reserved unknown row, any other out-of-table piece is an error."""
        ids = np.empty(len(seg.pieces), dtype=np.int64)
        unknown = set(seg.unknown)
        for i, piece in enumerate(seg.pieces):
            if i in unknown:
                ids[i] = UNK_CHAR_ID
            else:
                row = self.form_to_id.get(piece)
                if row is None:
                    raise ParameterError(f"piece {piece!r} is not in the embedding table")
                ids[i] = row
        return ids

    @property
    def pad_row(self) -> Tensor:
        return self.weights[PAD_ID:PAD_ID + 1]


class ConvKernel:
    """One narrow-convolution kernel: width x d_sub x out_channels."""

    def __init__(self, width: int, d_sub: int, out_channels: int,
                 rng: np.random.Generator, dtype=np.float64, name: str = "conv"):
        if width < 1:
            raise ParameterError("kernel width must be >= 1")
        self.width = width
        self.out_channels = out_channels
        fan_in = width * d_sub
        scale = np.sqrt(6.0 / (fan_in + out_channels))
        self.weights = Parameter(
            rng.uniform(-scale, scale, size=(width, d_sub, out_channels)).astype(dtype),
            name=f"{name}.weights",
        )
        self.bias = Parameter(np.zeros(out_channels, dtype=dtype), name=f"{name}.bias")

    def flat_weights(self) -> Tensor:
        return ad.reshape(self.weights, (self.weights.shape[0] * self.weights.shape[1],
                                         self.weights.shape[2]))


class HighwayLayer:
    """Gated residual layer: t * H(x) + (1 - t) * x, square in d_cnn."""

    def __init__(self, dim: int, rng: np.random.Generator, dtype=np.float64,
                 name: str = "highway"):
        scale = np.sqrt(6.0 / (2 * dim))
        self.w_h = Parameter(rng.uniform(-scale, scale, size=(dim, dim)).astype(dtype),
                             name=f"{name}.w_h")
        self.b_h = Parameter(np.zeros(dim, dtype=dtype), name=f"{name}.b_h")
        self.w_t = Parameter(rng.uniform(-scale, scale, size=(dim, dim)).astype(dtype),
                             name=f"{name}.w_t")
        # carry-biased gate start, standard for highway stacks
        self.b_t = Parameter(np.full(dim, -1.0, dtype=dtype), name=f"{name}.b_t")

    def forward(self, x: Tensor) -> Tensor:
        gate = ad.sigmoid(ad.add(ad.matmul(x, self.w_t), self.b_t))
        transformed = ad.tanh(ad.add(ad.matmul(x, self.w_h), self.b_h))
        carry = ad.add_constant(ad.neg(gate), 1.0)
        return ad.add(ad.mul(gate, transformed), ad.mul(carry, x))


def conv_maxpool(embedded: Tensor, kernel: ConvKernel, pad_row: Tensor | None = None) -> Tensor:
    """Narrow convolution + tanh + max-over-positions for one word.

    ``embedded`` is (m, d_sub).  When m < width the sequence is left-padded
    to the kernel width with ``pad_row`` (zeros if not given), leaving a
    single convolution position.
    """
    if embedded.data.ndim != 2:
        raise ParameterError(f"conv_maxpool expects (m, d_sub), got {embedded.shape}")
    m, d = embedded.shape
    w = kernel.width
    if m < w:
        if pad_row is None:
            pad_row = Tensor(np.zeros((1, d), dtype=embedded.data.dtype))
        embedded = ad.concat([pad_row] * (w - m) + [embedded], axis=0)
        m = w
    positions = m - w + 1
    if w == 1:
        windows = embedded
    else:
        windows = ad.concat([embedded[k:positions + k] for k in range(w)], axis=1)
    pre = ad.add(ad.matmul(windows, kernel.flat_weights()), kernel.bias)
    return ad.max_axis(ad.tanh(pre), axis=0)


class Composer:
    """Embedding table + convolution kernels + highway stack."""

    def __init__(
        self,
        piece_forms: list[str],
        d_sub: int,
        kernel_widths: tuple[int, ...],
        kernel_channels: tuple[int, ...],
        highway_layers: int,
        rng: np.random.Generator,
        dtype=np.float64,
        max_pieces: int = 24,
    ):
        if len(kernel_widths) != len(kernel_channels) or not kernel_widths:
            raise ParameterError("kernel widths and channels must align and be non-empty")
        self.table = SubwordEmbeddingTable(piece_forms, d_sub, rng, dtype)
        self.kernels = [
            ConvKernel(w, d_sub, c, rng, dtype, name=f"conv{i}")
            for i, (w, c) in enumerate(zip(kernel_widths, kernel_channels))
        ]
        self.highway = [
            HighwayLayer(sum(kernel_channels), rng, dtype, name=f"highway{i}")
            for i in range(highway_layers)
        ]
        self.d_cnn = int(sum(kernel_channels))
        self.max_pieces = max_pieces
        self.dtype = dtype

    def parameters(self) -> list[Parameter]:
        params = [self.table.weights]
        for k in self.kernels:
            params.extend([k.weights, k.bias])
        for h in self.highway:
            params.extend([h.w_h, h.b_h, h.w_t, h.b_t])
        return params

    def compose_word(self, seg: Segmentation) -> Tensor:
        """Compose one word vector; mirror of the batched path."""
        ids = self._capped_ids(seg)
        embedded = ad.gather_rows(self.table.weights, ids)
        pooled = [conv_maxpool(embedded, k, self.table.pad_row) for k in self.kernels]
        x = ad.reshape(ad.concat(pooled, axis=0), (1, self.d_cnn))
        for layer in self.highway:
            x = layer.forward(x)
        return ad.reshape(x, (self.d_cnn,))

    def compose_batch(self, segs: list[Segmentation]) -> Tensor:
        """Compose a (len(segs), d_cnn) matrix of word vectors.

        Matches ``compose_word`` exactly: all words share a left pad of
        (max kernel width - 1) padding rows; per kernel, positions whose
        window leaks into padding are masked out, except the single
        left-padded window kept for words shorter than the kernel.
        """
        if not segs:
            raise ParameterError("compose_batch of an empty word list")
        ids_list = [self._capped_ids(s) for s in segs]
        lengths = np.array([len(i) for i in ids_list], dtype=np.int64)
        g = max(k.width for k in self.kernels) - 1
        l_max = int(lengths.max())
        width_total = g + l_max
        grid = np.full((len(segs), width_total), PAD_ID, dtype=np.int64)
        for r, ids in enumerate(ids_list):
            grid[r, g:g + len(ids)] = ids

        emb = ad.gather_rows(self.table.weights, grid.reshape(-1))
        emb3 = ad.reshape(emb, (len(segs), width_total, self.table.dim))

        pooled = []
        for kernel in self.kernels:
            w = kernel.width
            positions = width_total - w + 1
            if w == 1:
                windows = emb3
            else:
                windows = ad.concat([emb3[:, k:positions + k, :] for k in range(w)], axis=2)
            flat = ad.reshape(windows, (len(segs) * positions, w * self.table.dim))
            pre = ad.add(ad.matmul(flat, kernel.flat_weights()), kernel.bias)
            act = ad.tanh(ad.reshape(pre, (len(segs), positions, kernel.out_channels)))
            mask = self._position_mask(lengths, positions, w, g)
            pooled.append(ad.max_axis(ad.add_constant(act, mask[:, :, None]), axis=1))
        x = ad.concat(pooled, axis=1)
        for layer in self.highway:
            x = layer.forward(x)
        return x

    def _position_mask(self, lengths: np.ndarray, positions: int, w: int, g: int) -> np.ndarray:
        # valid window start range per word: [min(g, g+m-w), g+m-w]
        p = np.arange(positions)[None, :]
        last = g + lengths[:, None] - w
        first = np.minimum(g, last)
        valid = (p >= first) & (p <= last)
        mask = np.where(valid, 0.0, NEG_INF)
        return mask.astype(self.dtype)

    def _capped_ids(self, seg: Segmentation) -> np.ndarray:
        ids = self.table.ids_for(seg)
        if len(ids) > self.max_pieces:
            logger.warning(
                "word %r has %d pieces; truncating to %d", seg.word, len(ids), self.max_pieces
            )
            ids = ids[: self.max_pieces]
        return ids
