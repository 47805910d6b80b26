"""Command-line surface: deterministic pipelines over the library modules.

Exit codes: 0 success, 1 I/O or decoding failure, 2 parameter/format
problems, 3 numerical failure.  Metrics go to stdout, warnings and
diagnostics to stderr.
"""

from __future__ import annotations

import functools
import hashlib
import logging
import sys

import click

from .analysis import segmentation_consistency, vocab_overlap
from .base import Segmenter
from .bpe import BpeSegmenter, train_bpe
from .corpus import count_word_types, iter_lines, split_words, stream_sentences
from .errors import (
    CorpusDecodeError,
    FormatError,
    NumericalError,
    ParameterError,
)
from .lm import (
    LmModel,
    ModelConfig,
    TrainConfig,
    WordVocab,
    extract_embeddings,
    load_lm,
    perplexity,
    save_lm,
    train,
)
from .ulm import UnigramSegmenter, train_ulm
from .vocab import (
    DEFAULT_WORD_MARKER,
    SeedVocabParams,
    read_merges,
    read_vocab,
    render_segmented_line,
    segmented_header,
    write_merges,
    write_vocab,
)

logger = logging.getLogger(__name__)

_MODEL_KEYS = {
    "d_sub": int,
    "kernel_widths": "int_tuple",
    "kernel_channels": "int_tuple",
    "highway_layers": int,
    "hidden_size": int,
    "num_layers": int,
    "max_pieces": int,
    "dtype": str,
}
_TRAIN_KEYS = {
    "batch_size": int,
    "max_sentence_len": int,
    "learning_rate": float,
    "optimizer": str,
    "clip_norm": float,
    "epochs": int,
}


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ParameterError, FormatError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except CorpusDecodeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except NumericalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Subword vocabulary training and subword-aware language modeling."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("train-vocab")
@click.option("--algo", type=click.Choice(["bpe", "ulm"]), required=True)
@click.option("--size", type=int, required=True, help="Exact vocabulary size.")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--out", "out_path", required=True, help="Vocabulary file to write.")
@click.option("--merges-out", default=None,
              help="Merges file for BPE (default: <out>.merges).")
@click.option("--eta", type=float, default=0.8, show_default=True,
              help="ULM: fraction of multi-char entries kept per pruning round.")
@click.option("--em-iters", type=int, default=2, show_default=True,
              help="ULM: EM steps per pruning round.")
@click.option("--max-sub-len", type=int, default=8, show_default=True,
              help="ULM: longest seed substring.")
@click.option("--no-boundary-marker", is_flag=True,
              help="BPE: train without the end-of-word marker.")
@_handle_errors
def cmd_train_vocab(algo, size, corpus_path, out_path, merges_out, eta, em_iters,
                    max_sub_len, no_boundary_marker):
    """Train a subword vocabulary on a pre-tokenized corpus."""
    stats = count_word_types(corpus_path)
    if algo == "bpe":
        marker = None if no_boundary_marker else "</w>"
        vocab, merges = train_bpe(stats, size, marker)
        write_vocab(vocab, out_path)
        merges_path = merges_out or f"{out_path}.merges"
        write_merges(merges, merges_path)
        click.echo(f"algo=bpe size={vocab.size} merges={len(merges.rules)}")
        click.echo(f"vocab written to {out_path}")
        click.echo(f"merges written to {merges_path}")
    else:
        params = SeedVocabParams(
            max_subword_len=max_sub_len,
            max_seed_size=max(4 * size, len(stats.character_set)),
        )
        vocab = train_ulm(stats, size, params, em_iters, eta)
        write_vocab(vocab, out_path)
        click.echo(f"algo=ulm size={vocab.size}")
        click.echo(f"vocab written to {out_path}")


def _load_segmenter(vocab_path: str, merges_path: str | None) -> Segmenter:
    vocab = read_vocab(vocab_path)
    if vocab.algo_tag == "bpe":
        if merges_path is None:
            raise ParameterError("--merges is required for a BPE vocabulary")
        return BpeSegmenter.from_trained(vocab, read_merges(merges_path))
    if merges_path is not None:
        raise ParameterError("--merges must not be given for a ULM vocabulary")
    return UnigramSegmenter.from_trained(vocab)


@main.command("segment")
@click.option("--vocab", "vocab_path", required=True)
@click.option("--merges", "merges_path", default=None)
@click.option("--in", "in_path", required=True)
@click.option("--out", "out_path", required=True)
@click.option("--word-marker", default=DEFAULT_WORD_MARKER, show_default=True)
@_handle_errors
def cmd_segment(vocab_path, merges_path, in_path, out_path, word_marker):
    """Segment every word of a text file into subword pieces."""
    segmenter = _load_segmenter(vocab_path, merges_path)
    strip = segmenter.vocab_.marker
    unknown_words = set()
    out_lines = [segmented_header(word_marker)]
    for line in iter_lines(in_path):
        segs = [segmenter.segment_word(w) for w in split_words(line)]
        unknown_words.update(s.word for s in segs if s.has_unknown)
        out_lines.append(render_segmented_line(segs, word_marker, strip))
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out_lines) + "\n")
    if unknown_words:
        click.echo(
            f"warning: {len(unknown_words)} word(s) contained characters outside "
            f"the vocabulary and were segmented with unknown-character pieces",
            err=True,
        )
    click.echo(f"segmented text written to {out_path}")


def _parse_config_file(path) -> dict:
    values: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in _MODEL_KEYS:
                kind = _MODEL_KEYS[key]
            elif key in _TRAIN_KEYS:
                kind = _TRAIN_KEYS[key]
            elif key == "output_vocab_size":
                kind = int
            else:
                raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
            if kind == "int_tuple":
                values[key] = tuple(int(v) for v in value.split(","))
            else:
                values[key] = kind(value)
    return values


@main.command("train-lm")
@click.option("--vocab", "vocab_path", required=True)
@click.option("--merges", "merges_path", default=None)
@click.option("--corpus", "corpus_path", required=True)
@click.option("--valid", "valid_path", required=True)
@click.option("--out", "ckpt_path", required=True)
@click.option("--config", "config_path", default=None,
              help="key=value hyperparameter file (defaults: desk-scale preset).")
@click.option("--seed", type=int, required=True)
@click.option("--report", "report_path", default=None,
              help="Training report path (default: <out>.report).")
@_handle_errors
def cmd_train_lm(vocab_path, merges_path, corpus_path, valid_path, ckpt_path,
                 config_path, seed, report_path):
    """Train the bidirectional subword-aware language model."""
    segmenter = _load_segmenter(vocab_path, merges_path)
    with open(vocab_path, "rb") as fh:
        vocab_hash = hashlib.sha256(fh.read()).hexdigest()
    values = _parse_config_file(config_path) if config_path else {}
    output_vocab_size = values.pop("output_vocab_size", 5000)
    model_cfg = ModelConfig(**{k: v for k, v in values.items() if k in _MODEL_KEYS})
    train_cfg = TrainConfig(seed=seed, **{k: v for k, v in values.items() if k in _TRAIN_KEYS})

    sentences = list(stream_sentences(corpus_path))
    valid_sentences = list(stream_sentences(valid_path))
    word_vocab = WordVocab.build(sentences, output_vocab_size)
    model = LmModel(segmenter.vocab_, word_vocab, model_cfg, seed)
    report = train(model, sentences, train_cfg, segmenter, valid_sentences)
    save_lm(model, segmenter, ckpt_path, vocab_hash)
    report_file = report_path or f"{ckpt_path}.report"
    with open(report_file, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.format_lines())
    final = report.epochs[-1]
    click.echo(f"final_train_ppl={final.train_ppl:.6f}")
    click.echo(f"final_valid_ppl={final.valid_ppl:.6f}")
    click.echo(f"checkpoint written to {ckpt_path}")
    click.echo(f"report written to {report_file}")


@main.command("eval-ppl")
@click.option("--model", "model_path", required=True)
@click.option("--corpus", "corpus_path", required=True)
@_handle_errors
def cmd_eval_ppl(model_path, corpus_path):
    """Evaluate perplexity of a checkpoint on a corpus (read-only)."""
    model, segmenter = load_lm(model_path)
    sentences = list(stream_sentences(corpus_path))
    report = perplexity(model, sentences, segmenter)
    click.echo(f"forward_ppl={report.forward:.6f}")
    click.echo(f"backward_ppl={report.backward:.6f}")
    click.echo(f"combined_ppl={report.combined:.6f}")


@main.command("embed")
@click.option("--model", "model_path", required=True)
@click.option("--in", "in_path", required=True)
@click.option("--out", "out_path", required=True)
@_handle_errors
def cmd_embed(model_path, in_path, out_path):
    """Extract one contextual embedding per word of each input sentence."""
    model, segmenter = load_lm(model_path)
    blocks = [f"#subtok-embeddings v1 dim={model.embedding_dim}"]
    for sentence in stream_sentences(in_path):
        lines = []
        for word, vec in zip(sentence[1:-1], extract_embeddings(model, sentence, segmenter)):
            values = " ".join(f"{x:.8g}" for x in vec)
            lines.append(f"{word}\t{values}")
        blocks.append("\n".join(lines) + "\n")
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(blocks))
    click.echo(f"embeddings written to {out_path}")


@main.command("compare-vocabs")
@click.option("--a", "path_a", required=True)
@click.option("--b", "path_b", required=True)
@click.option("--exclude-single-chars", is_flag=True,
              help="Ignore single-character entries in the overlap.")
@click.option("--tsv-out", default=None)
@click.option("--json-out", default=None)
@_handle_errors
def cmd_compare_vocabs(path_a, path_b, exclude_single_chars, tsv_out, json_out):
    """Report the overlap between two subword vocabularies."""
    a = read_vocab(path_a)
    b = read_vocab(path_b)
    report = vocab_overlap(a, b, path_a, path_b,
                           include_single_chars=not exclude_single_chars)
    if tsv_out:
        with open(tsv_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.format_tsv())
    if json_out:
        with open(json_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json() + "\n")
    click.echo(f"shared_count={report.shared_count}")
    click.echo(f"overlap_rate={100.0 * report.rate:.1f}%")


@main.command("consistency")
@click.option("--vocab", "vocab_path", required=True)
@click.option("--merges", "merges_path", default=None)
@click.option("--corpus", "corpus_path", required=True)
@click.option("--tsv-out", default=None)
@click.option("--json-out", default=None)
@_handle_errors
def cmd_consistency(vocab_path, merges_path, corpus_path, tsv_out, json_out):
    """Measure how many word types receive a single segmentation."""
    segmenter = _load_segmenter(vocab_path, merges_path)
    sentences = stream_sentences(corpus_path)
    report = segmentation_consistency(segmenter, sentences)
    if tsv_out:
        with open(tsv_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.format_tsv())
    if json_out:
        with open(json_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json() + "\n")
    click.echo(f"consistent_fraction={report.consistent_fraction:.6f}")


if __name__ == "__main__":
    main()
