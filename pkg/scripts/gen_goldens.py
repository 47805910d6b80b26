#!/usr/bin/env python3
"""Regenerate the committed CLI golden fixtures under tests/golden/.

Every fixture is the byte-exact output of a CLI invocation on the bundled
toy corpus; the CLI test suite re-runs the same commands and compares.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
TRAIN = ROOT / "src" / "subtok" / "data" / "toy_train.txt"
VALID = ROOT / "src" / "subtok" / "data" / "toy_valid.txt"

TINY_CFG = """\
# minimal architecture used for fast end-to-end golden runs
d_sub=8
kernel_widths=1,2
kernel_channels=4,4
highway_layers=1
hidden_size=8
num_layers=1
max_pieces=24
dtype=float32
output_vocab_size=200
batch_size=64
max_sentence_len=24
learning_rate=0.002
optimizer=adam
clip_norm=5.0
epochs=2
"""

EMBED_INPUT = """\
the happy farmer sang a song
her kindness follows the quiet child
uselessness and usefulness differ
"""


def cli(*args: str) -> str:
    result = subprocess.run(
        [sys.executable, "-m", "subtok.cli", *args],
        capture_output=True, text=True, cwd=ROOT, check=True,
    )
    return result.stdout


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    (GOLDEN / "tiny_lm.cfg").write_text(TINY_CFG, encoding="utf-8")
    (GOLDEN / "embed_input.txt").write_text(EMBED_INPUT, encoding="utf-8")

    from subtok.corpus import count_word_types, write_stats

    write_stats(count_word_types(TRAIN), GOLDEN / "stats.tsv")

    cli("train-vocab", "--algo", "bpe", "--size", "500", "--corpus", str(TRAIN),
        "--out", str(GOLDEN / "bpe500.vocab"), "--merges-out", str(GOLDEN / "bpe500.merges"))
    cli("train-vocab", "--algo", "ulm", "--size", "500", "--corpus", str(TRAIN),
        "--out", str(GOLDEN / "ulm500.vocab"))

    cli("segment", "--vocab", str(GOLDEN / "bpe500.vocab"),
        "--merges", str(GOLDEN / "bpe500.merges"),
        "--in", str(VALID), "--out", str(GOLDEN / "segmented_valid_bpe500.txt"))
    cli("segment", "--vocab", str(GOLDEN / "ulm500.vocab"),
        "--in", str(VALID), "--out", str(GOLDEN / "segmented_valid_ulm500.txt"))

    stdout = cli("train-lm", "--vocab", str(GOLDEN / "bpe500.vocab"),
                 "--merges", str(GOLDEN / "bpe500.merges"),
                 "--corpus", str(TRAIN), "--valid", str(VALID),
                 "--out", str(GOLDEN / "tiny_lm.ckpt"),
                 "--config", str(GOLDEN / "tiny_lm.cfg"), "--seed", "7",
                 "--report", str(GOLDEN / "tiny_lm.report"))
    (GOLDEN / "train_lm.stdout").write_text(stdout, encoding="utf-8")

    stdout = cli("eval-ppl", "--model", str(GOLDEN / "tiny_lm.ckpt"),
                 "--corpus", str(VALID))
    (GOLDEN / "eval_ppl.stdout").write_text(stdout, encoding="utf-8")

    cli("embed", "--model", str(GOLDEN / "tiny_lm.ckpt"),
        "--in", str(GOLDEN / "embed_input.txt"), "--out", str(GOLDEN / "embeddings.txt"))

    stdout = cli("compare-vocabs", "--a", str(GOLDEN / "bpe500.vocab"),
                 "--b", str(GOLDEN / "ulm500.vocab"),
                 "--tsv-out", str(GOLDEN / "overlap.tsv"),
                 "--json-out", str(GOLDEN / "overlap.json"))
    (GOLDEN / "compare_vocabs.stdout").write_text(stdout, encoding="utf-8")

    stdout = cli("consistency", "--vocab", str(GOLDEN / "bpe500.vocab"),
                 "--merges", str(GOLDEN / "bpe500.merges"), "--corpus", str(VALID),
                 "--tsv-out", str(GOLDEN / "consistency.tsv"))
    (GOLDEN / "consistency.stdout").write_text(stdout, encoding="utf-8")

    print(f"golden fixtures written to {GOLDEN}")


if __name__ == "__main__":
    main()
