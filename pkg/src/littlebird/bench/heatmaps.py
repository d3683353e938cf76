"""Average attention heatmaps per layer and head.

For each layer and head the attention probabilities of a batch are averaged
per (query, key) cell, converted to log scale and written twice:

    layer{L}_head{H}.npy   float64 log-probabilities
    layer{L}_head{H}.pgm   binary graymap, brighter = more attention

LittleBird maps are (l, s + l) with the pack columns first; dense maps are (l, l).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt

from littlebird.attention import scatter_blocked_probs
from littlebird.config import HeatmapConfig, TrainConfig
from littlebird.exceptions import ArtifactIOError, ConfigurationError, NumericError
from littlebird.logging import get_logger
from littlebird.model import BaseEncoder, EncoderModel, Impl
from littlebird.numkit.tensor import Array
from littlebird.train.corpus import (
    chunk_documents,
    encode_documents,
    read_corpus,
    synthesize_corpus,
)
from littlebird.train.vocab import Vocabulary

logger = get_logger(__name__)

LOG_FLOOR = 1e-12
ROW_SUM_TOLERANCE = 1e-6


@dataclass
class HeatmapDump:
    """Averaged attention of one head in one layer."""

    layer: int
    head: int
    probs: Array
    npy_path: Path | None = None
    pgm_path: Path | None = None

    @property
    def log_probs(self) -> Array:
        return np.log(np.maximum(self.probs, LOG_FLOOR))


def _layer_probs(model: BaseEncoder, tokens: npt.ArrayLike, impl: Impl) -> list[Array]:
    length = np.asarray(tokens).size
    if isinstance(model, EncoderModel):
        out = model.encode(tokens, impl=impl, collect=True)
        s = model.spec.pack_size
        maps = []
        for layer in out.layers:
            probs = layer.attention.probs.data
            if impl == "blocked":
                probs = scatter_blocked_probs(probs, model.spec)
            keep = np.r_[0:s, s : s + length]
            maps.append(probs[:, :length][:, :, keep])
        return maps
    out = model.encode(tokens, collect=True)
    return [layer.attention.probs.data for layer in out.layers]


def average_attention(
    model: BaseEncoder, batch: Sequence[npt.ArrayLike], impl: Impl = "blocked"
) -> list[Array]:
    """
    Per-layer (H, l, keys) attention averaged over `batch`.

    Raises:
        ConfigurationError: On an empty batch or sequences of different lengths.
        NumericError: If any averaged row does not sum to 1.
    """
    if not batch:
        raise ConfigurationError("Heatmaps need at least one sequence")
    lengths = {np.asarray(seq).size for seq in batch}
    if len(lengths) != 1:
        raise ConfigurationError(f"Heatmap batch mixes lengths {sorted(lengths)}")
    totals: list[Array] | None = None
    for seq in batch:
        maps = _layer_probs(model, seq, impl)
        totals = maps if totals is None else [t + m for t, m in zip(totals, maps, strict=True)]
    assert totals is not None
    averaged = [t / len(batch) for t in totals]
    for index, probs in enumerate(averaged):
        deviation = float(np.max(np.abs(probs.sum(axis=-1) - 1.0))) if probs.size else 0.0
        if deviation > ROW_SUM_TOLERANCE:
            raise NumericError(
                "Averaged attention rows do not sum to 1", layer=index, deviation=deviation
            )
    return averaged


def render_pgm(log_probs: Array) -> bytes:
    """Binary P5 graymap of a 2-D log-probability map scaled to 0..255."""
    low, high = float(log_probs.min()), float(log_probs.max())
    span = high - low
    scaled = np.zeros_like(log_probs) if span == 0 else (log_probs - low) / span
    pixels = np.round(scaled * 255.0).astype(np.uint8)
    height, width = pixels.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes()


def dump_heatmaps(
    model: BaseEncoder,
    batch: Sequence[npt.ArrayLike],
    out_dir: Path,
    impl: Impl = "blocked",
) -> list[HeatmapDump]:
    """
    Write one `.npy` and one `.pgm` file per layer and head.

    Raises:
        ArtifactIOError: If a file cannot be written.
    """
    dumps = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for layer, probs in enumerate(average_attention(model, batch, impl)):
            for head in range(probs.shape[0]):
                dump = HeatmapDump(layer, head, probs[head])
                stem = out_dir / f"layer{layer}_head{head}"
                dump.npy_path = stem.with_suffix(".npy")
                dump.pgm_path = stem.with_suffix(".pgm")
                np.save(dump.npy_path, dump.log_probs)
                dump.pgm_path.write_bytes(render_pgm(dump.log_probs))
                dumps.append(dump)
    except OSError as exc:
        raise ArtifactIOError(f"Cannot write heatmap: {exc}", path=str(out_dir)) from exc
    logger.info("heatmaps_written", out_dir=str(out_dir), files=2 * len(dumps), kind=model.kind)
    return dumps


def heatmap_batch(
    config: HeatmapConfig,
    train: TrainConfig,
    seed: int,
    vocab_size: int,
    corpus: Path | None = None,
    vocab: Vocabulary | None = None,
    encoding: str = "utf-8",
) -> list[list[int]]:
    """
    Held-out sequences of `config.seq_len` tokens.

    Without `corpus` the sequences are synthesized like the training corpus.
    With `corpus`, chunks are drawn from its documents; `vocab` should be the
    vocabulary saved next to the checkpoint, otherwise one is rebuilt from
    the corpus itself. Documents with words outside the vocabulary are skipped.

    Raises:
        ConfigurationError: If the vocabulary does not match the model or the
            corpus yields no chunk.
    """
    rng = np.random.default_rng([seed, 7])
    if corpus is not None:
        documents = read_corpus(corpus, encoding)
        vocab = vocab or Vocabulary.from_documents(documents)
        _check_vocab_size(vocab_size, len(vocab), "corpus")
        known = [doc for doc in documents if vocab.covers(doc)]
        chunks = chunk_documents(encode_documents(known, vocab), config.seq_len)
        if not chunks:
            raise ConfigurationError(
                "Corpus has no in-vocabulary chunk of the heatmap length",
                path=str(corpus),
                seq_len=config.seq_len,
                skipped=len(documents) - len(known),
            )
        picked = sorted(int(k) for k in rng.permutation(len(chunks))[: config.batch_size])
        return [chunks[k] for k in picked]

    synthetic, documents = synthesize_corpus(
        config.batch_size,
        config.seq_len - 1,
        train.planted_spans(config.seq_len),
        rng,
        min_span_len=train.min_span_len,
    )
    _check_vocab_size(vocab_size, len(synthetic), "synthetic corpus")
    return chunk_documents(encode_documents(documents, synthetic), config.seq_len)[: config.batch_size]


def _check_vocab_size(model: int, corpus: int, source: str) -> None:
    if model != corpus:
        raise ConfigurationError(
            f"Model vocabulary does not match the {source}", model=model, corpus=corpus
        )
