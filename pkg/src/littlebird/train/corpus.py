"""Corpus reading, synthesis and chunking."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from littlebird.exceptions import ArtifactIOError, ConfigurationError
from littlebird.logging import get_logger
from littlebird.train.spans import find_recurring_spans
from littlebird.train.vocab import CLS_ID, Vocabulary

logger = get_logger(__name__)

MAX_SYNTHESIS_ATTEMPTS = 200


def read_corpus(path: Path, encoding: str = "utf-8") -> list[str]:
    """
    Read a plain-text corpus, one document per line; blank lines are skipped.

    Raises:
        ArtifactIOError: If the file cannot be read or decoded.
    """
    try:
        text = path.read_text(encoding=encoding)
    except (OSError, UnicodeDecodeError) as exc:
        raise ArtifactIOError(f"Cannot read corpus: {exc}", path=str(path)) from exc
    documents = [line.strip() for line in text.splitlines() if line.strip()]
    logger.info("corpus_read", path=str(path), documents=len(documents))
    return documents


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    """
    Shape of the synthetic RSS corpus.

    Documents mix filler sentences ending in "." with planted recurring spans.
    Every occurrence of a planted span is its own sentence, "cue span !", and
    all occurrences of one span share the same cue. Cues are never part of a
    span, so the cue before a [QUESTION] names the occurrence that answers it.
    """

    filler_words: int = 400
    span_words: int = 64
    cues: int = 12
    min_span_len: int = 2
    max_span_len: int = 4
    max_occurrences: int = 3
    min_sentence: int = 3
    max_sentence: int = 9

    def cue_words(self) -> list[str]:
        return [f"c{i}" for i in range(self.cues)]

    def vocabulary(self) -> Vocabulary:
        words = [f"w{i}" for i in range(self.filler_words)]
        words += [f"s{i}" for i in range(self.span_words)]
        return Vocabulary(words + self.cue_words())

    def protected_ids(self, vocab: Vocabulary) -> frozenset[int]:
        """Specials, enders and cues: never part of a span or an answer."""
        cues = frozenset(vocab.id_of(c) for c in self.cue_words())
        return vocab.special_ids | vocab.ender_ids | cues


def synthesize_document(
    length: int,
    clusters: int,
    rng: np.random.Generator,
    spec: SyntheticCorpusSpec | None = None,
) -> list[str]:
    """
    One synthetic document of exactly `length` words with `clusters` planted spans.

    Not checked for accidental repeats; see `synthesize_corpus`.
    """
    spec = spec or SyntheticCorpusSpec()
    if clusters > spec.cues:
        raise ConfigurationError(f"{clusters} planted spans need as many cues, have {spec.cues}")
    segments: list[list[str]] = []
    for cue in rng.choice(spec.cues, size=clusters, replace=False):
        span_len = int(rng.integers(spec.min_span_len, spec.max_span_len + 1))
        span = [f"s{i}" for i in rng.integers(spec.span_words, size=span_len)]
        occurrences = int(rng.integers(2, spec.max_occurrences + 1))
        segments.extend([f"c{cue}", *span, "!"] for _ in range(occurrences))

    remaining = length - sum(len(seg) for seg in segments)
    if remaining < 0:
        raise ConfigurationError(
            f"{clusters} planted spans do not fit in {length} words", length=length
        )
    while remaining > 0:
        size = min(remaining, int(rng.integers(spec.min_sentence, spec.max_sentence + 1)))
        if remaining - size < spec.min_sentence:
            size = remaining
        words = [f"w{i}" for i in rng.integers(spec.filler_words, size=size - 1)]
        segments.append([*words, "."])
        remaining -= size

    order = rng.permutation(len(segments))
    return [word for k in order for word in segments[int(k)]]


def synthesize_corpus(
    num_documents: int,
    length: int,
    clusters: int,
    rng: np.random.Generator,
    spec: SyntheticCorpusSpec | None = None,
    min_span_len: int = 2,
) -> tuple[Vocabulary, list[str]]:
    """
    Documents whose recurring spans are exactly the planted ones.

    Each document is resampled until `find_recurring_spans` (with the spec's
    protected ids excluded) returns the planted clusters and nothing else.

    Returns:
        The corpus vocabulary and the documents as whitespace-joined text.

    Raises:
        ConfigurationError: If a clean document cannot be drawn.
    """
    spec = spec or SyntheticCorpusSpec()
    vocab = spec.vocabulary()
    excluded = spec.protected_ids(vocab)
    documents: list[str] = []
    for index in range(num_documents):
        for _ in range(MAX_SYNTHESIS_ATTEMPTS):
            words = synthesize_document(length, clusters, rng, spec)
            ids = [vocab.id_of(w) for w in words]
            found = find_recurring_spans(ids, min_span_len, exclude=excluded)
            if len(found) == clusters and all(_is_planted(c.tokens, vocab) for c in found):
                documents.append(" ".join(words))
                break
        else:
            raise ConfigurationError(
                f"Could not synthesize a clean document after {MAX_SYNTHESIS_ATTEMPTS} attempts",
                document=index,
                length=length,
                clusters=clusters,
            )
    logger.info("corpus_synthesized", documents=len(documents), length=length, clusters=clusters)
    return vocab, documents


def _is_planted(span: Sequence[int], vocab: Vocabulary) -> bool:
    return all(vocab.token_of(t).startswith("s") for t in span)


def encode_documents(documents: Sequence[str], vocab: Vocabulary) -> list[list[int]]:
    """Token ids per document, without [CLS]."""
    return [vocab.encode(doc) for doc in documents]


def chunk_documents(documents: Sequence[Sequence[int]], length: int) -> list[list[int]]:
    """
    Re-chunk documents into sequences of exactly `length` tokens.

    Every chunk starts with [CLS] followed by length − 1 document tokens;
    a trailing remainder shorter than that is dropped.
    """
    if length < 2:
        raise ConfigurationError(f"Chunk length must be >= 2, got {length}")
    body = length - 1
    chunks: list[list[int]] = []
    for doc in documents:
        for start in range(0, len(doc) - body + 1, body):
            chunks.append([CLS_ID, *doc[start : start + body]])
    return chunks
