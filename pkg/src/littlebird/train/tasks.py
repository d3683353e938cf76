"""Toy classification tasks for the pack-size and extrapolation experiments."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import BaseEncoder, Impl
from littlebird.posbias import PositionIds
from littlebird.train.metrics import MetricRecord, MetricsLog
from littlebird.train.objectives import classification_loss
from littlebird.train.optim import AdamW
from littlebird.train.padding import padded_positions
from littlebird.train.vocab import CLS_ID, Vocabulary

logger = get_logger(__name__)


@dataclass
class TaskExample:
    """A token sequence labelled with the class of its key token."""

    tokens: npt.NDArray[np.int64]
    label: int
    query_index: int


def key_word(key_type: int, label: int) -> str:
    return f"k{key_type}_{label}"


def query_word(key_type: int) -> str:
    return f"q{key_type}"


def task_vocabulary(num_classes: int, key_types: int = 1, filler_words: int = 48) -> Vocabulary:
    """Specials and enders, then keys k{type}_{class}, queries q{type}, then fillers f{i}."""
    words = [key_word(a, c) for a in range(key_types) for c in range(num_classes)]
    words += [query_word(a) for a in range(key_types)]
    words += [f"f{i}" for i in range(filler_words)]
    return Vocabulary(words)


def _filler_ids(vocab: Vocabulary) -> npt.NDArray[np.int64]:
    return np.array(
        [i for i in range(len(vocab)) if vocab.token_of(i).startswith("f")], dtype=np.int64
    )


def make_retrieval_examples(
    count: int,
    seq_len: int,
    block_size: int,
    layers: int,
    vocab: Vocabulary,
    num_classes: int,
    rng: np.random.Generator,
    key_types: int = 1,
) -> list[TaskExample]:
    """
    Out-of-window retrieval.

    Every key type gets one key token with a random class, placed at distinct
    positions from block `layers` up to the middle of the sequence. The last
    token queries one type; the label is the class of that type's key. After
    `layers` rounds of window attention the query has only seen blocks
    0..layers−1 and the last layers+1 blocks, so the keys can reach it only
    through the pack.
    """
    num_blocks = seq_len // block_size
    if seq_len % block_size or num_blocks // 2 <= layers:
        raise ConfigurationError(
            f"seq_len={seq_len} with block_size={block_size} leaves no out-of-window block "
            f"for {layers} layers"
        )
    low, high = layers * block_size, (num_blocks // 2) * block_size
    if high - low < key_types:
        raise ConfigurationError(
            f"{key_types} key types do not fit in the {high - low} out-of-window positions"
        )
    fillers = _filler_ids(vocab)
    examples = []
    for _ in range(count):
        tokens = rng.choice(fillers, size=seq_len)
        tokens[0] = CLS_ID
        classes = rng.integers(num_classes, size=key_types)
        slots = low + rng.choice(high - low, size=key_types, replace=False)
        for key_type, (slot, label) in enumerate(zip(slots, classes, strict=True)):
            tokens[slot] = vocab.id_of(key_word(key_type, int(label)))
        asked = int(rng.integers(key_types))
        tokens[-1] = vocab.id_of(query_word(asked))
        examples.append(TaskExample(tokens.astype(np.int64), int(classes[asked]), seq_len - 1))
    return examples


def make_nearest_key_examples(
    count: int,
    seq_len: int,
    vocab: Vocabulary,
    num_classes: int,
    rng: np.random.Generator,
    decoys: int = 2,
    sentence_len: tuple[int, int] = (4, 10),
) -> list[TaskExample]:
    """
    Nearest-key recall.

    [CLS], filler sentences ending with "." and the query token last. The
    answer key sits l/4 to l/2 tokens before the query; `decoys` keys of
    random class sit at least 3l/8 further away. The label is the class of
    the key closest to the query, so the classifier has to compare distances
    it only saw up to the training length.
    """
    if seq_len < 32:
        raise ConfigurationError(f"seq_len={seq_len} is too short for nearest-key recall")
    fillers = _filler_ids(vocab)
    period = vocab.id_of(".")
    query = seq_len - 1
    examples = []
    for _ in range(count):
        body: list[int] = []
        while len(body) < seq_len - 2:
            size = int(rng.integers(sentence_len[0], sentence_len[1] + 1))
            body.extend(int(t) for t in rng.choice(fillers, size=size - 1))
            body.append(period)
        tokens = np.asarray([CLS_ID, *body[: seq_len - 2], vocab.id_of(query_word(0))], dtype=np.int64)
        is_filler = np.isin(tokens, fillers)

        near = [i for i in range(query - seq_len // 2, query - seq_len // 4 + 1) if is_filler[i]]
        key_at = int(rng.choice(near))
        far_end = key_at - (3 * seq_len) // 8
        far = [i for i in range(1, far_end + 1) if is_filler[i]]
        if len(far) < decoys:
            raise ConfigurationError(f"seq_len={seq_len} leaves no room for {decoys} decoys")

        label = int(rng.integers(num_classes))
        tokens[key_at] = vocab.id_of(key_word(0, label))
        for at in rng.choice(far, size=decoys, replace=False):
            tokens[int(at)] = vocab.id_of(key_word(0, int(rng.integers(num_classes))))
        examples.append(TaskExample(tokens, label, query))
    return examples


def evaluate_classifier(
    model: BaseEncoder, examples: Sequence[TaskExample], impl: Impl = "blocked"
) -> float:
    """Accuracy of the classifier head."""
    if not examples:
        return 0.0
    hits = 0
    for example in examples:
        _, predicted = classification_loss(
            model, example.tokens, example.label, example.query_index, impl=impl
        )
        hits += int(predicted == example.label)
    return hits / len(examples)


def train_classifier(
    model: BaseEncoder,
    examples: Sequence[TaskExample],
    *,
    epochs: int,
    batch_size: int,
    learning_rate: float,
    rng: np.random.Generator,
    stage: str,
    seed: int,
    weight_decay: float = 0.01,
    pi: tuple[float, int] | None = None,
    enders: frozenset[int] = frozenset(),
    impl: Impl = "blocked",
    metrics: MetricsLog | None = None,
) -> MetricsLog:
    """
    Fit the classifier head and encoder with AdamW.

    Args:
        pi: (probability, max gap) for Padding Insertion after `enders`, or None.
    """
    log = metrics if metrics is not None else MetricsLog()
    optimizer = AdamW(model.store, learning_rate, weight_decay=weight_decay)
    step = 0
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(examples))
        losses: list[float] = []
        hits = 0
        for offset in range(0, len(order), batch_size):
            batch = [examples[int(k)] for k in order[offset : offset + batch_size]]
            optimizer.zero_grad()
            for example in batch:
                pos: PositionIds | None = None
                if pi is not None:
                    pos = padded_positions(example.tokens, rng, pi[0], pi[1], enders)
                loss, predicted = classification_loss(
                    model, example.tokens, example.label, example.query_index, pos, impl
                )
                (loss * (1.0 / len(batch))).backward()
                losses.append(loss.item())
                hits += int(predicted == example.label)
            optimizer.step()
            step += 1
        record = MetricRecord(stage, epoch, step, float(np.mean(losses)), hits / len(examples), seed)
        log.append(record)
        logger.info("epoch_finished", stage=stage, epoch=epoch, loss=record.loss, acc=record.acc)
    return log
