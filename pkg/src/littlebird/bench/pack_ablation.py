"""Pack-size ablation on the out-of-window retrieval task."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from littlebird.config import PackAblationConfig
from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import EncoderModel
from littlebird.train.tasks import (
    evaluate_classifier,
    make_retrieval_examples,
    task_vocabulary,
    train_classifier,
)

logger = get_logger(__name__)

PACK_ABLATION_FIELDS = ("pack_size", "accuracy", "chance", "seed")


@dataclass(frozen=True)
class PackAblationRow:
    pack_size: int
    accuracy: float
    chance: float
    seed: int


def bench_pack_ablation(config: PackAblationConfig) -> list[PackAblationRow]:
    """
    Train one classifier per pack size on the same data and report held-out accuracy.

    Every run shares the init seed, so pack sizes differ only in the pack
    parameters.
    """
    base = config.model
    if base.num_classes < 2:
        raise ConfigurationError(f"Retrieval needs at least 2 classes, got {base.num_classes}")
    vocab = task_vocabulary(base.num_classes, config.key_types)
    rng = np.random.default_rng(config.seed)
    train, held_out = (
        make_retrieval_examples(
            count,
            config.seq_len,
            base.block_size,
            base.layers,
            vocab,
            base.num_classes,
            rng,
            config.key_types,
        )
        for count in (config.train_examples, config.eval_examples)
    )

    rows = []
    for pack_size in sorted(set(config.pack_sizes)):
        model_config = base.model_copy(update={"pack_size": pack_size, "vocab_size": len(vocab)})
        model = EncoderModel(model_config, seed=config.seed)
        train_classifier(
            model,
            train,
            epochs=config.epochs,
            batch_size=config.batch_size,
            learning_rate=config.learning_rate,
            rng=np.random.default_rng([config.seed, pack_size]),
            stage=f"pack_{pack_size}",
            seed=config.seed,
        )
        accuracy = evaluate_classifier(model, held_out)
        logger.info("pack_ablation_eval", pack_size=pack_size, acc=accuracy)
        rows.append(PackAblationRow(pack_size, accuracy, 1.0 / base.num_classes, config.seed))
    return rows
