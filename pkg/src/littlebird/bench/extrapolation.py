"""Padding Insertion extrapolation: train short with and without PI, evaluate longer.

The task is nearest-key recall: the answer key sits a quarter to half of the
input before the query and decoy keys sit further back, so the classifier
has to compare distances that grow past the training length.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from littlebird.config import ExtrapolationConfig
from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import BaseEncoder, EncoderModel, load_checkpoint
from littlebird.train.tasks import (
    evaluate_classifier,
    make_nearest_key_examples,
    task_vocabulary,
    train_classifier,
)
from littlebird.train.vocab import Vocabulary

logger = get_logger(__name__)

MODELS = ("no_pi", "pi")
EXTRAPOLATION_FIELDS = ("model", "train_len", "eval_len", "accuracy", "seeds")


@dataclass(frozen=True)
class ExtrapolationRow:
    """Median accuracy over seeds of one model at one evaluation length."""

    model: str
    train_len: int
    eval_len: int
    accuracy: float
    seeds: int


def train_pair(
    config: ExtrapolationConfig, seed: int, vocab: Vocabulary
) -> dict[str, BaseEncoder]:
    """Twin classifiers from the same init and data, one trained with PI."""
    model_config = config.model.model_copy(update={"vocab_size": len(vocab)})
    rng = np.random.default_rng(seed)
    examples = make_nearest_key_examples(
        config.train_examples, config.train_len, vocab, model_config.num_classes, rng
    )
    models: dict[str, BaseEncoder] = {}
    for name in MODELS:
        model = EncoderModel(model_config, seed=seed)
        train_classifier(
            model,
            examples,
            epochs=config.epochs,
            batch_size=config.batch_size,
            learning_rate=config.learning_rate,
            rng=np.random.default_rng([seed, 1]),
            stage=f"extrapolation_{name}",
            seed=seed,
            pi=(config.pi_prob, config.pi_max_gap) if name == "pi" else None,
            enders=vocab.ender_ids,
        )
        models[name] = model
    return models


def load_pair(checkpoint_dir: Path) -> dict[str, BaseEncoder]:
    """
    Pretrained `pi.npz` and `no_pi.npz` classifiers.

    Raises:
        ConfigurationError: If a checkpoint is missing or has no classifier head.
    """
    models: dict[str, BaseEncoder] = {}
    for name in MODELS:
        path = checkpoint_dir / f"{name}.npz"
        if not path.is_file():
            raise ConfigurationError("Missing extrapolation checkpoint", path=str(path))
        model = load_checkpoint(path)
        if model.classifier is None:
            raise ConfigurationError("Checkpoint has no classifier head", path=str(path))
        models[name] = model
    return models


def bench_extrapolation(config: ExtrapolationConfig) -> list[ExtrapolationRow]:
    """
    Accuracy per (model, eval length), median over `config.seeds`.

    With `checkpoint_dir` set the stored pair is evaluated under every seed's
    held-out data; otherwise a fresh pair is trained per seed.
    """
    if not config.eval_lengths:
        raise ConfigurationError("No evaluation lengths given")
    stored = load_pair(config.checkpoint_dir) if config.checkpoint_dir is not None else None
    num_classes = (
        stored["pi"].config.num_classes if stored is not None else config.model.num_classes
    )
    if num_classes < 2:
        raise ConfigurationError(f"Nearest-key recall needs at least 2 classes, got {num_classes}")
    vocab = task_vocabulary(num_classes)

    scores: dict[tuple[str, int], list[float]] = {}
    for seed in config.seeds:
        models = stored if stored is not None else train_pair(config, seed, vocab)
        for length in sorted(set(config.eval_lengths)):
            held_out = make_nearest_key_examples(
                config.eval_examples,
                length,
                vocab,
                num_classes,
                np.random.default_rng([seed, length, 2]),
            )
            for name, model in models.items():
                acc = evaluate_classifier(model, held_out)
                scores.setdefault((name, length), []).append(acc)
                logger.info("extrapolation_eval", model=name, seed=seed, eval_len=length, acc=acc)

    return [
        ExtrapolationRow(name, config.train_len, length, statistics.median(accs), len(accs))
        for (name, length), accs in sorted(scores.items())
    ]
