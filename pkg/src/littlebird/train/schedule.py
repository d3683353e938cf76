"""Three-step training: dense teacher, warm init, distillation, long inputs.

    teacher   dense baseline pretrained with RSS on short chunks
    init      LittleBird student copied from the teacher
    distill   soft-target + attention distillation on short chunks, with PI
    long      RSS on long documents without distillation, with PI
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from littlebird.config import TrainConfig
from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import (
    BaseEncoder,
    DenseEncoder,
    EncoderModel,
    Impl,
    init_student_from_teacher,
    save_checkpoint,
)
from littlebird.numkit import Tensor
from littlebird.train.corpus import (
    SyntheticCorpusSpec,
    chunk_documents,
    encode_documents,
    read_corpus,
    synthesize_corpus,
)
from littlebird.train.distill import build_distill_batch, distill_step
from littlebird.train.metrics import MetricRecord, MetricsLog
from littlebird.train.objectives import (
    exact_match,
    mask_tokens,
    masked_token_loss,
    rss_loss,
    span_prediction,
)
from littlebird.train.optim import Optimizer, build_optimizer
from littlebird.train.padding import padded_positions
from littlebird.train.rss import RssExample, make_rss_example
from littlebird.train.spans import find_recurring_spans
from littlebird.train.vocab import VOCAB_FILE, Vocabulary

logger = get_logger(__name__)


@dataclass
class CorpusSplit:
    """
    Vocabulary plus tokenized training and held-out documents (no [CLS]).

    `protected` ids are never part of a recurring span or an answer.
    """

    vocab: Vocabulary
    train: list[list[int]]
    held_out: list[list[int]]
    protected: frozenset[int]


@dataclass
class RssData:
    """RSS examples for both sequence lengths."""

    short_train: list[RssExample]
    short_eval: list[RssExample]
    long_train: list[RssExample]
    long_eval: list[RssExample]


@dataclass
class ScheduleResult:
    """Models and metrics of one schedule run."""

    teacher: DenseEncoder
    student: EncoderModel
    vocab: Vocabulary
    data: RssData
    metrics: MetricsLog
    attention_kl: dict[str, float] = field(default_factory=dict)

    @property
    def final_accuracy(self) -> float:
        return self.metrics.records[-1].acc if self.metrics.records else 0.0

    def stage_accuracy(self, stage: str) -> float:
        """Accuracy of the last record of `stage`."""
        records = [r for r in self.metrics.records if r.stage == stage]
        if not records:
            raise ConfigurationError(f"No records for stage {stage!r}")
        return records[-1].acc


def prepare_corpus(
    config: TrainConfig, rng: np.random.Generator, encoding: str = "utf-8"
) -> CorpusSplit:
    """Read `config.corpus_path` or synthesize documents of `long_len − 1` tokens."""
    total = config.train_documents + config.eval_documents
    if config.corpus_path is not None:
        documents = read_corpus(config.corpus_path, encoding)
        if len(documents) < 2:
            raise ConfigurationError(
                "Corpus needs at least two documents", path=str(config.corpus_path)
            )
        vocab = Vocabulary.from_documents(documents)
        held = min(config.eval_documents, len(documents) // 2)
        ids = encode_documents(documents, vocab)
        protected = vocab.special_ids | vocab.ender_ids
        return CorpusSplit(vocab, ids[:-held], ids[-held:], protected)
    spec = SyntheticCorpusSpec()
    vocab, documents = synthesize_corpus(
        total,
        config.long_len - 1,
        config.planted_spans(config.long_len),
        rng,
        spec,
        min_span_len=config.min_span_len,
    )
    ids = encode_documents(documents, vocab)
    return CorpusSplit(
        vocab,
        ids[: config.train_documents],
        ids[config.train_documents :],
        spec.protected_ids(vocab),
    )


def build_rss_examples(
    documents: Sequence[Sequence[int]],
    length: int,
    config: TrainConfig,
    protected: frozenset[int],
    rng: np.random.Generator,
) -> list[RssExample]:
    """Chunk documents to `length` tokens and keep chunks with recurring spans."""
    examples = []
    for chunk in chunk_documents(documents, length):
        clusters = find_recurring_spans(
            chunk, config.min_span_len, config.span_budget(length), exclude=protected
        )
        if clusters:
            examples.append(make_rss_example(chunk, clusters, rng, protected))
    return examples


def prepare_rss_data(split: CorpusSplit, config: TrainConfig, rng: np.random.Generator) -> RssData:
    data = RssData(
        short_train=build_rss_examples(split.train, config.short_len, config, split.protected, rng),
        short_eval=build_rss_examples(split.held_out, config.short_len, config, split.protected, rng),
        long_train=build_rss_examples(split.train, config.long_len, config, split.protected, rng),
        long_eval=build_rss_examples(split.held_out, config.long_len, config, split.protected, rng),
    )
    if not data.short_train or not data.long_train:
        raise ConfigurationError("Corpus has no recurring spans to train on")
    logger.info(
        "rss_data_prepared",
        short_train=len(data.short_train),
        short_eval=len(data.short_eval),
        long_train=len(data.long_train),
        long_eval=len(data.long_eval),
    )
    return data


def _with_pi(
    examples: Sequence[RssExample], config: TrainConfig, vocab: Vocabulary, rng: np.random.Generator
) -> list[RssExample]:
    return [
        ex.with_positions(
            padded_positions(ex.tokens, rng, config.pi_prob, config.pi_max_gap, vocab.ender_ids)
        )
        for ex in examples
    ]


def _batches(
    examples: Sequence[RssExample], batch_size: int, rng: np.random.Generator
) -> list[list[RssExample]]:
    order = rng.permutation(len(examples))
    return [
        [examples[int(k)] for k in order[i : i + batch_size]]
        for i in range(0, len(order), batch_size)
    ]


def _rss_epoch(
    model: BaseEncoder,
    examples: Sequence[RssExample],
    config: TrainConfig,
    vocab: Vocabulary,
    rng: np.random.Generator,
    optimizer: Optimizer,
    *,
    impl: Impl,
    padding: bool,
) -> tuple[float, int]:
    losses: list[float] = []
    steps = 0
    for batch in _batches(examples, config.batch_size, rng):
        if padding:
            batch = _with_pi(batch, config, vocab, rng)
        optimizer.zero_grad()
        for example in batch:
            loss: Tensor = rss_loss(span_prediction(model, example, impl), example)
            if config.mlm_prob > 0:
                masked = mask_tokens(
                    example.tokens,
                    rng,
                    config.mlm_prob,
                    model.config.vocab_size,
                    vocab.special_ids | vocab.ender_ids,
                )
                loss = loss + masked_token_loss(model, masked, example.pos, impl)
            (loss * (1.0 / len(batch))).backward()
            losses.append(loss.item())
        optimizer.step()
        steps += 1
    return float(np.mean(losses)) if losses else 0.0, steps


def _record(
    metrics: MetricsLog, stage: str, epoch: int, step: int, loss: float, acc: float, seed: int
) -> None:
    metrics.append(MetricRecord(stage, epoch, step, loss, acc, seed))
    logger.info("epoch_finished", stage=stage, epoch=epoch, step=step, loss=loss, acc=acc)


def train_teacher(
    teacher: DenseEncoder,
    data: RssData,
    config: TrainConfig,
    vocab: Vocabulary,
    rng: np.random.Generator,
    metrics: MetricsLog,
) -> None:
    """Pretrain the dense baseline with RSS on short chunks."""
    optimizer = build_optimizer(teacher.store, config)
    step = 0
    for epoch in range(1, config.teacher_epochs + 1):
        loss, steps = _rss_epoch(
            teacher, data.short_train, config, vocab, rng, optimizer, impl="dense", padding=False
        )
        step += steps
        acc = exact_match(teacher, data.short_eval)
        _record(metrics, "teacher", epoch, step, loss, acc, config.seed)
    logger.info("stage_finished", stage="teacher", epochs=config.teacher_epochs)


def distillation_loss_on(
    student: EncoderModel,
    teacher: DenseEncoder,
    examples: Sequence[RssExample],
    config: TrainConfig,
) -> tuple[float, float]:
    """(total, attention KL) distillation loss without updating anything."""
    if not examples:
        return 0.0, 0.0
    batch = build_distill_batch(teacher, examples, config.temperature)
    result = distill_step(student, teacher, batch, config.attention_loss_weight)
    return result.loss.item(), result.attention


def train_distill(
    student: EncoderModel,
    teacher: DenseEncoder,
    data: RssData,
    config: TrainConfig,
    vocab: Vocabulary,
    rng: np.random.Generator,
    metrics: MetricsLog,
) -> None:
    """Stage 2: distill the teacher's outputs and attention maps on short inputs with PI."""
    optimizer = build_optimizer(student.store, config, config.distill_learning_rate)
    step = 0
    for epoch in range(1, config.distill_epochs + 1):
        losses = []
        for batch in _batches(data.short_train, config.batch_size, rng):
            padded = _with_pi(batch, config, vocab, rng)
            optimizer.zero_grad()
            result = distill_step(
                student,
                teacher,
                build_distill_batch(teacher, padded, config.temperature),
                config.attention_loss_weight,
            )
            result.loss.backward()
            optimizer.step()
            losses.append(result.loss.item())
            step += 1
        acc = exact_match(student, data.short_eval, config.impl)
        _record(metrics, "distill", epoch, step, float(np.mean(losses)), acc, config.seed)
    logger.info("stage_finished", stage="distill", epochs=config.distill_epochs)


def train_long(
    student: EncoderModel,
    data: RssData,
    config: TrainConfig,
    vocab: Vocabulary,
    rng: np.random.Generator,
    metrics: MetricsLog,
) -> None:
    """Stage 3: RSS on long inputs with PI, no distillation."""
    optimizer = build_optimizer(student.store, config)
    step = 0
    for epoch in range(1, config.long_epochs + 1):
        loss, steps = _rss_epoch(
            student, data.long_train, config, vocab, rng, optimizer, impl=config.impl, padding=True
        )
        step += steps
        acc = exact_match(student, data.long_eval, config.impl)
        _record(metrics, "long", epoch, step, loss, acc, config.seed)
    logger.info("stage_finished", stage="long", epochs=config.long_epochs)


def run_schedule(
    config: TrainConfig,
    out_dir: Path | None = None,
    encoding: str = "utf-8",
) -> ScheduleResult:
    """
    Run all stages and return the trained models.

    Args:
        config: Schedule, optimizer and model settings.
        out_dir: When given, receives metrics.csv, teacher.npz, student.npz and
            the vocabulary both checkpoints index into.
        encoding: Encoding of `config.corpus_path`.
    """
    rng = np.random.default_rng(config.seed)
    split = prepare_corpus(config, rng, encoding)
    data = prepare_rss_data(split, config, rng)
    model_config = config.model.model_copy(update={"vocab_size": len(split.vocab)})
    metrics = MetricsLog(out_dir / "metrics.csv" if out_dir is not None else None)

    teacher = DenseEncoder(model_config, seed=config.seed)
    train_teacher(teacher, data, config, split.vocab, rng, metrics)

    student = EncoderModel(model_config, seed=config.seed + 1)
    init_student_from_teacher(student, teacher)
    reference = data.short_eval[: config.batch_size]
    init_loss, init_kl = distillation_loss_on(student, teacher, reference, config)
    init_acc = exact_match(student, data.short_eval, config.impl)
    _record(metrics, "init", 0, 0, init_loss, init_acc, config.seed)

    train_distill(student, teacher, data, config, split.vocab, rng, metrics)
    _, distilled_kl = distillation_loss_on(student, teacher, reference, config)
    attention_kl = {"init": init_kl, "distill": distilled_kl}
    logger.info("attention_kl", **attention_kl)
    train_long(student, data, config, split.vocab, rng, metrics)

    if out_dir is not None:
        save_checkpoint(teacher, out_dir / "teacher.npz")
        save_checkpoint(student, out_dir / "student.npz")
        split.vocab.save(out_dir / VOCAB_FILE)
    return ScheduleResult(teacher, student, split.vocab, data, metrics, attention_kl)
