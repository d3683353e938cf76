"""Corpora, objectives, distillation and the three-step training schedule."""

from littlebird.train.corpus import (
    SyntheticCorpusSpec,
    chunk_documents,
    encode_documents,
    read_corpus,
    synthesize_corpus,
    synthesize_document,
)
from littlebird.train.distill import (
    DistillBatch,
    DistillLoss,
    TeacherTargets,
    attention_kl,
    build_distill_batch,
    distill_step,
)
from littlebird.train.metrics import METRIC_FIELDS, MetricRecord, MetricsLog
from littlebird.train.objectives import (
    MaskedTokens,
    classification_loss,
    exact_match,
    mask_tokens,
    masked_token_loss,
    rss_loss,
    span_prediction,
)
from littlebird.train.optim import AdamW, MomentumSGD, Optimizer, build_optimizer
from littlebird.train.padding import (
    insert_physical_padding,
    padded_positions,
    pi_equivalence_check,
)
from littlebird.train.rss import RssExample, make_rss_example
from littlebird.train.schedule import (
    CorpusSplit,
    RssData,
    ScheduleResult,
    build_rss_examples,
    prepare_corpus,
    prepare_rss_data,
    run_schedule,
)
from littlebird.train.spans import SpanCluster, find_recurring_spans
from littlebird.train.tasks import (
    TaskExample,
    evaluate_classifier,
    make_nearest_key_examples,
    make_retrieval_examples,
    task_vocabulary,
    train_classifier,
)
from littlebird.train.vocab import VOCAB_FILE, Vocabulary

__all__ = [
    "METRIC_FIELDS",
    "VOCAB_FILE",
    "AdamW",
    "CorpusSplit",
    "DistillBatch",
    "DistillLoss",
    "MaskedTokens",
    "MetricRecord",
    "MetricsLog",
    "MomentumSGD",
    "Optimizer",
    "RssData",
    "RssExample",
    "ScheduleResult",
    "SpanCluster",
    "SyntheticCorpusSpec",
    "TaskExample",
    "TeacherTargets",
    "Vocabulary",
    "attention_kl",
    "build_distill_batch",
    "build_optimizer",
    "build_rss_examples",
    "chunk_documents",
    "classification_loss",
    "distill_step",
    "encode_documents",
    "evaluate_classifier",
    "exact_match",
    "find_recurring_spans",
    "insert_physical_padding",
    "make_nearest_key_examples",
    "make_retrieval_examples",
    "make_rss_example",
    "mask_tokens",
    "masked_token_loss",
    "padded_positions",
    "pi_equivalence_check",
    "prepare_corpus",
    "prepare_rss_data",
    "read_corpus",
    "rss_loss",
    "run_schedule",
    "span_prediction",
    "synthesize_corpus",
    "synthesize_document",
    "task_vocabulary",
    "train_classifier",
]
