"""Distillation from a dense teacher into a LittleBird student.

The loss combines soft-target KL on the span head's start and end
distributions with a per-layer KL between the teacher's and the student's
self-attention distributions. Hidden states are not distilled.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from littlebird.attention import build_sparsity_mask
from littlebird.exceptions import ConfigurationError, DimensionError
from littlebird.model import DenseEncoder, EncoderModel
from littlebird.numkit import Tensor, ops
from littlebird.numkit.tensor import Array
from littlebird.train.rss import RssExample

BoolArray = npt.NDArray[np.bool_]


@dataclass
class TeacherTargets:
    """Frozen teacher outputs for one example."""

    start_probs: Array
    end_probs: Array
    attentions: list[Array]


@dataclass
class DistillBatch:
    """Short-input examples with the teacher's soft targets and attention maps."""

    examples: list[RssExample]
    targets: list[TeacherTargets]
    temperature: float

    def __len__(self) -> int:
        return len(self.examples)


@dataclass
class DistillLoss:
    """Total loss and its two parts (as floats, for logging)."""

    loss: Tensor
    soft_target: float
    attention: float


def build_distill_batch(
    teacher: DenseEncoder, examples: Sequence[RssExample], temperature: float
) -> DistillBatch:
    """Run the teacher once per example and keep its outputs as constants."""
    targets: list[TeacherTargets] = []
    for example in examples:
        out = teacher.encode(example.tokens, example.pos, collect=True)
        pred = teacher.span_head(
            out.hidden.detach(), example.questions, example.answer_mask, starts=example.starts
        )
        targets.append(
            TeacherTargets(
                start_probs=_tempered(pred.start_logits.data, pred.start_mask, temperature),
                end_probs=_tempered(pred.end_logits.data, pred.end_mask, temperature),
                attentions=[layer.attention.probs.data.copy() for layer in out.layers],
            )
        )
    return DistillBatch(list(examples), targets, temperature)


def _tempered(logits: Array, mask: BoolArray, temperature: float) -> Array:
    return ops.masked_softmax(Tensor(logits / temperature), mask).data


def attention_kl(
    student_probs: Tensor, teacher_probs: Array, allowed: BoolArray
) -> Tensor:
    """
    Mean over heads and queries of KL(teacher ‖ student) on the student's support.

    Args:
        student_probs: (H, l, l) student probabilities over the X keys (pack
            columns already removed); renormalized here over `allowed`.
        teacher_probs: (H, l, l) full-attention probabilities, renormalized
            here over `allowed`.
        allowed: (l, l) keys each query may attend in the student.
    """
    if student_probs.shape != teacher_probs.shape or allowed.shape != teacher_probs.shape[1:]:
        raise DimensionError(
            f"Attention shapes differ: student {student_probs.shape}, teacher "
            f"{teacher_probs.shape}, mask {allowed.shape}"
        )
    heads, rows = teacher_probs.shape[0], teacher_probs.shape[1]
    kept = np.where(allowed, teacher_probs, 0.0)
    totals = kept.sum(axis=-1, keepdims=True)
    target = np.divide(kept, totals, out=np.zeros_like(kept), where=totals > 0)

    student = student_probs * allowed
    student = student / ops.sum(student, axis=-1, keepdims=True)
    log_student = ops.log(student + (~allowed).astype(teacher_probs.dtype))
    entropy = float(np.sum(target * np.log(np.where(target > 0, target, 1.0))))
    cross = ops.sum(log_student * target)
    return (entropy - cross) * (1.0 / (heads * rows))


def distill_step(
    student: EncoderModel,
    teacher: DenseEncoder,
    batch: DistillBatch,
    attention_weight: float = 1.0,
) -> DistillLoss:
    """
    Distillation loss of `student` on `batch`, averaged over examples.

    loss = T²·[KL(t_start ‖ s_start) + KL(t_end ‖ s_end)] + λ·mean-layer attention KL

    The student runs the dense reference path so its attention probabilities
    are differentiable in the (H, l, s + l) layout; the pack columns are
    dropped before comparing with the teacher.

    Raises:
        ConfigurationError: If teacher and student differ in layer count.
    """
    if len(student.layers) != len(teacher.layers):
        raise ConfigurationError(
            "Teacher and student layer counts differ",
            student=len(student.layers),
            teacher=len(teacher.layers),
        )
    if not len(batch):
        raise ConfigurationError("Empty distillation batch")
    temperature = batch.temperature
    s = student.spec.pack_size
    total: Tensor | None = None
    soft_sum = attention_sum = 0.0
    for example, target in zip(batch.examples, batch.targets, strict=True):
        length = len(example)
        out = student.encode(example.tokens, example.pos, impl="dense", collect=True)
        pred = student.span_head(
            out.hidden, example.questions, example.answer_mask, starts=example.starts
        )
        soft = ops.scale(
            ops.soft_target_kl(pred.start_logits, target.start_probs, pred.start_mask, temperature)
            + ops.soft_target_kl(pred.end_logits, target.end_probs, pred.end_mask, temperature),
            temperature**2,
        )
        allowed = build_sparsity_mask(student.spec, length).allowed & example.pos.real[None, :]
        layer_kls = []
        for layer_out, teacher_attn in zip(out.layers, target.attentions, strict=True):
            probs = ops.narrow(layer_out.attention.probs, 1, 0, length)
            probs = ops.narrow(probs, 2, s, s + length)
            layer_kls.append(attention_kl(probs, teacher_attn, allowed))
        attn = ops.mean(ops.concat([k.reshape(1) for k in layer_kls])) if layer_kls else None

        loss = soft if attn is None else soft + ops.scale(attn, attention_weight)
        total = loss if total is None else total + loss
        soft_sum += soft.item()
        attention_sum += 0.0 if attn is None else attn.item()

    assert total is not None
    count = len(batch)
    return DistillLoss(ops.scale(total, 1.0 / count), soft_sum / count, attention_sum / count)
