"""Encoder models, layers and task heads."""

from littlebird.model.checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from littlebird.model.encoder import (
    PAD_TOKEN_ID,
    BaseEncoder,
    DenseEncoder,
    EncoderModel,
    EncoderOutput,
    init_student_from_teacher,
)
from littlebird.model.heads import ClassifierHead, SpanHead, SpanPrediction, TokenHead
from littlebird.model.layers import DenseLayer, Impl, LayerOutput, LittleBirdLayer

__all__ = [
    "FORMAT_VERSION",
    "PAD_TOKEN_ID",
    "BaseEncoder",
    "ClassifierHead",
    "DenseEncoder",
    "DenseLayer",
    "EncoderModel",
    "EncoderOutput",
    "Impl",
    "LayerOutput",
    "LittleBirdLayer",
    "SpanHead",
    "SpanPrediction",
    "TokenHead",
    "init_student_from_teacher",
    "load_checkpoint",
    "save_checkpoint",
]
