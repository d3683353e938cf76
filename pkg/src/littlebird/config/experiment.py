"""Experiment configuration tree loaded from TOML files.

Every field has a default, so an empty file (or no file) is a valid
configuration. See docs/CONFIGURATION.md for the field reference.
"""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from littlebird.exceptions import ConfigurationError

Variant = Literal["dense", "window_only", "littlebird"]
Impl = Literal["dense", "blocked"]


class ModelConfig(BaseModel):
    """Shape of a LittleBird (or dense baseline) encoder."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    vocab_size: int = Field(default=512, ge=6, description="Token vocabulary size")
    d_model: int = Field(default=64, ge=1, description="Hidden width d")
    heads: int = Field(default=4, ge=1, description="Attention heads H")
    layers: int = Field(default=2, ge=0, description="Number of encoder layers N")
    block_size: int = Field(default=64, ge=1, description="Sliding-window block size b")
    pack_size: int = Field(default=64, ge=0, description="Pack length s")
    ffn_multiplier: int = Field(default=4, ge=1, description="FFN hidden width as a multiple of d")
    init_std: float = Field(default=0.02, gt=0.0, description="Std of normal init for linear weights")
    pack_init_std: float = Field(default=1.0, gt=0.0, description="Std of normal init for the initial pack P₀")
    num_classes: int = Field(default=0, ge=0, description="Classifier head outputs (0 = no classifier)")

    @model_validator(mode="after")
    def _heads_divide_width(self) -> ModelConfig:
        if self.d_model % self.heads != 0:
            raise ValueError(
                f"d_model={self.d_model} is not divisible by heads={self.heads}"
            )
        return self

    @property
    def head_dim(self) -> int:
        return self.d_model // self.heads


class TrainConfig(BaseModel):
    """Three-step training schedule on the toy RSS corpus."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0, description="Seed for corpus synthesis, init and PI")
    corpus_path: Path | None = Field(
        default=None, description="UTF-8 corpus, one document per line; synthetic when unset"
    )
    train_documents: int = Field(default=256, ge=1, description="Synthetic training documents")
    eval_documents: int = Field(default=64, ge=1, description="Synthetic held-out documents")
    short_len: int = Field(default=128, ge=8, description="Sequence length for teacher and distillation")
    long_len: int = Field(default=256, ge=8, description="Sequence length for stage-3 training")
    teacher_epochs: int = Field(default=16, ge=0, description="Dense teacher pretraining epochs")
    distill_epochs: int = Field(default=4, ge=0, description="Stage-2 epochs (distillation)")
    long_epochs: int = Field(default=4, ge=0, description="Stage-3 epochs (long inputs, no distillation)")
    batch_size: int = Field(default=8, ge=1, description="Examples per optimizer step")
    optimizer: Literal["adamw", "momentum"] = Field(default="adamw", description="Update rule")
    learning_rate: float = Field(default=2e-3, gt=0.0, description="Fixed learning rate, no warmup")
    distill_learning_rate: float = Field(
        default=5e-4, gt=0.0, description="Stage-2 (distillation) learning rate"
    )
    weight_decay: float = Field(default=0.01, ge=0.0, description="Decoupled weight decay")
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0, description="Momentum / AdamW beta1")
    beta2: float = Field(default=0.999, gt=0.0, lt=1.0, description="AdamW beta2")
    temperature: float = Field(default=2.0, gt=0.0, description="Soft-target distillation temperature T")
    attention_loss_weight: float = Field(default=1.0, ge=0.0, description="Weight λ of the attention KL term")
    pi_prob: float = Field(default=0.2, ge=0.0, le=1.0, description="Padding Insertion probability per boundary")
    pi_max_gap: int = Field(default=16, ge=0, description="Largest virtual padding run")
    min_span_len: int = Field(default=2, ge=2, description="Shortest recurring span")
    spans_per_512_tokens: int = Field(default=30, ge=1, description="Span budget, scaled by document length")
    planted_spans_per_128_tokens: int = Field(
        default=3, ge=1, description="Recurring spans planted in synthetic documents"
    )
    mlm_prob: float = Field(
        default=0.0, ge=0.0, lt=1.0, description="Masked-token denoising rate during teacher pretraining (0 = off)"
    )
    impl: Impl = Field(default="blocked", description="Student attention implementation")
    model: ModelConfig = Field(
        default_factory=lambda: ModelConfig(d_model=64, heads=4, layers=2, block_size=32, pack_size=32),
        description="Teacher and student shape (vocab_size is set from the corpus)",
    )

    @model_validator(mode="after")
    def _long_not_shorter(self) -> TrainConfig:
        if self.long_len < self.short_len:
            raise ValueError(
                f"long_len={self.long_len} must be >= short_len={self.short_len}"
            )
        return self

    def span_budget(self, length: int) -> int:
        """Clusters selected for a document of `length` tokens."""
        return max(1, round(length * self.spans_per_512_tokens / 512))

    def planted_spans(self, length: int) -> int:
        """Spans planted in a synthetic document of `length` tokens."""
        return max(1, round(length * self.planted_spans_per_128_tokens / 128))


class ScalingConfig(BaseModel):
    """Latency / allocation / score-count sweep."""

    model_config = ConfigDict(extra="forbid")

    lengths: list[int] = Field(default=[1024, 2048, 4096], description="Sequence lengths")
    variants: list[Variant] = Field(
        default=["dense", "window_only", "littlebird"], description="Attention variants"
    )
    repetitions: int = Field(default=5, ge=3, description="Warm repetitions per cell (one extra discarded)")
    d_model: int = Field(default=64, ge=1, description="Hidden width")
    heads: int = Field(default=4, ge=1, description="Attention heads")
    block_size: int = Field(default=64, ge=1, description="Block size b")
    pack_size: int = Field(default=64, ge=0, description="Pack size s")
    backward: bool = Field(default=True, description="Also time forward+backward")
    timing: bool = Field(default=True, description="Measure latency (disable for count-only sweeps)")


class ExtrapolationConfig(BaseModel):
    """Padding Insertion extrapolation experiment."""

    model_config = ConfigDict(extra="forbid")

    train_len: int = Field(default=128, ge=8, description="Training sequence length")
    eval_lengths: list[int] = Field(default=[128, 256, 512], description="Evaluation length buckets")
    seeds: list[int] = Field(default=[0, 1, 2], description="Paired-run seeds; the median is reported")
    epochs: int = Field(default=12, ge=1, description="Training epochs per classifier")
    train_examples: int = Field(default=768, ge=1, description="Training examples")
    eval_examples: int = Field(default=200, ge=1, description="Held-out examples per bucket")
    batch_size: int = Field(default=8, ge=1, description="Examples per step")
    learning_rate: float = Field(default=3e-3, gt=0.0, description="AdamW learning rate")
    pi_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="PI probability per boundary")
    pi_max_gap: int = Field(default=64, ge=0, description="Largest virtual padding run")
    checkpoint_dir: Path | None = Field(
        default=None, description="Directory with pretrained pi.npz / no_pi.npz (trained when unset)"
    )
    model: ModelConfig = Field(
        default_factory=lambda: ModelConfig(
            d_model=32, heads=2, layers=1, block_size=256, pack_size=0, num_classes=4
        ),
        description="Classifier shape",
    )


class PackAblationConfig(BaseModel):
    """Out-of-window retrieval task across pack sizes."""

    model_config = ConfigDict(extra="forbid")

    pack_sizes: list[int] = Field(default=[0, 32, 64], description="Pack sizes s to compare")
    seq_len: int = Field(default=128, ge=16, description="Sequence length")
    seed: int = Field(default=0, ge=0, description="Seed")
    key_types: int = Field(default=40, ge=1, description="Key types planted per sequence; the query asks for one")
    epochs: int = Field(default=10, ge=1, description="Training epochs per pack size")
    train_examples: int = Field(default=4096, ge=1, description="Training examples")
    eval_examples: int = Field(default=400, ge=1, description="Held-out examples")
    batch_size: int = Field(default=8, ge=1, description="Examples per step")
    learning_rate: float = Field(default=3e-3, gt=0.0, description="AdamW learning rate")
    model: ModelConfig = Field(
        default_factory=lambda: ModelConfig(
            d_model=32, heads=1, layers=1, block_size=8, pack_size=0, num_classes=4
        ),
        description="Classifier shape; pack_size is overridden per run",
    )


class HeatmapConfig(BaseModel):
    """Attention heatmap dumping."""

    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(default=8, ge=1, description="Held-out sequences averaged per map")
    seq_len: int = Field(default=128, ge=8, description="Sequence length of the batch")


class BenchConfig(BaseModel):
    """All benchmark and experiment runners."""

    model_config = ConfigDict(extra="forbid")

    scaling: ScalingConfig = Field(default_factory=ScalingConfig)
    extrapolation: ExtrapolationConfig = Field(default_factory=ExtrapolationConfig)
    pack_ablation: PackAblationConfig = Field(default_factory=PackAblationConfig)
    heatmaps: HeatmapConfig = Field(default_factory=HeatmapConfig)


class ExperimentConfig(BaseModel):
    """Root of the config tree."""

    model_config = ConfigDict(extra="forbid")

    train: TrainConfig = Field(default_factory=TrainConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)


def load_experiment_config(path: Path | None) -> ExperimentConfig:
    """
    Load an experiment config from a TOML file.

    Args:
        path: TOML file, or None for all defaults.

    Returns:
        Validated ExperimentConfig.

    Raises:
        ConfigurationError: If the file cannot be read or fails validation.
    """
    if path is None:
        return ExperimentConfig()
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config file: {exc}", path=str(path)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"Invalid TOML: {exc}", path=str(path)) from exc
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigurationError(
            f"Invalid config at {where}: {first['msg']}", path=str(path)
        ) from exc
