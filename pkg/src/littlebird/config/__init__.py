"""Configuration management: runtime settings and experiment config trees."""

from littlebird.config.experiment import (
    BenchConfig,
    ExperimentConfig,
    ExtrapolationConfig,
    HeatmapConfig,
    ModelConfig,
    PackAblationConfig,
    ScalingConfig,
    TrainConfig,
    load_experiment_config,
)
from littlebird.config.settings import Settings

__all__ = [
    "BenchConfig",
    "ExperimentConfig",
    "ExtrapolationConfig",
    "HeatmapConfig",
    "ModelConfig",
    "PackAblationConfig",
    "ScalingConfig",
    "Settings",
    "TrainConfig",
    "load_experiment_config",
]
