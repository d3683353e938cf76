"""Shared pytest fixtures for LittleBird tests."""

from pathlib import Path

import numpy as np
import pytest

from littlebird.attention import AttentionSpec
from littlebird.config import ModelConfig

# --- Random Fixtures ---


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded PCG64 generator."""
    return np.random.default_rng(1234)


# --- Model Fixtures ---


@pytest.fixture
def tiny_config() -> ModelConfig:
    """Two-layer LittleBird shape small enough for gradient checks."""
    return ModelConfig(
        vocab_size=24, d_model=8, heads=2, layers=2, block_size=4, pack_size=2, init_std=0.2
    )


@pytest.fixture
def small_config() -> ModelConfig:
    """Shape used by forward-only equivalence tests."""
    return ModelConfig(
        vocab_size=32, d_model=16, heads=2, layers=2, block_size=8, pack_size=4, init_std=0.1
    )


@pytest.fixture
def small_spec() -> AttentionSpec:
    """Attention geometry with b=4, s=2, H=2, d_h=3."""
    return AttentionSpec(heads=2, head_dim=3, block_size=4, pack_size=2)


# --- Temporary File Fixtures ---


@pytest.fixture
def temp_corpus_file(tmp_path: Path):
    """Factory fixture to create temporary corpus files."""

    def _create(lines: list[str], filename: str = "corpus.txt") -> Path:
        file = tmp_path / filename
        file.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return file

    return _create


@pytest.fixture
def temp_config_file(tmp_path: Path):
    """Factory fixture to create temporary TOML config files."""

    def _create(content: str, filename: str = "experiment.toml") -> Path:
        file = tmp_path / filename
        file.write_text(content, encoding="utf-8")
        return file

    return _create


# --- Marker Configuration ---


def pytest_configure(config: pytest.Config) -> None:
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Unit tests (fast, isolated)")
    config.addinivalue_line(
        "markers", "integration: Integration tests (component interactions)"
    )
    config.addinivalue_line("markers", "e2e: End-to-end tests (full pipeline)")
    config.addinivalue_line(
        "markers", "slow: Acceptance-scale runs (deselected by default; select with '-m slow')"
    )
