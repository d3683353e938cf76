"""Parameter checkpoints.

Format (version 1): a numpy ``.npz`` archive with one little-endian float64
array per parameter, keyed by parameter name, plus three metadata entries:

    __format_version__   int64 scalar, currently 1
    __kind__             "littlebird" or "dense"
    __config__           ModelConfig as JSON

Values round-trip bit-exactly.
"""

from __future__ import annotations

import zipfile
from pathlib import Path

import numpy as np

from littlebird.config import ModelConfig
from littlebird.exceptions import CheckpointError, LittleBirdError
from littlebird.logging import get_logger
from littlebird.model.encoder import BaseEncoder, DenseEncoder, EncoderModel

logger = get_logger(__name__)

FORMAT_VERSION = 1
_META_KEYS = ("__format_version__", "__kind__", "__config__")
_KINDS: dict[str, type[BaseEncoder]] = {"littlebird": EncoderModel, "dense": DenseEncoder}


def save_checkpoint(model: BaseEncoder, path: Path) -> Path:
    """
    Write every parameter of `model` to `path`.

    Raises:
        CheckpointError: If the file cannot be written.
    """
    arrays = {name: value.astype("<f8") for name, value in model.store.arrays().items()}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            np.savez(
                handle,
                __format_version__=np.array(FORMAT_VERSION, dtype="<i8"),
                __kind__=np.array(model.kind),
                __config__=np.array(model.config.model_dump_json()),
                **arrays,
            )
    except OSError as exc:
        raise CheckpointError(f"Cannot write checkpoint: {exc}", path=str(path)) from exc
    logger.info("checkpoint_saved", path=str(path), parameters=len(arrays), kind=model.kind)
    return path


def load_checkpoint(path: Path) -> BaseEncoder:
    """
    Rebuild a model from a checkpoint.

    Raises:
        CheckpointError: On missing files, unknown versions or mismatched parameters.
    """
    try:
        with np.load(path, allow_pickle=False) as archive:
            contents = {key: archive[key] for key in archive.files}
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"Cannot read checkpoint: {exc}", path=str(path)) from exc

    missing = [key for key in _META_KEYS if key not in contents]
    if missing:
        raise CheckpointError("Checkpoint lacks metadata", path=str(path), missing=missing)
    version = int(contents["__format_version__"])
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"Unsupported checkpoint version {version}", path=str(path), version=version
        )
    kind = str(contents["__kind__"])
    if kind not in _KINDS:
        raise CheckpointError(f"Unknown model kind {kind!r}", path=str(path))

    try:
        config = ModelConfig.model_validate_json(str(contents["__config__"]))
        model = _KINDS[kind](config)
        model.store.load_arrays(
            {key: value for key, value in contents.items() if key not in _META_KEYS}
        )
    except (LittleBirdError, ValueError) as exc:
        raise CheckpointError(f"Checkpoint does not match its model: {exc}", path=str(path)) from exc
    logger.info("checkpoint_loaded", path=str(path), kind=kind)
    return model
