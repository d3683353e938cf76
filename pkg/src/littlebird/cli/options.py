"""Helpers for options shared by every command."""

from pathlib import Path
from typing import Optional

from littlebird.config import Settings
from littlebird.exceptions import ConfigurationError


def resolve_seed(seed: Optional[int], settings: Settings) -> int:
    return settings.seed if seed is None else seed


def resolve_out(out: Optional[Path], settings: Settings) -> Path:
    return settings.out_dir if out is None else out


def parse_int_list(raw: Optional[str], option: str) -> Optional[list[int]]:
    """Comma-separated integers, e.g. "1024,2048"."""
    if raw is None:
        return None
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"{option} expects comma-separated integers, got {raw!r}") from exc
    if not values:
        raise ConfigurationError(f"{option} is empty")
    return values


def parse_name_list(raw: Optional[str]) -> Optional[list[str]]:
    if raw is None:
        return None
    return [part.strip() for part in raw.split(",") if part.strip()]
