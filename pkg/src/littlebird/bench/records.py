"""Benchmark records and CSV output with `#` metadata rows."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from littlebird.exceptions import ArtifactIOError
from littlebird.logging import get_logger

logger = get_logger(__name__)

OK = "ok"
OOM = "oom"


@dataclass(frozen=True)
class BenchRecord:
    """
    One (variant, length) cell of the scaling sweep.

    Latencies are medians over warm repetitions in milliseconds; peak_bytes
    is the peak of live Tensor bytes seen by the allocation tracker. An `oom`
    row leaves the measured columns empty.
    """

    variant: str
    length: int
    block_size: int
    pack_size: int
    heads: int
    d_model: int
    repetitions: int
    forward_ms: float | None = None
    train_ms: float | None = None
    peak_bytes: int | None = None
    score_count: int | None = None
    status: str = OK

    @property
    def sort_key(self) -> tuple[str, int]:
        return (self.variant, self.length)


BENCH_FIELDS = tuple(f.name for f in fields(BenchRecord))


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Mapping[str, object]],
    metadata: Mapping[str, object] | None = None,
) -> Path:
    """
    Write `#`-prefixed metadata lines, a header row and the data rows.

    Floats are written with four decimals and None as an empty cell.

    Raises:
        ArtifactIOError: If the file cannot be written.
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            for key, value in (metadata or {}).items():
                handle.write(f"# {key}={value}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(row.get(name)) for name in header])
    except OSError as exc:
        raise ArtifactIOError(f"Cannot write CSV: {exc}", path=str(path)) from exc
    logger.info("csv_written", path=str(path))
    return path


def read_csv(path: Path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Metadata entries and data rows of a file written by `write_csv`."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ArtifactIOError(f"Cannot read CSV: {exc}", path=str(path)) from exc
    metadata: dict[str, str] = {}
    body: list[str] = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            metadata[key] = value
        else:
            body.append(line)
    return metadata, list(csv.DictReader(body))


def write_bench_records(
    path: Path, records: Iterable[BenchRecord], metadata: Mapping[str, object] | None = None
) -> Path:
    """Write BenchRecords sorted by (variant, length)."""
    ordered = sorted(records, key=lambda r: r.sort_key)
    return write_csv(path, BENCH_FIELDS, (asdict(r) for r in ordered), metadata)
