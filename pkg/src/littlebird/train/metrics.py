"""Append-only CSV metric log."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from littlebird.exceptions import ArtifactIOError


@dataclass(frozen=True)
class MetricRecord:
    """One row of the metric log."""

    stage: str
    epoch: int
    step: int
    loss: float
    acc: float
    seed: int


METRIC_FIELDS = tuple(f.name for f in fields(MetricRecord))


class MetricsLog:
    """
    Collects MetricRecords and, when given a path, appends them to a CSV file.

    The header `stage,epoch,step,loss,acc,seed` is written only when the
    file is new or empty.
    """

    def __init__(self, path: Path | None = None) -> None:
        self.path = path
        self.records: list[MetricRecord] = []

    def append(self, record: MetricRecord) -> None:
        self.records.append(record)
        if self.path is None:
            return
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            with self.path.open("a", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=METRIC_FIELDS, lineterminator="\n")
                if fresh:
                    writer.writeheader()
                row = asdict(record)
                row["loss"] = f"{record.loss:.6f}"
                row["acc"] = f"{record.acc:.4f}"
                writer.writerow(row)
        except OSError as exc:
            raise ArtifactIOError(f"Cannot write metrics: {exc}", path=str(self.path)) from exc

    def for_stage(self, stage: str) -> list[MetricRecord]:
        return [r for r in self.records if r.stage == stage]
