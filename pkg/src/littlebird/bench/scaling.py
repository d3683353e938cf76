"""Latency, allocation and score-count sweep across lengths and attention variants.

Variants:
    dense        full BiALiBi self-attention (quadratic baseline)
    window_only  sliding window plus global block, pack size 0
    littlebird   pack & unpack plus sliding window

Each cell runs one encoder layer on random inputs. Latency is the median of
`repetitions` warm runs after one discarded run, timed with the monotonic
high-resolution clock.
"""

from __future__ import annotations

import statistics
import time
from collections.abc import Callable, Sequence

import numpy as np

from littlebird.attention import AttentionSpec, ScoreAudit, complexity_audit, dense_score_count
from littlebird.bench.records import OOM, BenchRecord
from littlebird.config import ModelConfig, ScalingConfig
from littlebird.config.experiment import Variant
from littlebird.exceptions import CheckFailedError, ConfigurationError, OutOfMemoryError
from littlebird.logging import get_logger
from littlebird.model import DenseLayer, LittleBirdLayer
from littlebird.numkit import ParamStore, Tensor, ops, track_allocations, use_precision
from littlebird.posbias import PositionIds

logger = get_logger(__name__)

VARIANTS: tuple[Variant, ...] = ("dense", "window_only", "littlebird")

Step = Callable[[ScoreAudit | None], Tensor]


def _layer_config(variant: Variant, config: ScalingConfig) -> ModelConfig:
    return ModelConfig(
        d_model=config.d_model,
        heads=config.heads,
        layers=1,
        block_size=config.block_size,
        pack_size=0 if variant == "window_only" else config.pack_size,
    )


def build_step(
    variant: Variant, length: int, config: ScalingConfig, rng: np.random.Generator
) -> tuple[Step, ModelConfig]:
    """A closure running one layer forward and returning a scalar loss."""
    model_config = _layer_config(variant, config)
    store = ParamStore()
    pos = PositionIds.arange(length)
    x = Tensor(rng.normal(size=(length, config.d_model)))

    if variant == "dense":
        dense = DenseLayer(store, "layer", model_config, rng)

        def dense_step(audit: ScoreAudit | None) -> Tensor:
            return ops.sum(dense(x, pos, audit=audit).hidden)

        return dense_step, model_config

    layer = LittleBirdLayer(store, "layer", model_config, rng)
    pack: Tensor | None = None
    if model_config.pack_size:
        pack = store.register(
            "pack.initial", Tensor(rng.normal(size=(model_config.pack_size, config.d_model)))
        )

    def sparse_step(audit: ScoreAudit | None) -> Tensor:
        out = layer(x, pack, pos, impl="blocked", audit=audit)
        loss = ops.sum(out.hidden)
        return loss if out.pack is None else loss + ops.sum(out.pack)

    return sparse_step, model_config


def expected_score_count(variant: Variant, length: int, model_config: ModelConfig) -> int:
    """Closed-form count of query-key scores one layer computes."""
    if variant == "dense":
        return dense_score_count(length)
    return complexity_audit(AttentionSpec.from_model_config(model_config), length)


def median_ms(run: Callable[[], object], repetitions: int) -> float:
    """Median wall time of `repetitions` runs after one discarded warm-up run."""
    run()
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        run()
        samples.append((time.perf_counter() - start) * 1000.0)
    return statistics.median(samples)


def measure_cell(
    variant: Variant, length: int, config: ScalingConfig, rng: np.random.Generator
) -> BenchRecord:
    """
    Measure one (variant, length) cell.

    Raises:
        CheckFailedError: If the audited score count differs from the closed form.
        OutOfMemoryError: If numpy cannot allocate the cell.
    """
    try:
        return _measure(variant, length, config, rng)
    except MemoryError as exc:
        raise OutOfMemoryError(
            "Benchmark cell ran out of memory", variant=variant, length=length
        ) from exc


def _measure(
    variant: Variant, length: int, config: ScalingConfig, rng: np.random.Generator
) -> BenchRecord:
    step, model_config = build_step(variant, length, config, rng)
    audit = ScoreAudit()
    with track_allocations() as tracker:
        loss = step(audit)
        if config.backward:
            loss.backward()
    expected = expected_score_count(variant, length, model_config)
    if audit.count != expected:
        raise CheckFailedError(
            "Audited score count differs from the closed form",
            variant=variant,
            length=length,
            audited=audit.count,
            expected=expected,
        )
    forward_ms = train_ms = None
    if config.timing:
        forward_ms = median_ms(lambda: step(None), config.repetitions)
        if config.backward:
            train_ms = median_ms(lambda: step(None).backward(), config.repetitions)

    return BenchRecord(
        variant=variant,
        length=length,
        block_size=model_config.block_size,
        pack_size=model_config.pack_size,
        heads=model_config.heads,
        d_model=model_config.d_model,
        repetitions=config.repetitions,
        forward_ms=forward_ms,
        train_ms=train_ms,
        peak_bytes=tracker.peak_bytes,
        score_count=audit.count,
    )


def bench_scaling(
    config: ScalingConfig,
    seed: int = 0,
    float_bits: int = 64,
    variants: Sequence[Variant] | None = None,
    lengths: Sequence[int] | None = None,
) -> list[BenchRecord]:
    """
    Run the sweep; a cell that runs out of memory becomes an `oom` row.

    Args:
        config: Sweep settings.
        seed: Seed for inputs and weights (one generator per cell).
        float_bits: 64, or 32 for faster timing runs.
        variants: Overrides `config.variants`.
        lengths: Overrides `config.lengths`.

    Returns:
        Records sorted by (variant, length).

    Raises:
        ConfigurationError: On an unknown variant or a length that is not a
            multiple of the block size.
    """
    chosen = list(variants if variants is not None else config.variants)
    sizes = sorted(set(lengths if lengths is not None else config.lengths))
    unknown = [v for v in chosen if v not in VARIANTS]
    if unknown:
        raise ConfigurationError(f"Unknown variants: {', '.join(unknown)}", known=list(VARIANTS))
    bad = [n for n in sizes if n < 1 or n % config.block_size]
    if bad:
        raise ConfigurationError(
            f"Lengths {bad} are not positive multiples of block_size={config.block_size}"
        )

    records: list[BenchRecord] = []
    with use_precision(float_bits):
        for variant in sorted(chosen):
            for length in sizes:
                rng = np.random.default_rng([seed, length])
                try:
                    record = measure_cell(variant, length, config, rng)
                except OutOfMemoryError:
                    logger.warning("bench_oom", variant=variant, length=length)
                    model_config = _layer_config(variant, config)
                    record = BenchRecord(
                        variant=variant,
                        length=length,
                        block_size=model_config.block_size,
                        pack_size=model_config.pack_size,
                        heads=model_config.heads,
                        d_model=model_config.d_model,
                        repetitions=config.repetitions,
                        status=OOM,
                    )
                logger.info(
                    "bench_cell",
                    variant=variant,
                    length=length,
                    score_count=record.score_count,
                    forward_ms=record.forward_ms,
                    status=record.status,
                )
                records.append(record)
    return records


def scaling_metadata(config: ScalingConfig, seed: int, float_bits: int) -> dict[str, object]:
    """`#` header entries describing how the sweep was measured."""
    return {
        "benchmark": "scaling",
        "seed": seed,
        "float_bits": float_bits,
        "layers": 1,
        "latency": f"median of {config.repetitions} warm runs, first run discarded, perf_counter",
        "memory": "peak live Tensor bytes (allocation tracker proxy, not process RSS)",
        "score_count": "query-key pairs per layer, head-independent",
    }
