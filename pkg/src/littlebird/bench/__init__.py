"""Benchmarks and experiment runners."""

from littlebird.bench.extrapolation import (
    EXTRAPOLATION_FIELDS,
    ExtrapolationRow,
    bench_extrapolation,
    load_pair,
    train_pair,
)
from littlebird.bench.heatmaps import (
    HeatmapDump,
    average_attention,
    dump_heatmaps,
    heatmap_batch,
    render_pgm,
)
from littlebird.bench.pack_ablation import (
    PACK_ABLATION_FIELDS,
    PackAblationRow,
    bench_pack_ablation,
)
from littlebird.bench.records import (
    BENCH_FIELDS,
    OK,
    OOM,
    BenchRecord,
    read_csv,
    write_bench_records,
    write_csv,
)
from littlebird.bench.scaling import (
    VARIANTS,
    bench_scaling,
    expected_score_count,
    measure_cell,
    median_ms,
    scaling_metadata,
)

__all__ = [
    "BENCH_FIELDS",
    "EXTRAPOLATION_FIELDS",
    "OK",
    "OOM",
    "PACK_ABLATION_FIELDS",
    "VARIANTS",
    "BenchRecord",
    "ExtrapolationRow",
    "HeatmapDump",
    "PackAblationRow",
    "average_attention",
    "bench_extrapolation",
    "bench_pack_ablation",
    "bench_scaling",
    "dump_heatmaps",
    "expected_score_count",
    "heatmap_batch",
    "load_pair",
    "measure_cell",
    "median_ms",
    "read_csv",
    "render_pgm",
    "scaling_metadata",
    "train_pair",
    "write_bench_records",
    "write_csv",
]
