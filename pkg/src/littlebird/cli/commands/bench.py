"""Benchmark commands: scaling sweep, PI extrapolation and pack-size ablation."""

from dataclasses import asdict
from pathlib import Path
from typing import Optional

import typer

from littlebird.bench import (
    EXTRAPOLATION_FIELDS,
    PACK_ABLATION_FIELDS,
    bench_extrapolation,
    bench_pack_ablation,
    bench_scaling,
    scaling_metadata,
    write_bench_records,
    write_csv,
)
from littlebird.cli.errors import reported_errors
from littlebird.cli.options import parse_int_list, parse_name_list, resolve_out, resolve_seed
from littlebird.config import Settings, load_experiment_config

app = typer.Typer(help="Run benchmarks and experiments, writing CSV files.")


@app.command("scaling")
def scaling(
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for inputs and weights", min=0),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    lengths: Optional[str] = typer.Option(None, "--lengths", help="Comma-separated lengths, e.g. 1024,2048"),
    variants: Optional[str] = typer.Option(
        None, "--variants", help="Comma-separated subset of dense,window_only,littlebird"
    ),
    timing: bool = typer.Option(True, "--timing/--no-timing", help="Measure latency"),
) -> None:
    """
    Latency, peak allocation and score counts per attention variant and length.

    Examples:
        littlebird bench scaling --lengths 1024,2048,4096
        littlebird bench scaling --variants littlebird,dense --no-timing
    """
    settings = Settings()
    with reported_errors():
        config = load_experiment_config(config_path).bench.scaling
        if not timing:
            config = config.model_copy(update={"timing": False})
        run_seed = resolve_seed(seed, settings)
        records = bench_scaling(
            config,
            seed=run_seed,
            float_bits=settings.float_bits,
            variants=parse_name_list(variants),  # type: ignore[arg-type]
            lengths=parse_int_list(lengths, "--lengths"),
        )
        path = write_bench_records(
            resolve_out(out, settings) / "scaling.csv",
            records,
            scaling_metadata(config, run_seed, settings.float_bits),
        )

    for record in records:
        typer.echo(
            f"  {record.variant:<12} l={record.length:<6} scores={record.score_count} "
            f"peak_bytes={record.peak_bytes} status={record.status}"
        )
    typer.echo(f"Wrote {path}")


@app.command("extrapolation")
def extrapolation(
    seed: Optional[int] = typer.Option(
        None, "--seed", "-s", help="First seed; replaces the configured seeds with consecutive ones", min=0
    ),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    lengths: Optional[str] = typer.Option(None, "--lengths", help="Comma-separated evaluation lengths"),
    checkpoint_dir: Optional[Path] = typer.Option(
        None, "--checkpoint-dir", help="Directory holding pi.npz and no_pi.npz"
    ),
) -> None:
    """
    Accuracy of classifiers trained with and without Padding Insertion per eval length.

    Examples:
        littlebird bench extrapolation --lengths 128,256
    """
    settings = Settings()
    with reported_errors():
        config = load_experiment_config(config_path).bench.extrapolation
        update: dict[str, object] = {}
        if seed is not None:
            update["seeds"] = [seed + k for k in range(len(config.seeds))]
        eval_lengths = parse_int_list(lengths, "--lengths")
        if eval_lengths is not None:
            update["eval_lengths"] = eval_lengths
        if checkpoint_dir is not None:
            update["checkpoint_dir"] = checkpoint_dir
        config = config.model_copy(update=update)
        rows = bench_extrapolation(config)
        path = write_csv(
            resolve_out(out, settings) / "extrapolation.csv",
            EXTRAPOLATION_FIELDS,
            (asdict(row) for row in rows),
            {"benchmark": "extrapolation", "seeds": ",".join(map(str, config.seeds))},
        )

    for row in rows:
        typer.echo(f"  {row.model:<6} eval_len={row.eval_len:<6} accuracy={row.accuracy:.4f}")
    typer.echo(f"Wrote {path}")


@app.command("pack-ablation")
def pack_ablation(
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for data and init", min=0),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    pack_sizes: Optional[str] = typer.Option(None, "--pack-sizes", help="Comma-separated pack sizes"),
) -> None:
    """
    Out-of-window retrieval accuracy for each pack size.

    Examples:
        littlebird bench pack-ablation --pack-sizes 0,32,64
    """
    settings = Settings()
    with reported_errors():
        config = load_experiment_config(config_path).bench.pack_ablation
        update: dict[str, object] = {} if seed is None else {"seed": seed}
        sizes = parse_int_list(pack_sizes, "--pack-sizes")
        if sizes is not None:
            update["pack_sizes"] = sizes
        config = config.model_copy(update=update)
        rows = bench_pack_ablation(config)
        path = write_csv(
            resolve_out(out, settings) / "pack_ablation.csv",
            PACK_ABLATION_FIELDS,
            (asdict(row) for row in rows),
            {"benchmark": "pack_ablation", "seq_len": config.seq_len},
        )

    for row in rows:
        typer.echo(f"  s={row.pack_size:<4} accuracy={row.accuracy:.4f} chance={row.chance:.4f}")
    typer.echo(f"Wrote {path}")
