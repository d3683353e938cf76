"""Train command: dense teacher, distillation and long-input training."""

from pathlib import Path
from typing import Optional

import typer

from littlebird.cli.errors import reported_errors
from littlebird.cli.options import resolve_out
from littlebird.config import Settings, load_experiment_config
from littlebird.train import run_schedule

app = typer.Typer(help="Run the three-step training schedule.")


@app.callback(invoke_without_command=True)
def train(
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for corpus, init and PI", min=0),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    corpus: Optional[Path] = typer.Option(
        None, "--corpus", help="UTF-8 corpus, one document per line (synthetic when omitted)"
    ),
) -> None:
    """
    Train a LittleBird student and write metrics.csv, teacher.npz and student.npz.

    Examples:
        littlebird train --out runs/rss
        littlebird train --config experiment.toml --seed 3
    """
    settings = Settings()
    out_dir = resolve_out(out, settings)
    with reported_errors():
        config = load_experiment_config(config_path).train
        update: dict[str, object] = {}
        if seed is not None:
            update["seed"] = seed
        elif config_path is None:
            update["seed"] = settings.seed
        if corpus is not None:
            update["corpus_path"] = corpus
        config = config.model_copy(update=update)
        result = run_schedule(config, out_dir, encoding=settings.default_encoding)

    for record in result.metrics.records:
        typer.echo(
            f"  {record.stage:<8} epoch={record.epoch:<3} loss={record.loss:.4f} acc={record.acc:.4f}"
        )
    typer.echo(f"Final exact match: {result.final_accuracy:.4f}")
    typer.echo(f"Wrote {out_dir}")
