"""Dump command: averaged attention heatmaps of a checkpoint."""

from pathlib import Path
from typing import Optional

import typer

from littlebird.bench import dump_heatmaps, heatmap_batch
from littlebird.cli.errors import reported_errors
from littlebird.cli.options import resolve_out, resolve_seed
from littlebird.config import Settings, load_experiment_config
from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import load_checkpoint
from littlebird.train import VOCAB_FILE, Vocabulary

logger = get_logger(__name__)

app = typer.Typer(help="Dump model internals.")


@app.command("heatmaps")
def heatmaps(
    checkpoint: Path = typer.Option(..., "--checkpoint", "-m", help="Model checkpoint (.npz)"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for the held-out batch", min=0),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    impl: str = typer.Option("blocked", "--impl", help="LittleBird attention path: blocked or dense"),
    corpus: Optional[Path] = typer.Option(
        None, "--corpus", help="UTF-8 corpus to draw the batch from (synthetic when omitted)"
    ),
    vocab_path: Optional[Path] = typer.Option(
        None, "--vocab", help=f"Vocabulary file (default: {VOCAB_FILE} next to the checkpoint)"
    ),
) -> None:
    """
    Write per-layer, per-head average attention maps as .npy and .pgm files.

    Examples:
        littlebird dump heatmaps --checkpoint runs/student.npz --out runs/heatmaps
        littlebird dump heatmaps --checkpoint runs/student.npz --corpus held_out.txt
    """
    settings = Settings()
    with reported_errors():
        if impl not in ("blocked", "dense"):
            raise ConfigurationError(f"--impl must be blocked or dense, got {impl!r}")
        config = load_experiment_config(config_path)
        model = load_checkpoint(checkpoint)
        vocab = None
        if corpus is not None:
            vocab_file = vocab_path or checkpoint.parent / VOCAB_FILE
            if vocab_path is not None or vocab_file.exists():
                vocab = Vocabulary.load(vocab_file)
            else:
                logger.warning("vocabulary_missing", expected=str(vocab_file))
        batch = heatmap_batch(
            config.bench.heatmaps,
            config.train,
            resolve_seed(seed, settings),
            model.config.vocab_size,
            corpus=corpus,
            vocab=vocab,
            encoding=settings.default_encoding,
        )
        dumps = dump_heatmaps(model, batch, resolve_out(out, settings), impl=impl)  # type: ignore[arg-type]

    typer.echo(f"Wrote {2 * len(dumps)} files for {len(dumps)} heads to {resolve_out(out, settings)}")
