"""Command-line interface using Typer."""
