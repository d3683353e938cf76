"""CLI commands: bench, dump, train and check."""
