"""End-to-end tests - test full CLI commands."""
