"""Integration tests - test component interactions."""
