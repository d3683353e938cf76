"""Tests for LittleBird."""
