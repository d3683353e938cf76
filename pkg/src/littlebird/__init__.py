"""LittleBird - long-sequence attention with BiALiBi, pack & unpack and sliding windows."""

__version__ = "0.1.0"
