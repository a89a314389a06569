"""Concolic testing with pluggable guidance oracles."""

__version__ = "0.1.0"
