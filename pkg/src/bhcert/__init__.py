"""Certified lower bounds for real Bohnenblust-Hille constants."""

__version__ = "0.1.0"
