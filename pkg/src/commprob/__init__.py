"""Exact commuting probabilities of finite rings and groups."""

__version__ = "0.1.0"
