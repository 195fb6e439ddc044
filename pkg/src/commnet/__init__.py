"""Ego/alter community network analysis."""

__version__ = "0.1.0"
