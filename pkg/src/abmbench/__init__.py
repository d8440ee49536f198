"""Deterministic agent-based simulation workbench."""
__version__ = "0.1.0"
