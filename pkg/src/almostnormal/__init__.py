"""Exact finite-scale computations for group actions with almost normal finite stabilizers."""

__version__ = "0.1.0"
