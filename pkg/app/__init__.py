"""Exact verification of Hecke algebra computations."""

__version__ = "1.0.0"
