"""Exact-arithmetic toolkit for stratifications, normal forms, singularity
modules and star products over truncated current Lie algebras."""

__version__ = "0.1.0"
