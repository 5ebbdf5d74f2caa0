"""Exact fixed-point traces: integer linear algebra, group rings, chain complexes and profunctors."""

__version__ = "0.1.0"
