"""Finite-dimensional laboratory for Fuglede-type intertwining relations."""

__version__ = "0.1.0"
