"""Equivariant Thom forms and relative Chern characters on Euclidean vector spaces."""

__version__ = "0.1.0"
