"""Numerics for div(|y|^a grad u) = 0 and the fractional Laplacian."""
__version__ = "0.1.0"
