"""Pseudospectral toolkit for defocusing NLS with non-vanishing background."""
__version__ = "0.1.0"
