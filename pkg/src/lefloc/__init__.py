"""Exact equivariant Lefschetz numbers, localized at isolated fixed points."""

__version__ = "0.1.0"
