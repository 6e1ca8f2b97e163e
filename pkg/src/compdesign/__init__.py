"""Composite design toolkit for the Al2219-B4C-Gr system."""

__version__ = "0.1.0"
