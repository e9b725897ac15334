"""Translate bit-level algorithm descriptions into template CNF encodings."""

__version__ = "0.1.0"
