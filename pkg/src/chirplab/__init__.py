"""Compressed radar sensing with multifrequency-chirp sensing matrices."""

__version__ = "0.1.0"
