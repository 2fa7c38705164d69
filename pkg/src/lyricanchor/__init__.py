"""Anchored, memory-bounded lyrics-to-audio alignment over phoneme posteriorgrams."""

__version__ = "0.1.0"
