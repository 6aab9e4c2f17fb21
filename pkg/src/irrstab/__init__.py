"""BIBO stability analysis for LTI systems with irrational transfer functions."""

__version__ = "0.1.0"
