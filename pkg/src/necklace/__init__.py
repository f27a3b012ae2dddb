"""Fractal necklaces: symbolic models, cut invariants and rigidity checks."""

__version__ = "0.1.0"
