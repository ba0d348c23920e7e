"""Heegaard Floer homology of Dehn surgeries on knots, computed from CFK^infinity."""

__version__ = "1.0.0"
