"""Homology of configuration spaces of labelled squares in a rectangle."""

__version__ = "0.1.0"
