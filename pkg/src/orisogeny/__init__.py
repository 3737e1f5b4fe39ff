"""Oriented supersingular curves: division, primitivisation, class group actions."""

__version__ = "0.1.0"
