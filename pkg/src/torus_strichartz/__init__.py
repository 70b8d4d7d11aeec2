"""Numerical checks of Strichartz-type bounds for the Schrodinger flow on generic 2-tori."""

__version__ = "0.1.0"
