"""Multiphase interface tracking with cubic splines and regular markers."""

__version__ = "0.1.0"
