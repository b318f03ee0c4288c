"""Spin structures on stable graphs, their moduli posets, and tropical
spin curves, verified at desk scale by exhaustive enumeration."""

__version__ = "0.1.0"
