"""Exact geography calculator for symplectic 4-manifolds with prescribed fundamental group."""

__version__ = "0.1.0"
