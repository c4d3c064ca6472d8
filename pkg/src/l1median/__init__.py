"""Exact L1 Fermat-Weber solvers on polygonal domains."""

__version__ = "0.1.0"
