"""Exact computations with class semigroups of C-monoids."""

__version__ = "0.1.0"
