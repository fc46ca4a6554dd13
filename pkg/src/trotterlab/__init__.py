"""Numerical laboratory for operator-norm convergence of Trotter product formulas."""

__version__ = "0.1.0"
