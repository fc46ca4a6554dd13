"""Finite-dimensional realisation of the shift-plus-potential evolution pair.

Functions on ``[0, 1)`` are sampled at ``x_i = i h`` with ``h = 1/m``.  The
shift by ``sigma = r h`` becomes the nilpotent matrix ``S_r`` and the
potential the diagonal ``diag(q(x_i))``.  Both sides of the reduction are
computed independently: the matrix side from dense products, the scalar side
from the propagator functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from trotterlab.errors import AlignmentError, DomainError
from trotterlab.evolution.potentials import ScalarPotential
from trotterlab.evolution.riemann import SimplexPoint, integral, propagator_exact, trotter_propagator

MAX_GRID = 4096


@dataclass(frozen=True)
class BridgeResult:
    matrix_error: float
    scalar_error: float
    m: int
    tau: float
    n: int

    @property
    def gap(self) -> float:
        return abs(self.matrix_error - self.scalar_error)


def shift_matrix(m: int, r: int) -> np.ndarray:
    """``(S_r v)_i = v_{i-r}`` for ``i >= r`` and zero otherwise."""
    return np.eye(m, k=-r)


def _steps(m: int, tau: float, n: int) -> int:
    if not 1 <= m <= MAX_GRID:
        raise DomainError(f"grid size must lie in [1, {MAX_GRID}]")
    if n < 1:
        raise DomainError("n must be positive")
    if not 0 < tau <= 1:
        raise DomainError("tau must lie in (0, 1]")
    # exact rational check so that 1/2 with m = 256 is accepted without float noise
    ratio = Fraction(tau).limit_denominator(1 << 40) * m / n
    if ratio.denominator != 1 or ratio < 1:
        raise AlignmentError(f"tau/n = {tau / n!r} is not a positive multiple of h = 1/{m}")
    return int(ratio)


def matrix_trotter_error(q: ScalarPotential, m: int, r: int, n: int) -> float:
    """Infinity-norm of ``(S_r E_r)^n - exp(-n r h (D + Q))`` on the grid."""
    h = 1.0 / m
    x = np.arange(m) * h
    step = shift_matrix(m, r) @ np.diag(np.exp(-r * h * np.asarray(q(x), dtype=float)))
    product = np.linalg.matrix_power(step, n)
    big_r = n * r
    exact = np.zeros((m, m))
    rows = np.arange(big_r, m)
    cols = rows - big_r
    exact[rows, cols] = np.exp(-np.asarray(integral(q, cols * h, rows * h), dtype=float))
    return float(np.linalg.norm(product - exact, ord=np.inf))


def scalar_trotter_error(q: ScalarPotential, m: int, r: int, n: int) -> float:
    """``max |U(t,s) - V_n(t,s)|`` over grid points with ``t - s = n r h``."""
    big_r = n * r
    worst = 0.0
    for j in range(big_r + 1, m + 1):
        p = SimplexPoint((j - big_r) / m, j / m)
        worst = max(worst, abs(propagator_exact(q, p) - trotter_propagator(q, p, n)))
    return worst


def discretized_bridge(q: ScalarPotential, m: int, tau: float, n: int) -> BridgeResult:
    """Matrix and scalar Trotter errors, each maximised over ``tau' = n r' h <= tau``."""
    r_max = _steps(m, tau, n)
    matrix_error = max(matrix_trotter_error(q, m, r, n) for r in range(1, r_max + 1))
    scalar_error = max(scalar_trotter_error(q, m, r, n) for r in range(1, r_max + 1))
    return BridgeResult(matrix_error, scalar_error, m, float(tau), n)
