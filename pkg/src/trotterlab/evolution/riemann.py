"""Exact propagator, its Trotter approximant and the Riemann error functional.

For the shift-plus-multiplication pair the Trotter error in operator norm is
controlled, up to the factor ``exp(-||q||_inf)``, by

    R_n(t, s; q) = | int_s^t q - tau_n sum_{k<n} q(s + k tau_n) |,

so everything here reduces to scalar arithmetic over the simplex
``0 < s <= t <= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from trotterlab.errors import DomainError
from trotterlab.evolution.cantor import MAX_WINDOW_LEVEL, cantor_window
from trotterlab.evolution.potentials import ScalarPotential
from trotterlab.evolution.quadrature import SIMPSON_TOL, adaptive_simpson

MIN_GRID_DENSITY = 64
# bound on samples held in memory at once during grid sweeps
CHUNK_SAMPLES = 1 << 22


@dataclass(frozen=True)
class SimplexPoint:
    s: float
    t: float

    def __post_init__(self):
        if not (0 < self.s <= self.t <= 1):
            raise DomainError(f"need 0 < s <= t <= 1, got s={self.s}, t={self.t}")


def integral(q: ScalarPotential, s, t):
    """``int_s^t q``, exact when an antiderivative exists, else adaptive Simpson."""
    if q.antideriv is not None:
        return q.integral(s, t)
    s_arr, t_arr = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    out = np.array(
        [adaptive_simpson(lambda y: float(q(y)), a, b, tol=SIMPSON_TOL) for a, b in zip(s_arr.ravel(), t_arr.ravel())]
    ).reshape(s_arr.shape)
    return float(out) if out.ndim == 0 else out


def left_mean(q: ScalarPotential, s, t, n: int):
    """Mean of the left-endpoint samples ``q(s + k (t - s)/n)``, ``k = 0..n-1``."""
    if n < 1:
        raise DomainError("n must be a positive integer")
    if q.left_mean is not None:
        return q.left_mean(s, t, n)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)
    flat_s, flat_t = s.ravel(), t.ravel()
    k = np.arange(n) / n
    out = np.empty(flat_s.shape)
    step = max(1, CHUNK_SAMPLES // n)
    for lo in range(0, flat_s.size, step):
        a, b = flat_s[lo : lo + step, None], flat_t[lo : lo + step, None]
        out[lo : lo + step] = np.mean(q(a + k * (b - a)), axis=1)
    out = out.reshape(s.shape)
    return float(out) if out.ndim == 0 else out


def _left_sum(q: ScalarPotential, s, t, n: int):
    return (np.asarray(t, dtype=float) - np.asarray(s, dtype=float)) * left_mean(q, s, t, n)


def propagator_exact(q: ScalarPotential, p: SimplexPoint) -> float:
    return math.exp(-float(integral(q, p.s, p.t)))


def trotter_propagator(q: ScalarPotential, p: SimplexPoint, n: int) -> float:
    return math.exp(-float(_left_sum(q, p.s, p.t, n)))


def _raw_error(q: ScalarPotential, s, t, n: int):
    return np.abs(integral(q, s, t) - _left_sum(q, s, t, n))


def riemann_error(q: ScalarPotential, p: SimplexPoint, n: int) -> float:
    return float(_raw_error(q, p.s, p.t, n))


def corner_error(q: ScalarPotential, n: int) -> float:
    """Limit of ``R_n(1, s)`` as ``s -> 0+``; only meaningful for continuous ``q``."""
    if not q.continuous:
        raise DomainError("corner limit requires a continuous potential")
    return float(_raw_error(q, 0.0, 1.0, n))


def candidate_points(q: ScalarPotential, n: int) -> list[tuple[float, float]]:
    """Kind-specific analytic candidates that a uniform grid would miss."""
    if q.kind == "cantor":
        m = n.bit_length() - 1
        if n == 1 << m and 1 <= m <= MAX_WINDOW_LEVEL:
            eps, _ = cantor_window(m)
            return [(eps / 2.0, 1.0 - eps / 2.0)]
    return []


def _grid(grid_density: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(grid_density)
    return i + 1, j + 1


def riemann_sweep(q: ScalarPotential, n: int, grid_density: int = MIN_GRID_DENSITY):
    """``(s, t, R_n)`` arrays over the triangular grid ``s = i/d <= t = j/d``."""
    if grid_density < MIN_GRID_DENSITY:
        raise DomainError(f"grid_density must be at least {MIN_GRID_DENSITY}")
    i, j = _grid(grid_density)
    nodes = np.arange(grid_density + 1) / grid_density
    s, t = nodes[i], nodes[j]
    if q.antideriv is not None and q.kind != "constant":
        big_f = np.asarray(q.antideriv(nodes), dtype=float)
        exact = big_f[j] - big_f[i]
    else:
        exact = integral(q, s, t)
    return s, t, np.abs(exact - _left_sum(q, s, t, n))


def sup_riemann_error_at(q: ScalarPotential, n: int, grid_density: int = MIN_GRID_DENSITY):
    """Largest ``R_n`` found, with the ``(s, t)`` where it occurs."""
    s, t, r = riemann_sweep(q, n, grid_density)
    best = int(np.argmax(r))
    value, where = float(r[best]), (float(s[best]), float(t[best]))
    extra = list(candidate_points(q, n))
    if q.continuous:
        extra.append((0.0, 1.0))
    for a, b in extra:
        v = float(_raw_error(q, a, b, n))
        if v > value:
            value, where = v, (a, b)
    return value, where


def sup_riemann_error(q: ScalarPotential, n: int, grid_density: int = MIN_GRID_DENSITY) -> float:
    """Certified lower bound for ``sup_{(t,s)} R_n(t, s; q)``.

    Grid points plus kind-specific candidates; for continuous ``q`` the
    corner ``(0+, 1)`` enters as a limit.  Nested grids give nondecreasing
    values.
    """
    return sup_riemann_error_at(q, n, grid_density)[0]


def operator_error_sandwich(q: ScalarPotential, n: int, grid_density: int = MIN_GRID_DENSITY) -> tuple[float, float]:
    """``(exp(-||q||) R, R)`` bracketing the operator-norm Trotter error."""
    r = sup_riemann_error(q, n, grid_density)
    return math.exp(-q.sup_norm) * r, r
