"""Explicit gliding-hump potentials with prescribed slow Riemann convergence.

Level ``k`` adds a train of tents of height ``h_k = min(1, 4 delta_k)``, one
per cell of width ``1/n_k``.  With dyadic, strictly increasing ``n_k`` every
level-``k`` tent vanishes at all nodes ``j/n_m`` with ``m <= k``, while a
coarser tent is linear on each half of a finer cell pair, so its left sums at
finer dyadic ``n`` are exact.  The result is validated after construction.
"""

from __future__ import annotations

import numpy as np

from trotterlab.errors import ConstructionError, DomainError
from trotterlab.evolution.potentials import ScalarPotential
from trotterlab.evolution.riemann import corner_error


def _tent(u):
    return 1.0 - np.abs(2.0 * u - 1.0)


def _tent_integral(u):
    return np.where(u <= 0.5, u * u, 0.5 - (1.0 - u) ** 2)


def _check_levels(levels) -> list[tuple[int, float]]:
    out = []
    for n, delta in levels:
        n = int(n)
        delta = float(delta)
        if n < 1 or n & (n - 1):
            raise DomainError(f"n_k = {n} is not a power of two")
        if not 0 < delta <= 1:
            raise DomainError(f"delta_k = {delta} outside (0, 1]")
        if out and n <= out[-1][0]:
            raise DomainError("n_k must be strictly increasing")
        if out and delta > out[-1][1]:
            raise DomainError("delta_k must be nonincreasing")
        out.append((n, delta))
    return out


def _build(levels: list[tuple[int, float]]):
    ns = np.array([n for n, _ in levels], dtype=float)
    hs = np.array([min(1.0, 4.0 * d) for _, d in levels])

    def q(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for n, h in zip(ns, hs):
            x = n * t
            out = out + h * _tent(x - np.floor(x))
        return out

    def big_q(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for n, h in zip(ns, hs):
            x = n * t
            whole = np.floor(x)
            out = out + h / n * (0.5 * whole + _tent_integral(x - whole))
        return out

    return q, big_q, hs


def slow_witness(levels) -> ScalarPotential:
    """Continuous piecewise-linear ``q`` with ``R_{n_k}(1, 0+) >= delta_k``.

    Raises :class:`ConstructionError` naming the first level whose check
    fails (range or Riemann error), which would indicate interference
    between levels.
    """
    levels = _check_levels(levels)
    q, big_q, hs = _build(levels)
    lipschitz = float(sum(2.0 * h * n for (n, _), h in zip(levels, hs)))
    if levels:
        # q is linear between consecutive points of the finest half-cell grid
        nodes = np.arange(2 * levels[-1][0] + 1) / (2 * levels[-1][0])
        for k in range(1, len(levels) + 1):
            partial, _, _ = _build(levels[:k])
            if float(np.max(partial(nodes))) > 1.0:
                raise ConstructionError(f"superposition exceeds 1 at level {k}", k)
        sup = float(np.max(q(nodes)))
    else:
        sup = 0.0
    out = ScalarPotential(
        q,
        "witness",
        sup,
        big_q,
        (1.0, lipschitz),
        {"levels": [[n, d] for n, d in levels]},
    )
    for k, (n, delta) in enumerate(levels, start=1):
        if corner_error(out, n) < delta:
            raise ConstructionError(f"Riemann error below delta at level {k} (n = {n})", k)
    return out
