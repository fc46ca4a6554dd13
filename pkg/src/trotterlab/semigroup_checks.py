"""Executable versions of the preliminary semigroup inequalities.

Each check evaluates both sides of one inequality for a concrete matrix
generator and returns a :class:`BoundCheckReport`.  The left-hand sides are
computed directly with dense linear algebra; nothing is simplified through
the spectrum, so a report is a genuine test of the inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.optimize

from trotterlab.errors import DomainError, UnsupportedInputError
from trotterlab.operator_core import (
    DEFAULT_T_GRID,
    GeneratorSpec,
    expm,
    frac_power,
    inverse,
    op_norm,
    resolvent,
)

SATISFY_TOL = 1e-9
IDENTITY_TOL = 1e-10


class LemmaId(str, Enum):
    TAYLOR_REMAINDER = "taylor_remainder"
    RESOLVENT_EXPANSION = "resolvent_expansion"
    EULER_APPROX = "euler_approx"
    FRAC_RESOLVENT = "frac_resolvent"
    L1_LEFT = "l1_left"
    L1_RIGHT = "l1_right"
    L2 = "l2"
    L3 = "l3"
    ENVELOPE = "envelope"


@dataclass(frozen=True)
class BoundCheckReport:
    lemma_id: LemmaId
    parameters: dict = field(default_factory=dict)
    lhs: float = 0.0
    rhs: float = 0.0

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + SATISFY_TOL * max(1.0, self.rhs)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def as_row(self) -> dict:
        row = {"lemma_id": self.lemma_id.value}
        row.update(self.parameters)
        row.update(lhs=self.lhs, rhs=self.rhs, satisfied=self.satisfied)
        return row


def _taylor_partial(a: np.ndarray, t: float, n: int) -> np.ndarray:
    term = np.eye(a.shape[0], dtype=a.dtype)
    total = term.copy()
    for k in range(1, n + 1):
        term = term @ (-t * a) / k
        total = total + term
    return total


def _neg_power(a: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(inverse(a), k)


def taylor_remainder_check(a: GeneratorSpec, n: int, t: float) -> BoundCheckReport:
    """``||(exp(-tA) - sum_{k<=n} (-tA)^k/k!) A^{-n-1}|| <= C_A t^{n+1}/(n+1)!``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if t < 0:
        raise DomainError("t must be nonnegative")
    m = a.matrix
    rem = expm(a, t) - _taylor_partial(m, t, n)
    lhs = op_norm(rem @ _neg_power(m, n + 1), 2)
    rhs = a.bound_constant_CA * t ** (n + 1) / math.factorial(n + 1)
    return BoundCheckReport(LemmaId.TAYLOR_REMAINDER, {"dim": a.dim, "n": n, "t": t}, lhs, rhs)


def resolvent_expansion_check(a: GeneratorSpec, n: int) -> BoundCheckReport:
    """Residual of the finite expansion of ``(I + A)^{-1} A^{-n-1}``.

    The identity is exact, so the right-hand side is a round-off allowance
    of ``1e-10`` relative to the size of the terms involved.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    m = a.matrix
    r1 = resolvent(a, 1.0)
    inv_pow = _neg_power(m, n + 1)
    series = sum(np.linalg.matrix_power(-m, k) for k in range(n + 1))
    first = r1 @ inv_pow
    second = series @ inv_pow
    residual = first - second - (-1) ** (n + 1) * r1
    scale = max(1.0, op_norm(first, 2), op_norm(second, 2))
    return BoundCheckReport(
        LemmaId.RESOLVENT_EXPANSION,
        {"dim": a.dim, "n": n},
        op_norm(residual, 2),
        IDENTITY_TOL * scale,
    )


def euler_approx_check(a: GeneratorSpec, t: float) -> BoundCheckReport:
    """``t^{-2} ||((I + tA)^{-1} - exp(-tA)) A^{-2}|| <= 3 C_A / 2``."""
    if t <= 0:
        raise DomainError("t must be positive")
    m = a.matrix
    implicit = resolvent(m, 1.0 / t) / t
    diff = (implicit - expm(a, t)) @ _neg_power(m, 2)
    return BoundCheckReport(
        LemmaId.EULER_APPROX,
        {"dim": a.dim, "t": t},
        op_norm(diff, 2) / t**2,
        1.5 * a.bound_constant_CA,
    )


def frac_resolvent_constant(c_a: float, alpha: float) -> float:
    """``C_{A,alpha} = C_A (1 + C_A) / (alpha (1 - alpha) |Gamma(-alpha)|)``."""
    return c_a * (1.0 + c_a) / (alpha * (1.0 - alpha) * abs(math.gamma(-alpha)))


def frac_resolvent_check(a: GeneratorSpec, alpha: float, mu: float) -> BoundCheckReport:
    if mu <= 0:
        raise DomainError("mu must be positive")
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    m = a.matrix
    c_a = a.bound_constant_CA
    r = resolvent(a, mu)
    if alpha == 0:
        lhs = op_norm(r, 2)
        rhs = c_a / mu
    elif alpha == 1:
        lhs = op_norm(m @ r, 2)
        rhs = c_a
    else:
        lhs = op_norm(frac_power(m, alpha) @ r, 2)
        rhs = frac_resolvent_constant(c_a, alpha) / mu ** (1.0 - alpha)
    return BoundCheckReport(LemmaId.FRAC_RESOLVENT, {"dim": a.dim, "alpha": alpha, "mu": mu}, lhs, rhs)


def _moment_at(a_pow: np.ndarray, a: np.ndarray, alpha: float, t: float) -> float:
    return t**alpha * op_norm(a_pow @ expm(a, t), 2)


def holomorphic_moment(a: GeneratorSpec, alpha: float, t_grid=None, refine: bool = True) -> float:
    """Estimate ``sup_t t^alpha ||A^alpha exp(-tA)||``.

    The grid maximum is polished by a bounded scalar search between the
    neighbours of the best grid point, so the value is always attained at
    some ``t`` and is a lower bound of the supremum.
    """
    grid = np.asarray(DEFAULT_T_GRID if t_grid is None else t_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("t_grid is empty")
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    grid = np.sort(grid)
    m = a.matrix
    a_pow = frac_power(m, alpha) if alpha < 2 else np.linalg.matrix_power(m, int(alpha)) @ frac_power(
        m, alpha - int(alpha)
    )
    values = [_moment_at(a_pow, m, alpha, t) for t in grid]
    best = int(np.argmax(values))
    result = values[best]
    if refine and grid.size > 1:
        lo = math.log(grid[max(best - 1, 0)])
        hi = math.log(grid[min(best + 1, grid.size - 1)])
        opt = scipy.optimize.minimize_scalar(
            lambda s: -_moment_at(a_pow, m, alpha, math.exp(s)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-8},
        )
        result = max(result, -float(opt.fun))
    return float(result)


def sector_check(a: GeneratorSpec) -> float:
    """Semi-angle of the smallest sector around the positive axis holding the spectrum."""
    if not a.is_normal:
        raise UnsupportedInputError("sector analysis is implemented for normal matrices only")
    lam = np.linalg.eigvals(a.matrix)
    lam = lam[np.abs(lam) > 1e-14 * max(1.0, float(np.abs(lam).max()))]
    if lam.size == 0:
        return math.pi / 2
    worst = float(np.abs(np.angle(lam)).max())
    return min(max(math.pi / 2 - worst, 0.0), math.pi / 2)


def spd_battery(dims=(1, 2, 8, 16), rng: np.random.Generator | None = None) -> list[GeneratorSpec]:
    """Standard SPD generators: a 1-D Laplacian and a random SPD matrix per dimension."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for d in dims:
        out.append(GeneratorSpec.from_matrix(laplacian(d), bound_constant=1.0))
        out.append(GeneratorSpec.from_matrix(random_spd(d, rng), bound_constant=1.0))
    return out


def laplacian(d: int) -> np.ndarray:
    """Dirichlet second-difference matrix ``tridiag(-1, 2, -1)``."""
    return 2.0 * np.eye(d) - np.eye(d, k=1) - np.eye(d, k=-1)


def random_spd(d: int, rng: np.random.Generator, lo: float = 0.1, hi: float = 10.0) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    lam = np.exp(rng.uniform(math.log(lo), math.log(hi), size=d))
    m = (q * lam) @ q.T
    return 0.5 * (m + m.T)


def section1_battery(
    generators,
    ns_taylor=(0, 1, 2),
    ns_resolvent=(0, 1, 2, 3),
    t_grid=(0.01, 0.1, 1.0, 5.0, 10.0),
    alphas=(0.25, 0.5, 0.75),
    mu_grid=(0.01, 0.1, 1.0, 10.0, 100.0),
) -> list[BoundCheckReport]:
    reports = []
    for a in generators:
        for n in ns_taylor:
            for t in t_grid:
                reports.append(taylor_remainder_check(a, n, t))
        for n in ns_resolvent:
            reports.append(resolvent_expansion_check(a, n))
        for t in t_grid:
            reports.append(euler_approx_check(a, t))
        for alpha in (0.0, *alphas, 1.0):
            for mu in mu_grid:
                reports.append(frac_resolvent_check(a, alpha, mu))
    return reports
