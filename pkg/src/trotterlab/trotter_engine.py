"""Trotter product formulas for matrix generator pairs.

Products are compared against ``exp(-t(A + B))`` to produce error curves;
curves are fitted to ``C n^{-gamma} (ln n)^k`` and audited against the
explicit operator-norm envelopes built from the constant ledger
(:class:`TheoremConstants`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
import scipy.optimize

from trotterlab.errors import (
    DegenerateFitError,
    DimensionError,
    DomainError,
    InvalidInputError,
    PreconditionError,
)
from trotterlab.operator_core import (
    DEFAULT_T_GRID,
    GeneratorSpec,
    NormKind,
    expm,
    frac_power,
    inverse,
    op_norm,
)
from trotterlab.semigroup_checks import BoundCheckReport, LemmaId

ROUNDOFF_FLOOR = 1e-14
DYADIC_NS = tuple(2**k for k in range(2, 13))
SHIFT_TARGET = 0.5


class Ordering(str, Enum):
    BA = "BA"
    AB = "AB"
    SYM = "SYM"


def _generator_matrix(g) -> np.ndarray:
    return g.matrix if isinstance(g, GeneratorSpec) else GeneratorSpec.from_matrix(g).matrix


def trotter_step(a: np.ndarray, b: np.ndarray, tau: float, ordering: Ordering) -> np.ndarray:
    ordering = Ordering(ordering)
    if ordering is Ordering.BA:
        return expm(b, tau) @ expm(a, tau)
    if ordering is Ordering.AB:
        return expm(a, tau) @ expm(b, tau)
    half = expm(a, tau / 2)
    return half @ expm(b, tau) @ half


def trotter_product(a, b, t: float, n: int, ordering=Ordering.BA) -> np.ndarray:
    """The ``n``-fold Trotter product at step ``t/n`` in the given ordering."""
    am, bm = _generator_matrix(a), _generator_matrix(b)
    if am.shape != bm.shape:
        raise DimensionError(f"generator shapes differ: {am.shape} vs {bm.shape}")
    if n < 1:
        raise DomainError("n must be a positive integer")
    if t <= 0:
        raise DomainError("t must be positive")
    return np.linalg.matrix_power(trotter_step(am, bm, t / n, ordering), int(n))


@dataclass
class ErrorCurve:
    t: float
    ordering: Ordering
    norm: NormKind
    points: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        ns = [n for n, _ in self.points]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidInputError("curve points must have strictly increasing n")
        if not all(math.isfinite(e) and e >= 0 for _, e in self.points):
            raise InvalidInputError("curve errors must be finite and nonnegative")

    @property
    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.points], dtype=float)

    @property
    def errors(self) -> np.ndarray:
        return np.array([e for _, e in self.points], dtype=float)


def trotter_error_curve(a, b, t: float, ns=DYADIC_NS, ordering=Ordering.BA, norm=NormKind.TWO) -> ErrorCurve:
    am, bm = _generator_matrix(a), _generator_matrix(b)
    if am.shape != bm.shape:
        raise DimensionError(f"generator shapes differ: {am.shape} vs {bm.shape}")
    norm = NormKind.parse(norm)
    ordering = Ordering(ordering)
    exact = expm(am + bm, t)
    points = []
    for n in sorted(int(n) for n in ns):
        if n <= 2:
            raise DomainError("error curves use n > 2 only")
        points.append((n, op_norm(trotter_product(am, bm, t, n, ordering) - exact, norm)))
    return ErrorCurve(t, ordering, norm, points)


@dataclass(frozen=True)
class RateFit:
    gamma: float
    logpow: int
    constant: float
    r_squared: float


def fit_rate(curve: ErrorCurve, logpow: int = 0) -> RateFit:
    """Least-squares fit of ``log e = log C - gamma log n + logpow log ln n``.

    Only points with ``n > 2`` and error above the round-off floor are used.
    """
    if logpow not in (0, 1, 2):
        raise InvalidInputError("logpow must be 0, 1 or 2")
    ns, errs = curve.ns, curve.errors
    keep = (ns > 2) & (errs > ROUNDOFF_FLOOR)
    if keep.sum() == 0:
        raise DegenerateFitError("all errors are at the round-off floor (commuting pair?)")
    if keep.sum() < 4:
        raise PreconditionError(f"rate fit needs at least 4 usable points, got {int(keep.sum())}")
    ns, errs = ns[keep], errs[keep]
    y = np.log(errs) - logpow * np.log(np.log(ns))
    x = np.log(ns)
    design = np.column_stack([np.ones_like(x), -x])
    (log_c, gamma), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([log_c, gamma])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(gamma), logpow, float(math.exp(log_c)), min(max(r2, 0.0), 1.0))


def relative_bound_estimate(b, a, alpha: float, eta: float) -> tuple[float, float]:
    """Relative-boundedness data ``(a_prime, d)`` of ``B`` with respect to ``A + eta``.

    Both products ``B X`` and ``X B`` are measured and the larger norm is
    kept, which covers the bounds on ``B`` and on its adjoint at once.
    """
    am, bm = _generator_matrix(a), _generator_matrix(b)
    if not 0 <= alpha < 1:
        raise DomainError("alpha must lie in [0, 1)")
    shifted = am + eta * np.eye(am.shape[0])
    inv = inverse(shifted)
    frac_inv = inverse(frac_power(shifted, alpha)) if alpha > 0 else np.eye(am.shape[0])
    a_prime = max(op_norm(bm @ inv, 2), op_norm(inv @ bm, 2))
    d = max(op_norm(bm @ frac_inv, 2), op_norm(frac_inv @ bm, 2))
    return a_prime, d


def choose_shift(a, b, alpha: float, target: float = SHIFT_TARGET, kmin: int = -30, kmax: int = 60) -> float:
    """Smallest ``eta = 2**k`` with ``a_prime <= target``."""
    for k in range(kmin, kmax + 1):
        eta = 2.0**k
        try:
            a_prime, _ = relative_bound_estimate(b, a, alpha, eta)
        except ArithmeticError:
            continue
        if a_prime <= target:
            return eta
    raise PreconditionError("no shift up to 2**60 brings the relative bound below target")


def zeta_sum(s: float, tol: float = 1e-10) -> float:
    """``sum_{j>=1} j^{-s}`` for ``s > 1``: partial sum plus Euler-Maclaurin tail.

    The tail after ``N`` terms is ``N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12``
    with an error below ``s(s+1)(s+2) N^{-s-3}/720``; ``N`` is doubled until
    that bound drops below ``tol``.
    """
    if s <= 1:
        raise DomainError("series diverges for s <= 1")
    n = 64
    while s * (s + 1) * (s + 2) * n ** (-s - 3) / 720 > tol:
        n *= 2
    j = np.arange(1, n, dtype=float)
    head = float(np.sum(j[::-1] ** -s))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n**-s + s * n ** (-s - 1) / 12
    return head + tail


@dataclass(frozen=True)
class TheoremConstants:
    """Constant ledger for the operator-norm Trotter envelopes.

    ``M_alpha`` is the ``1 + alpha`` moment ``sup_t t^{1+alpha} ||A^{1+alpha} e^{-tA}||``,
    the quantity the ``L3`` estimate consumes.  ``L3`` and ``M2`` only apply
    for ``alpha > 0`` and are zero otherwise; ``L3_tilde`` and ``M2_tilde``
    serve the ``alpha = 0`` envelope.
    """

    C_A: float
    C_B: float
    C_H: float
    C_A_prime: float
    C_H_prime: float
    a_prime: float
    d: float
    M_alpha: float
    B_norm: float
    alpha: float
    eta: float
    L1: float
    L2: float
    L3: float
    L3_tilde: float
    M1: float
    M2: float
    M2_tilde: float
    zeta: float
    provenance: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return asdict(self)


def theorem_constants(
    C_A: float,
    C_B: float,
    C_H: float,
    C_A_prime: float,
    C_H_prime: float,
    a_prime: float,
    d: float,
    M_alpha: float,
    alpha: float,
    B_norm: float,
    eta: float = 0.0,
    provenance: dict | None = None,
) -> TheoremConstants:
    if a_prime >= 1:
        raise PreconditionError(f"shift eta too small: a_prime = {a_prime:.6g} >= 1")
    if not 0 <= alpha < 1:
        raise DomainError("alpha must lie in [0, 1)")
    ap = a_prime
    L1 = C_B * ap + C_A + C_H * (1 + ap)
    L2 = (
        ap * C_A * C_B
        + 1.5 * C_A
        + 1.5 * C_B * ap**2
        + 1.5 * C_H * (1 + ap) ** 2
        + 1
        + ap**2
        + (1 + ap) ** 2
    )
    zeta = zeta_sum(1 + alpha) if alpha > 0 else math.inf
    L3 = d * M_alpha * zeta if alpha > 0 else 0.0
    L3_tilde = B_norm * C_A_prime
    q = 1.0 / (1.0 - ap)
    M1 = 4 * L1 * (C_A_prime + C_H_prime * q) + 4 * L2 * C_H_prime * C_A_prime * q
    M2 = 2 * L3 * L1 + 2 * L3 * L2 * C_H_prime * q
    M2_tilde = 2 * L3_tilde * L1 + 2 * L3_tilde * L2 * C_H_prime * q
    return TheoremConstants(
        C_A, C_B, C_H, C_A_prime, C_H_prime, ap, d, M_alpha, B_norm, alpha, eta,
        L1, L2, L3, L3_tilde, M1, M2, M2_tilde,
        zeta if alpha > 0 else 0.0,
        dict(provenance or {}),
    )


def moment_sup(power: np.ndarray, gen: np.ndarray, exponent: float, t_grid=DEFAULT_T_GRID) -> float:
    """``sup_t t^exponent ||power @ exp(-t gen)||_2`` on a log grid, polished locally."""
    grid = np.sort(np.asarray(t_grid, dtype=float))

    def f(t):
        return t**exponent * op_norm(power @ expm(gen, t), 2)

    values = [f(t) for t in grid]
    best = int(np.argmax(values))
    lo, hi = math.log(grid[max(best - 1, 0)]), math.log(grid[min(best + 1, grid.size - 1)])
    result = values[best]
    if hi > lo:
        opt = scipy.optimize.minimize_scalar(
            lambda s: -f(math.exp(s)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-8}
        )
        result = max(result, -float(opt.fun))
    return float(result)


def measure_constants(a, b, alpha: float, eta: float | None = None, t_grid=DEFAULT_T_GRID) -> TheoremConstants:
    """Measure every input of the ledger for the pair ``(A, B)`` and fill it.

    ``eta`` defaults to :func:`choose_shift`.  All sup-type constants are
    grid measurements over ``t_grid`` recorded in the provenance.
    """
    ga = a if isinstance(a, GeneratorSpec) else GeneratorSpec.from_matrix(a)
    gb = b if isinstance(b, GeneratorSpec) else GeneratorSpec.from_matrix(b)
    if eta is None:
        eta = choose_shift(ga, gb, alpha)
    a_t = ga.matrix + eta * np.eye(ga.dim)
    h_t = a_t + gb.matrix
    gen_a = GeneratorSpec.from_matrix(a_t)
    gen_h = GeneratorSpec.from_matrix(h_t)
    a_prime, d = relative_bound_estimate(gb, ga, alpha, eta)
    C_A = gen_a.bound_constant_CA
    C_B = gb.bound_constant_CA
    C_H = gen_h.bound_constant_CA
    C_A_prime = moment_sup(a_t, a_t, 1.0, t_grid)
    C_H_prime = moment_sup(h_t, h_t, 1.0, t_grid)
    M_alpha = moment_sup(a_t @ frac_power(a_t, alpha), a_t, 1.0 + alpha, t_grid)
    grid = np.asarray(t_grid, dtype=float)
    provenance = {
        "t_grid": {"min": float(grid.min()), "max": float(grid.max()), "points": int(grid.size), "spacing": "log"},
        "shift_rule": f"smallest power of 2 with a_prime <= {SHIFT_TARGET}",
    }
    return theorem_constants(
        C_A, C_B, C_H, C_A_prime, C_H_prime, a_prime, d, M_alpha, alpha,
        op_norm(gb.matrix, 2), eta, provenance,
    )


def envelope(n, k: TheoremConstants, t: float):
    """Operator-norm error envelope at ``n`` (scalar or array), ``n > 2``."""
    n = np.asarray(n, dtype=float)
    growth = math.exp(k.eta * t)
    if k.alpha > 0:
        return growth * (k.M1 + k.M2 * t ** (1 - k.alpha)) * np.log(n) / n ** (1 - k.alpha)
    return growth * (k.M1 + k.M2_tilde * t) * 2 * np.log(n) ** 2 / n


@dataclass(frozen=True)
class EnvelopeResult:
    reports: list[BoundCheckReport]
    eta: float

    @property
    def satisfied(self) -> bool:
        return all(r.satisfied for r in self.reports)

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.reports)


def envelope_check(curve: ErrorCurve, k: TheoremConstants, t: float | None = None) -> EnvelopeResult:
    t = curve.t if t is None else t
    reports = []
    for n, err in curve.points:
        if n <= 2:
            raise DomainError("envelope applies for n > 2 only")
        reports.append(
            BoundCheckReport(
                LemmaId.ENVELOPE,
                {"n": n, "t": t, "ordering": Ordering(curve.ordering).value, "eta": k.eta},
                float(err),
                float(envelope(n, k, t)),
            )
        )
    return EnvelopeResult(reports, k.eta)


def lemma_bound_checks(a, b, k: TheoremConstants, tau_grid, k_grid) -> list[BoundCheckReport]:
    """Evaluate the one-step and k-step lemma estimates for ``A + eta`` and ``B``.

    The shift ``eta`` is taken from the ledger ``k`` so the checks use the
    same operators the constants were measured on.
    """
    am, bm = _generator_matrix(a), _generator_matrix(b)
    a_t = am + k.eta * np.eye(am.shape[0])
    h_t = a_t + bm
    a_inv = inverse(a_t)
    reports = []
    for tau in tau_grid:
        exact = expm(h_t, tau)
        for ordering in (Ordering.BA, Ordering.AB):
            diff = trotter_step(a_t, bm, tau, ordering) - exact
            params = {"tau": float(tau), "ordering": ordering.value}
            reports.append(BoundCheckReport(LemmaId.L1_LEFT, params, op_norm(a_inv @ diff, 2), k.L1 * tau))
            reports.append(BoundCheckReport(LemmaId.L1_RIGHT, params, op_norm(diff @ a_inv, 2), k.L1 * tau))
            reports.append(BoundCheckReport(LemmaId.L2, params, op_norm(a_inv @ diff @ a_inv, 2), k.L2 * tau**2))
        if tau <= 0:
            continue
        for ordering in (Ordering.BA, Ordering.AB):
            step = trotter_step(a_t, bm, tau, ordering)
            for kk in k_grid:
                powered = np.linalg.matrix_power(step, int(kk))
                lhs_mat = powered @ a_t if ordering is Ordering.BA else a_t @ powered
                if k.alpha > 0:
                    rhs = k.L3 / tau**k.alpha + k.C_A_prime / (kk * tau)
                else:
                    rhs = k.L3_tilde * (1 + math.log(kk)) + k.C_A_prime / (kk * tau)
                params = {"tau": float(tau), "k": int(kk), "ordering": ordering.value}
                reports.append(BoundCheckReport(LemmaId.L3, params, op_norm(lhs_mat, 2), rhs))
    return reports


def accretive_pair_battery(seed: int = 0, count: int = 10, dims=(2, 3, 4, 6, 8, 10, 12, 14, 16, 16)):
    """Seeded accretive generator pairs ``(A, B)`` with ``A`` SPD.

    Even-indexed pairs have symmetric positive semidefinite ``B``; odd ones
    add a skew-symmetric part, keeping ``B`` accretive but non-normal.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    pairs = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        d = dims[i % len(dims)]
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        lam = np.exp(rng.uniform(math.log(0.2), math.log(4.0), size=d))
        a = (q * lam) @ q.T
        a = 0.5 * (a + a.T)
        g = rng.standard_normal((d, d)) / math.sqrt(d)
        b = 0.5 * (g @ g.T)
        if i % 2:
            s = rng.standard_normal((d, d)) / math.sqrt(d)
            b = b + 0.5 * (s - s.T)
        pairs.append((GeneratorSpec.from_matrix(a, bound_constant=1.0), GeneratorSpec.from_matrix(b)))
    return pairs
