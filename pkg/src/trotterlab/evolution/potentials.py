"""Nonnegative bounded potentials ``q`` on ``[0, 1]``.

A potential carries a vectorised evaluator, optionally an exact
antiderivative ``F(t) = int_0^t q`` and a Hoelder pair ``(beta, L)``.  Only
the descriptor (kind plus parameters) is serialisable; function bodies never
leave the process.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from trotterlab.errors import DomainError, InvalidInputError
from trotterlab.evolution.cantor import CantorSpec, cantor_membership, cantor_open_measure

KINDS = ("constant", "linear", "holder_kink", "weierstrass", "cantor", "witness", "custom")
WEIERSTRASS_TERMS = 12


@dataclass(frozen=True)
class ScalarPotential:
    eval: Callable = field(repr=False)
    kind: str
    sup_norm: float
    antideriv: Callable | None = field(default=None, repr=False)
    holder: tuple[float, float] | None = None
    params: dict = field(default_factory=dict)
    # optional closed form for the mean of q(s + k(t-s)/n), k = 0..n-1
    left_mean: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown potential kind {self.kind!r}")
        if not self.sup_norm >= 0:
            raise InvalidInputError("sup_norm must be nonnegative")

    def __call__(self, t):
        return self.eval(t)

    @property
    def continuous(self) -> bool:
        return self.kind not in ("cantor", "custom") or bool(self.params.get("continuous", False))

    def integral(self, s, t):
        """``int_s^t q``; requires an antiderivative (see ``riemann.integral`` otherwise)."""
        if self.antideriv is None:
            raise InvalidInputError(f"{self.kind} potential has no antiderivative")
        if self.kind == "constant":
            # keeps the left sum and the integral bit-identical
            return self.params["c"] * (np.asarray(t, dtype=float) - np.asarray(s, dtype=float))
        return self.antideriv(t) - self.antideriv(s)

    def descriptor(self) -> dict:
        if self.kind == "custom":
            raise InvalidInputError("custom potentials cannot be serialised")
        return {"kind": self.kind, **self.params}


def constant(c: float) -> ScalarPotential:
    if c < 0:
        raise DomainError("potential must be nonnegative")
    c = float(c)
    return ScalarPotential(
        eval=lambda t: np.full(np.shape(t), c) if np.ndim(t) else c,
        kind="constant",
        sup_norm=c,
        antideriv=lambda t: c * np.asarray(t, dtype=float) if np.ndim(t) else c * t,
        holder=(1.0, 0.0),
        params={"c": c},
        left_mean=lambda s, t, n: np.full(np.broadcast(s, t).shape, c),
    )


def linear(slope: float = 1.0) -> ScalarPotential:
    """``q(y) = slope * y``."""
    if slope < 0:
        raise DomainError("potential must be nonnegative")
    slope = float(slope)
    return ScalarPotential(
        eval=lambda t: slope * np.asarray(t, dtype=float) if np.ndim(t) else slope * t,
        kind="linear",
        sup_norm=slope,
        antideriv=lambda t: 0.5 * slope * np.square(t),
        holder=(1.0, slope),
        params={"slope": slope},
    )


def holder_kink(beta: float) -> ScalarPotential:
    """``|t - 1/2|^beta``, Hoelder-beta with constant 1."""
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")

    def q(t):
        return np.abs(np.asarray(t, dtype=float) - 0.5) ** beta

    def big_q(t):
        u = np.asarray(t, dtype=float) - 0.5
        return (0.5 ** (beta + 1) + np.sign(u) * np.abs(u) ** (beta + 1)) / (beta + 1)

    return ScalarPotential(q, "holder_kink", 0.5**beta, big_q, (beta, 1.0), {"beta": beta})


def weierstrass_holder_constant(beta: float, terms: int = WEIERSTRASS_TERMS) -> float:
    """Hoelder constant of the truncated Weierstrass-type sum.

    Each term obeys ``c_k |cos(w_k x) - cos(w_k y)|/2 <= c_k min(1, w_k d/2)``
    with ``d = |x - y|``; the sup over ``d`` in ``(0, 1]`` of ``d^{-beta}`` times
    the summed bound is reached at a breakpoint ``d = 2/w_k`` or at ``d = 1``
    because on each piece the function is convex in the scale variable.
    """
    k = np.arange(1, terms + 1)
    c = 2.0 ** (-beta * k)
    w = np.pi * 2.0**k
    cands = np.concatenate([2.0 / w, [1.0]])
    cands = cands[cands <= 1.0]

    def bound(d):
        return float(np.sum(c * np.minimum(1.0, w * d / 2.0)) / d**beta)

    return max(bound(d) for d in cands)


def weierstrass(beta: float, terms: int = WEIERSTRASS_TERMS) -> ScalarPotential:
    """``sum_k 2^{-beta k} (1 + cos(2^k pi t))/2`` for ``k = 1..terms``."""
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    k = np.arange(1, terms + 1)
    c = 2.0 ** (-beta * k)
    w = np.pi * 2.0**k

    def q(t):
        t = np.asarray(t, dtype=float)
        return np.tensordot(np.cos(np.multiply.outer(t, w)) + 1.0, c, axes=([-1], [0])) / 2.0

    def big_q(t):
        t = np.asarray(t, dtype=float)
        return (np.sum(c) * t + np.tensordot(np.sin(np.multiply.outer(t, w)), c / w, axes=([-1], [0]))) / 2.0

    def mean(s, t, n):
        # Dirichlet-kernel closed form of (1/n) sum_j cos(w (s + j tau))
        s = np.asarray(s, dtype=float)[..., None]
        t = np.asarray(t, dtype=float)[..., None]
        b = w * (t - s) / n
        half = b / 2.0
        m = np.rint(half / np.pi)
        e = half - m * np.pi
        sign = np.where((m * (n - 1)) % 2 == 0, 1.0, -1.0)
        kernel = sign * np.sinc(n * e / np.pi) / np.sinc(e / np.pi)
        cos_mean = np.cos(w * s + (n - 1) * half) * kernel
        return np.tensordot(1.0 + cos_mean, c, axes=([-1], [0])) / 2.0

    return ScalarPotential(
        q,
        "weierstrass",
        float(np.sum(c)),
        big_q,
        (beta, weierstrass_holder_constant(beta, terms)),
        {"beta": beta, "terms": terms},
        mean,
    )


def make_holder_potential(beta: float, variant: str = "kink") -> ScalarPotential:
    if variant == "kink":
        return holder_kink(beta)
    if variant == "weierstrass":
        return weierstrass(beta)
    raise InvalidInputError(f"unknown Hoelder variant {variant!r}")


def cantor(spec: CantorSpec = CantorSpec()) -> ScalarPotential:
    """Indicator of the closed Cantor-type set; the antiderivative is measure based."""

    def q(t):
        return np.asarray(cantor_membership(t, spec), dtype=float)

    def big_q(t):
        arr = np.asarray(t, dtype=float)
        flat = [cantor_open_measure(spec, (0.0, float(x))).closed_measure for x in arr.ravel()]
        out = np.array(flat).reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    return ScalarPotential(q, "cantor", 1.0, big_q, None, {"level_cap": spec.level_cap})


def custom(fn: Callable, sup_norm: float, antideriv: Callable | None = None, continuous: bool = False) -> ScalarPotential:
    return ScalarPotential(fn, "custom", float(sup_norm), antideriv, None, {"continuous": continuous})


def from_descriptor(desc: dict) -> ScalarPotential:
    """Rebuild a potential from its JSON descriptor."""
    d = dict(desc)
    kind = d.pop("kind", None)
    try:
        if kind == "constant":
            out = constant(d.pop("c"))
        elif kind == "linear":
            out = linear(d.pop("slope", 1.0))
        elif kind == "holder_kink":
            out = holder_kink(d.pop("beta"))
        elif kind == "weierstrass":
            out = weierstrass(d.pop("beta"), d.pop("terms", WEIERSTRASS_TERMS))
        elif kind == "cantor":
            out = cantor(CantorSpec(d.pop("level_cap", CantorSpec().level_cap)))
        elif kind == "witness":
            from trotterlab.evolution.witness import slow_witness

            out = slow_witness([tuple(x) for x in d.pop("levels")])
        else:
            raise InvalidInputError(f"cannot build a potential of kind {kind!r}")
    except KeyError as exc:
        raise InvalidInputError(f"descriptor for {kind!r} is missing {exc.args[0]!r}") from None
    if d:
        raise InvalidInputError(f"unexpected descriptor keys {sorted(d)}")
    return out
