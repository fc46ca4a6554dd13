"""Finite-sample Landau classification of error curves against a reference rate."""

from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

from trotterlab.errors import InvalidInputError, PreconditionError
from trotterlab.operator_core import NormKind
from trotterlab.trotter_engine import ErrorCurve, Ordering

# verdict thresholds, echoed in every report header
UPPER_SLACK = 1.1
LOWER_SLACK = 0.9
OMEGA_GROWTH = 1.1  # per doubling of n
LITTLE_O_DROP = 0.1
MIN_POINTS = 6

VERDICTS = ("O", "o", "Theta", "omega", "inconclusive")

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_POWER = re.compile(rf"^n\^\(?({_NUM})\)?$")
_LOG_POWER = re.compile(rf"^(?:ln|log)\(n\)(?:\^({_NUM}))?\*n\^\(?({_NUM})\)?$")


def thresholds() -> dict:
    return {
        "upper_slack": UPPER_SLACK,
        "lower_slack": LOWER_SLACK,
        "omega_growth_per_doubling": OMEGA_GROWTH,
        "little_o_drop": LITTLE_O_DROP,
        "min_points": MIN_POINTS,
    }


def parse_model(model: str) -> Callable[[np.ndarray], np.ndarray]:
    """Reference rate from a string such as ``"1/n"``, ``"n^-0.5"`` or ``"ln(n)*n^-0.5"``."""
    text = model.replace(" ", "").lower()
    if text in ("1", "const"):
        return lambda n: np.ones_like(n, dtype=float)
    if text == "1/n":
        return lambda n: 1.0 / n
    if text == "1/sqrt(n)":
        return lambda n: n**-0.5
    m = _POWER.match(text)
    if m:
        c = float(m.group(1))
        return lambda n: n**c
    m = _LOG_POWER.match(text)
    if m:
        p = float(m.group(1) or 1.0)
        c = float(m.group(2))
        return lambda n: np.log(n) ** p * n**c
    raise InvalidInputError(f"unrecognised reference model {model!r}")


def classify_rate(curve: ErrorCurve, reference: str | Callable) -> str:
    """Heuristic verdict comparing ``curve`` with the reference rate ``f``.

    With ``r_k = e(n_k)/f(n_k)`` checked in this order: ``omega`` if ``r``
    grows by at least ``OMEGA_GROWTH`` per doubling between every pair of
    consecutive points; ``o`` if the last ratio is below ``LITTLE_O_DROP``
    times the first; ``Theta`` and ``O`` by comparing the extremes of the
    upper and lower halves of the curve.
    """
    f = parse_model(reference) if isinstance(reference, str) else reference
    ns, errs = curve.ns, curve.errors
    if ns.size < MIN_POINTS:
        raise PreconditionError(f"classification needs at least {MIN_POINTS} points, got {ns.size}")
    ref = np.asarray(f(ns), dtype=float)
    if np.any(ref <= 0) or not np.all(np.isfinite(ref)):
        raise InvalidInputError("reference rate must be positive and finite on the curve")
    r = errs / ref
    if not np.any(r > 0):
        return "o"
    steps = np.log2(ns[1:] / ns[:-1])
    if np.all(r[1:] >= r[:-1] * OMEGA_GROWTH**steps) and np.all(r[1:] > r[:-1]):
        return "omega"
    if r[-1] < LITTLE_O_DROP * r[0]:
        return "o"
    half = ns.size // 2
    bottom, top = r[:half], r[-half:]
    if top.max() <= bottom.max() * UPPER_SLACK:
        if top.min() >= bottom.min() * LOWER_SLACK:
            return "Theta"
        return "O"
    return "inconclusive"


def curve_from_values(ns, errors, t: float = math.nan) -> ErrorCurve:
    """Wrap an arbitrary ``(n, error)`` sequence for classification."""
    return ErrorCurve(t, Ordering.BA, NormKind.TWO, [(int(n), float(e)) for n, e in zip(ns, errors)])
