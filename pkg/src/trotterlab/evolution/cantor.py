"""The fat Cantor-type set behind the Trotter nonconvergence example.

Level ``n >= 1`` removes the open intervals of half-width ``2^{-(2n+2)}``
centred at the dyadic points ``k/2^n`` (one-sided at 0 and 1).  The open set
``O`` is the union over all levels and the closed set ``C = [0,1] \\ O`` has
measure at least 1/2.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from trotterlab.errors import DomainError, ResolutionError

DEFAULT_LEVEL_CAP = 26
MAX_WINDOW_LEVEL = 14


@dataclass(frozen=True)
class CantorSpec:
    level_cap: int = DEFAULT_LEVEL_CAP

    def __post_init__(self):
        if self.level_cap < 1:
            raise DomainError("level_cap must be positive")
        # finest removed half-width must stay below double resolution at scale 1
        if self.level_cap > DEFAULT_LEVEL_CAP:
            raise ResolutionError(f"level_cap above {DEFAULT_LEVEL_CAP} is below double precision")

    @property
    def tail_bound(self) -> float:
        """Upper bound on the measure contributed by levels beyond the cap."""
        return 2.0 ** -(self.level_cap + 1)


def half_width(n: int) -> float:
    return 2.0 ** -(2 * n + 2)


def cantor_membership(t, spec: CantorSpec = CantorSpec()):
    """True where ``t`` lies in the closed set ``C`` (vectorised over ``t``)."""
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise DomainError("points must lie in [0, 1]")
    removed = np.zeros(arr.shape, dtype=bool)
    interior = (arr > 0) & (arr < 1)
    for n in range(1, spec.level_cap + 1):
        scale = 2.0**n
        k = np.rint(arr * scale)
        removed |= interior & (np.abs(arr - k / scale) < half_width(n))
    out = ~removed
    return bool(out) if out.ndim == 0 else out


def cantor_window(n: int) -> tuple[float, float]:
    """``(eps_n, 1 - eps_n)`` with ``eps_n = 1/(3 * 2^{2n+2})``.

    For ``s`` in ``(0, eps_n)`` and ``t`` in ``(1 - eps_n, 1)`` every node
    ``s + k(t - s)/2^n`` falls in the removed interval around ``k/2^n``.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if n > MAX_WINDOW_LEVEL:
        raise ResolutionError(f"window level {n} exceeds {MAX_WINDOW_LEVEL}")
    eps = 1.0 / (3 * 2 ** (2 * n + 2))
    return eps, 1.0 - eps


def _odd_count(lo: int, hi: int) -> int:
    """Number of odd integers in ``[lo, hi]``."""
    if hi < lo:
        return 0
    return (hi + 1) // 2 - lo // 2


@dataclass(frozen=True)
class OpenMeasure:
    """Measure of ``O`` inside a window, truncated at the level cap."""

    open_measure: float
    uncertainty: float
    window: tuple[float, float]
    exact: Fraction

    @property
    def closed_measure(self) -> float:
        """Measure of ``C`` in the window, i.e. the integral of its indicator."""
        s, t = self.window
        return float(Fraction(t) - Fraction(s) - self.exact)


class _Level:
    """Coverage data for the odd centres ``k/2^m`` of one level ``m >= 2``.

    An odd centre is either strictly inside a coarser removed interval (its
    whole interval is covered), exactly on the edge of a coarser interval of
    integer radius one (half covered), or free.  All arithmetic is on the
    integer lattice ``2^{-m} Z``.
    """

    def __init__(self, m: int):
        self.m = m
        spans = []
        left_of, right_of = [], []
        for j in range(1, m):
            rho = 2 ** (m - 2 * j - 2) if m - 2 * j - 2 >= 0 else 0
            if rho == 0:
                break
            step = 2 ** (m - j)
            centres = np.arange(0, 2**j + 1, dtype=np.int64) * step
            if rho == 1:
                left_of.append(centres - 1)
                right_of.append(centres + 1)
            else:
                spans.append(np.column_stack([centres - rho + 1, centres + rho - 1]))
        self.spans = self._merge(np.concatenate(spans) if spans else np.empty((0, 2), dtype=np.int64))
        # odd centres just left of a radius-one interval keep their left half,
        # those just right of one keep their right half
        self.keeps_left = self._inside_unit(left_of, m)
        self.keeps_right = self._inside_unit(right_of, m)
        self.edges = np.union1d(self.keeps_left, self.keeps_right)

    @staticmethod
    def _inside_unit(parts, m: int) -> np.ndarray:
        e = np.unique(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)
        return e[(e >= 1) & (e <= 2**m - 1)]

    @staticmethod
    def _merge(spans: np.ndarray) -> np.ndarray:
        if spans.size == 0:
            return spans
        spans = spans[np.argsort(spans[:, 0], kind="stable")]
        merged = [list(spans[0])]
        for lo, hi in spans[1:]:
            if lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return np.array(merged, dtype=np.int64)

    def covered(self, k: int) -> bool:
        if self.spans.size == 0:
            return False
        i = np.searchsorted(self.spans[:, 0], k, side="right") - 1
        return bool(i >= 0 and self.spans[i, 1] >= k)

    def _covered_many(self, ks: np.ndarray) -> np.ndarray:
        if self.spans.size == 0 or ks.size == 0:
            return np.zeros(ks.shape, dtype=bool)
        i = np.searchsorted(self.spans[:, 0], ks, side="right") - 1
        return (i >= 0) & (self.spans[np.maximum(i, 0), 1] >= ks)

    def status(self, k: int) -> str:
        if self.covered(k):
            return "inside"
        if k in self.keeps_left:
            return "keeps_left"
        if k in self.keeps_right:
            return "keeps_right"
        return "free"

    def counts(self, lo: int, hi: int) -> tuple[int, int]:
        """``(free, edge)`` odd centres in ``[lo, hi]``."""
        total = _odd_count(lo, hi)
        inside = 0
        if self.spans.size:
            a = np.maximum(self.spans[:, 0], lo)
            b = np.minimum(self.spans[:, 1], hi)
            ok = b >= a
            inside = int(np.sum((b[ok] + 1) // 2 - a[ok] // 2))
        e = self.edges[(self.edges >= lo) & (self.edges <= hi)]
        edge = int(e.size - np.count_nonzero(self._covered_many(e)))
        return total - inside - edge, edge


@functools.lru_cache(maxsize=None)
def _level(m: int) -> _Level:
    return _Level(m)


def _clip(a: Fraction, b: Fraction, s: Fraction, t: Fraction) -> Fraction:
    return max(Fraction(0), min(b, t) - max(a, s))


def cantor_open_measure(spec: CantorSpec = CantorSpec(), window: tuple[float, float] | None = None) -> OpenMeasure:
    """Exact measure of ``O`` within ``window`` using levels up to the cap.

    Levels beyond the cap add at most ``2^{-(cap+1)}``, reported as the
    uncertainty.  Even centres at level ``m`` repeat a coarser centre with a
    wider interval, so only odd centres contribute new measure.
    """
    s_f, t_f = (0.0, 1.0) if window is None else (float(window[0]), float(window[1]))
    if not 0 <= s_f <= t_f <= 1:
        raise DomainError("window must satisfy 0 <= s <= t <= 1")
    s, t = Fraction(s_f), Fraction(t_f)
    w1 = Fraction(1, 16)
    total = _clip(Fraction(0), w1, s, t) + _clip(Fraction(1, 2) - w1, Fraction(1, 2) + w1, s, t)
    total += _clip(1 - w1, Fraction(1), s, t)
    for m in range(2, spec.level_cap + 1):
        total += _level_measure(_level(m), s, t)
    return OpenMeasure(float(total), spec.tail_bound, (s_f, t_f), total)


def _level_measure(level: _Level, s: Fraction, t: Fraction) -> Fraction:
    m = level.m
    scale = 2**m
    w = Fraction(1, 2 ** (2 * m + 2))
    # odd centres whose whole interval lies in the window
    lo = math.ceil((s + w) * scale)
    hi = math.floor((t - w) * scale)
    lo, hi = max(lo, 1), min(hi, scale - 1)
    total = Fraction(0)
    if lo <= hi:
        free, edge = level.counts(lo, hi)
        total += w * (2 * free + edge)
    # at most one interval straddles each window end
    candidates = set()
    for x in (s, t):
        base = math.floor(x * scale)
        candidates.update(k for k in (base - 1, base, base + 1, base + 2) if k % 2 == 1 and 1 <= k < scale)
    for k in sorted(candidates):
        if lo <= k <= hi:
            continue
        c = Fraction(k, scale)
        if _clip(c - w, c + w, s, t) == 0:
            continue
        kind = level.status(k)
        if kind == "inside":
            continue
        if kind == "free":
            total += _clip(c - w, c + w, s, t)
        elif kind == "keeps_left":
            total += _clip(c - w, c, s, t)
        else:
            total += _clip(c, c + w, s, t)
    return total
