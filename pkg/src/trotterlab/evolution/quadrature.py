"""Adaptive Simpson quadrature with an explicit failure mode."""

from __future__ import annotations

from trotterlab.errors import AccuracyError

SIMPSON_TOL = 1e-10
MAX_DEPTH = 40


def _simpson(fa, fm, fb, a, b):
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f, a: float, b: float, tol: float = SIMPSON_TOL, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Intervals are bisected until the Richardson estimate on each piece is
    below its share of the tolerance.  A piece that reaches ``max_depth``
    without converging raises :class:`AccuracyError` carrying the worst
    local error estimate; the integral is never returned silently degraded.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    stack = [(a, b, fa, fm, fb, _simpson(fa, fm, fb, a, b), tol, 0)]
    total = 0.0
    worst = 0.0
    failed = False
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, lo, mid)
        right = _simpson(fmid, fr, fhi, mid, hi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            if abs(delta) > 15.0 * eps:
                failed = True
                worst = max(worst, abs(delta) / 15.0)
            total += left + right + delta / 15.0
            continue
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
    if failed:
        raise AccuracyError("adaptive Simpson hit the depth cap", worst)
    return sign * total
