from fractions import Fraction

import numpy as np
import pytest

from trotterlab.errors import DomainError, ResolutionError
from trotterlab.evolution.cantor import (
    CantorSpec,
    cantor_membership,
    cantor_open_measure,
    cantor_window,
    half_width,
)


def sweep_measure(cap, s=0.0, t=1.0):
    """Oracle: list every removed interval, clip to the window, merge by sorting."""
    pieces = []
    lo_w, hi_w = Fraction(s), Fraction(t)
    for n in range(1, cap + 1):
        w = Fraction(1, 2 ** (2 * n + 2))
        for k in range(2**n + 1):
            c = Fraction(k, 2**n)
            a = max(c - w, Fraction(0), lo_w)
            b = min(c + w, Fraction(1), hi_w)
            if b > a:
                pieces.append((a, b))
    pieces.sort()
    total, cur = Fraction(0), None
    for a, b in pieces:
        if cur is None or a > cur[1]:
            if cur is not None:
                total += cur[1] - cur[0]
            cur = [a, b]
        else:
            cur[1] = max(cur[1], b)
    if cur is not None:
        total += cur[1] - cur[0]
    return total


class TestMembership:
    def test_half_removed(self):
        assert cantor_membership(0.5) is False

    def test_third_kept(self):
        assert cantor_membership(1 / 3) is True

    def test_level_by_level_point(self):
        t = 2**-6 + 2**-15
        # already inside the first-level end interval (0, 1/16); also within 2^-14 of 1/64
        assert t < half_width(1) and 2**-15 < half_width(6)
        assert cantor_membership(t) is False
        assert cantor_membership(t, CantorSpec(1)) is False
        # same offset around an odd level-6 centre away from coarser intervals
        u = 21 / 64 + 2**-15
        assert cantor_membership(u, CantorSpec(5)) is True
        assert cantor_membership(u, CantorSpec(6)) is False

    def test_endpoints_and_boundary(self):
        assert cantor_membership(0.0) is True and cantor_membership(1.0) is True
        # open intervals: the edge point of the level-1 interval is kept
        assert cantor_membership(0.5 + 1 / 16, CantorSpec(1)) is True
        assert cantor_membership(0.5 + 1 / 16 - 1e-12, CantorSpec(1)) is False

    def test_vectorised(self):
        got = cantor_membership(np.array([0.5, 1 / 3, 0.01]))
        assert got.tolist() == [False, True, False]

    def test_domain(self):
        with pytest.raises(DomainError):
            cantor_membership(1.5)

    def test_spec_limits(self):
        with pytest.raises(ResolutionError):
            CantorSpec(27)
        with pytest.raises(DomainError):
            CantorSpec(0)


class TestWindow:
    def test_values(self):
        assert cantor_window(1)[0] == pytest.approx(1 / 48)
        assert cantor_window(3)[0] == pytest.approx(1 / 768)
        assert cantor_window(3)[1] == pytest.approx(1 - 1 / 768)

    def test_samples_removed(self):
        eps, _ = cantor_window(4)
        s, t = eps / 2, 1 - eps / 2
        xi = s + np.arange(16) * (t - s) / 16
        assert not np.any(cantor_membership(xi))

    @pytest.mark.parametrize("n", range(1, 11))
    def test_sum_vanishes(self, n):
        eps, _ = cantor_window(n)
        for s, t in ((eps / 2, 1 - eps / 2), (eps * 0.999, 1 - eps * 0.001), (eps * 1e-3, 1 - eps * 0.999)):
            xi = s + np.arange(2**n) * (t - s) / 2**n
            assert np.sum(cantor_membership(xi)) == 0

    def test_too_fine(self):
        with pytest.raises(ResolutionError):
            cantor_window(15)


class TestMeasure:
    @pytest.mark.parametrize("cap", [1, 2, 3, 5, 8, 11])
    @pytest.mark.parametrize("window", [None, (0.4, 0.6), (0.1234, 0.77), (0.0, 0.03), (0.5 + 2**-9, 0.9)])
    def test_matches_sweep(self, cap, window):
        got = cantor_open_measure(CantorSpec(cap), window)
        assert got.exact == sweep_measure(cap, *(window or (0.0, 1.0)))

    def test_level_contribution(self):
        assert cantor_open_measure(CantorSpec(1)).exact == Fraction(1, 4)
        for n in range(2, 12):
            step = cantor_open_measure(CantorSpec(n)).exact - cantor_open_measure(CantorSpec(n - 1)).exact
            assert 0 < step <= Fraction(1, 2 ** (n + 1))

    def test_closed_set_at_least_half(self):
        m = cantor_open_measure()
        assert m.uncertainty == 2.0**-27
        assert 1 - m.open_measure >= 0.5 - m.uncertainty
        assert m.closed_measure == pytest.approx(1 - m.open_measure, abs=1e-15)

    def test_monte_carlo_window(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.4, 0.6, size=1_000_000)
        frac_open = 1.0 - np.mean(cantor_membership(pts))
        est = 0.2 * frac_open
        se = 0.2 * np.sqrt(frac_open * (1 - frac_open) / pts.size)
        got = cantor_open_measure(window=(0.4, 0.6)).open_measure
        assert abs(got - est) <= 3 * se

    def test_bad_window(self):
        with pytest.raises(DomainError):
            cantor_open_measure(window=(0.6, 0.4))
