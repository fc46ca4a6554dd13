import json
import math

import numpy as np
import pytest

from trotterlab.errors import AccuracyError, AlignmentError, ConstructionError, DomainError, InvalidInputError
from trotterlab.evolution import potentials as P
from trotterlab.evolution.bridge import discretized_bridge, shift_matrix
from trotterlab.evolution.cantor import cantor_window
from trotterlab.evolution.quadrature import adaptive_simpson
from trotterlab.evolution.riemann import (
    SimplexPoint,
    corner_error,
    integral,
    left_mean,
    operator_error_sandwich,
    propagator_exact,
    riemann_error,
    riemann_sweep,
    sup_riemann_error,
    trotter_propagator,
)
from trotterlab.evolution.witness import slow_witness

GRID = np.linspace(0.0, 1.0, 1000)
HOLDER = [P.make_holder_potential(b, v) for b in (0.3, 0.5, 0.7, 1.0) for v in ("kink", "weierstrass")]
SMOOTH = [P.constant(0.0), P.constant(0.7), P.linear(), *HOLDER, slow_witness([(8, 0.2), (64, 0.05)])]


def direct_left_sum(q, s, t, n):
    tau = (t - s) / n
    return tau * sum(float(q(s + k * tau)) for k in range(n))


class TestPotentials:
    @pytest.mark.parametrize("q", SMOOTH, ids=lambda q: q.kind)
    def test_range(self, q):
        v = np.asarray(q(GRID))
        assert v.min() >= 0 and v.max() <= q.sup_norm + 1e-15

    @pytest.mark.parametrize("q", SMOOTH, ids=lambda q: q.kind)
    def test_antiderivative_matches(self, q):
        # small step: the finest Weierstrass term has curvature near 1e7
        h = 1e-7
        x = np.clip(GRID, h, 1 - h)
        deriv = (q.antideriv(x + h) - q.antideriv(x - h)) / (2 * h)
        assert np.max(np.abs(deriv - q(x))) <= 1e-6
        assert float(q.antideriv(0.0)) == 0.0

    @pytest.mark.parametrize("q", HOLDER, ids=lambda q: f"{q.kind}-{q.holder[0]}")
    def test_holder_pair(self, q):
        beta, lb = q.holder
        x = np.linspace(0, 1, 401)
        diff = np.abs(q(x)[:, None] - q(x)[None, :])
        dist = np.abs(x[:, None] - x[None, :])
        mask = dist > 0
        assert np.all(diff[mask] <= lb * dist[mask] ** beta * (1 + 1e-12))

    def test_kink_values(self):
        q = P.make_holder_potential(0.5, "kink")
        assert q(0.5) == 0.0
        assert q(0.0) == pytest.approx(0.5**0.5)

    def test_weierstrass_mean_closed_form(self):
        q = P.weierstrass(0.5)
        for s, t in ((0.1, 0.9), (0.013, 0.77), (0.5, 0.5), (1e-3, 1.0)):
            for n in (1, 3, 16, 1000):
                assert float(q.left_mean(np.array(s), np.array(t), n)) == pytest.approx(
                    direct_left_sum(q, s, t, n) / (t - s) if t > s else float(q(s)), abs=1e-12
                )

    def test_descriptor_roundtrip(self):
        for q in (P.constant(0.25), P.linear(2.0), P.holder_kink(0.3), P.weierstrass(0.7), P.cantor()):
            back = P.from_descriptor(json.loads(json.dumps(q.descriptor())))
            assert back.kind == q.kind and back.params == q.params
            assert np.allclose(back(GRID[1:-1]), q(GRID[1:-1]))

    def test_descriptor_errors(self):
        with pytest.raises(InvalidInputError):
            P.from_descriptor({"kind": "holder_kink"})
        with pytest.raises(InvalidInputError):
            P.from_descriptor({"kind": "linear", "slope": 1.0, "extra": 2})
        with pytest.raises(InvalidInputError):
            P.custom(lambda t: t, 1.0).descriptor()

    def test_domain(self):
        with pytest.raises(DomainError):
            P.holder_kink(0.0)
        with pytest.raises(DomainError):
            P.constant(-1.0)


class TestQuadrature:
    def test_polynomial(self):
        assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-12)

    def test_reversed(self):
        assert adaptive_simpson(math.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-10)

    def test_failure_reported(self):
        with pytest.raises(AccuracyError) as info:
            adaptive_simpson(lambda x: 0.0 if x < 1 / 3 else 1.0, 0.0, 1.0, tol=1e-14, max_depth=8)
        assert info.value.achieved > 0


class TestPropagators:
    def test_zero_potential(self):
        p = SimplexPoint(0.2, 0.9)
        assert propagator_exact(P.constant(0.0), p) == 1.0

    def test_constant(self):
        p = SimplexPoint(0.2, 0.9)
        c = P.constant(1.5)
        assert propagator_exact(c, p) == pytest.approx(math.exp(-1.5 * 0.7))
        for n in (1, 2, 7, 100):
            assert trotter_propagator(c, p, n) == propagator_exact(c, p)
            assert riemann_error(c, p, n) == 0.0

    def test_linear_corner(self):
        q = P.linear()
        assert math.exp(-float(integral(q, 0.0, 1.0))) == pytest.approx(math.exp(-0.5))
        assert math.exp(-direct_left_sum(q, 0.0, 1.0, 2)) == pytest.approx(math.exp(-0.25))
        assert trotter_propagator(q, SimplexPoint(1e-300, 1.0), 2) == pytest.approx(math.exp(-0.25))

    def test_single_sample(self):
        q = P.holder_kink(0.5)
        p = SimplexPoint(0.1, 0.8)
        assert trotter_propagator(q, p, 1) == pytest.approx(math.exp(-0.7 * float(q(0.1))))

    def test_linear_error_formula(self):
        q = P.linear()
        for n in (1, 2, 5, 64):
            assert corner_error(q, n) == pytest.approx(1 / (2 * n), abs=1e-15)
            p = SimplexPoint(0.3, 0.8)
            assert riemann_error(q, p, n) == pytest.approx(0.25 / (2 * n), abs=1e-15)

    def test_custom_uses_quadrature(self):
        q = P.custom(lambda t: np.asarray(t) ** 2, 1.0)
        p = SimplexPoint(0.1, 0.7)
        assert propagator_exact(q, p) == pytest.approx(math.exp(-(0.7**3 - 0.1**3) / 3), abs=1e-10)

    def test_simplex(self):
        with pytest.raises(DomainError):
            SimplexPoint(0.0, 0.5)
        with pytest.raises(DomainError):
            SimplexPoint(0.6, 0.5)

    @pytest.mark.parametrize("q", SMOOTH, ids=lambda q: q.kind)
    def test_sandwich_pointwise(self, q):
        rng = np.random.default_rng(1)
        for _ in range(20):
            s, t = np.sort(rng.uniform(1e-3, 1.0, 2))
            n = int(rng.integers(1, 200))
            x = float(integral(q, s, t))
            y = direct_left_sum(q, s, t, n)
            d = abs(math.exp(-x) - math.exp(-y))
            assert math.exp(-max(x, y)) * abs(x - y) <= d + 1e-15
            assert d <= abs(x - y) + 1e-15


class TestSup:
    def test_constant_zero(self):
        assert sup_riemann_error(P.constant(0.4), 16) == 0.0

    @pytest.mark.parametrize("n", [4, 16, 256])
    def test_linear(self, n):
        assert sup_riemann_error(P.linear(), n) == pytest.approx(1 / (2 * n), abs=1e-15)
        s, t, r = riemann_sweep(P.linear(), n, 64)
        assert np.allclose(r, (t - s) ** 2 / (2 * n), atol=1e-15)

    def test_kink_lipschitz(self):
        q = P.make_holder_potential(1.0, "kink")
        for n in (1, 2, 8, 64):
            assert sup_riemann_error(q, n) <= 1.0 / n

    @pytest.mark.parametrize("q", [P.linear(), P.holder_kink(0.5), P.weierstrass(0.3), P.cantor()], ids=lambda q: q.kind)
    def test_monotone_refinement(self, q):
        vals = [sup_riemann_error(q, 8, d) for d in (64, 128, 256)]
        assert vals[0] <= vals[1] <= vals[2]

    def test_cantor_window_floor(self):
        q = P.cantor()
        for m in (2, 3):
            eps, _ = cantor_window(m)
            assert sup_riemann_error(q, 2**m) >= 0.5 - 2 * eps

    def test_grid_minimum(self):
        with pytest.raises(DomainError):
            sup_riemann_error(P.linear(), 4, 32)

    def test_sandwich(self):
        assert operator_error_sandwich(P.constant(0.0), 8) == (0.0, 0.0)
        lo, hi = operator_error_sandwich(P.linear(), 8)
        assert hi == pytest.approx(1 / 16) and lo == pytest.approx(math.exp(-1) / 16)


class TestWitness:
    def test_single_level(self):
        q = slow_witness([(8, 0.1)])
        assert q.sup_norm == pytest.approx(0.4)
        assert float(q.antideriv(1.0)) == pytest.approx(0.2)
        assert direct_left_sum(q, 0.0, 1.0, 8) == 0.0
        assert corner_error(q, 8) == pytest.approx(0.2)

    def test_empty(self):
        q = slow_witness([])
        assert q.sup_norm == 0.0 and np.all(q(GRID) == 0.0)

    def test_two_levels(self):
        q = slow_witness([(8, 0.2), (64, 0.05)])
        assert corner_error(q, 8) >= 0.2 and corner_error(q, 64) >= 0.05
        assert np.max(q(np.linspace(0, 1, 100001))) <= 1.0

    def test_continuity(self):
        q = slow_witness([(8, 0.2), (64, 0.05), (512, 0.0125)])
        x = np.linspace(0, 1, 200001)
        assert np.max(np.abs(np.diff(q(x)))) <= q.holder[1] * (x[1] - x[0]) + 1e-12

    def test_interference_detected(self):
        with pytest.raises(ConstructionError) as info:
            slow_witness([(8, 0.25), (16, 0.25)])
        assert info.value.level == 2

    def test_input_validation(self):
        with pytest.raises(DomainError):
            slow_witness([(12, 0.1)])
        with pytest.raises(DomainError):
            slow_witness([(8, 0.1), (4, 0.1)])
        with pytest.raises(DomainError):
            slow_witness([(8, 0.1), (16, 0.2)])


class TestBridge:
    def test_shift(self):
        s = shift_matrix(4, 1)
        assert np.array_equal(s @ np.arange(4.0), [0.0, 0.0, 1.0, 2.0])

    def test_commuting_zero(self):
        r = discretized_bridge(P.constant(0.0), 64, 0.5, 4)
        assert r.matrix_error == 0.0 == r.scalar_error

    def test_commuting_constant(self):
        r = discretized_bridge(P.constant(0.7), 64, 0.5, 4)
        assert r.scalar_error == 0.0 and r.matrix_error <= 1e-14

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_linear_agreement(self, n):
        r = discretized_bridge(P.linear(), 256, 0.5, n)
        assert r.gap <= 2 / 256
        assert r.matrix_error > 0

    def test_alignment(self):
        with pytest.raises(AlignmentError):
            discretized_bridge(P.linear(), 256, 1.0, 256 * 2)
        with pytest.raises(AlignmentError):
            discretized_bridge(P.linear(), 256, 0.3, 4)
        with pytest.raises(DomainError):
            discretized_bridge(P.linear(), 8192, 0.5, 4)
