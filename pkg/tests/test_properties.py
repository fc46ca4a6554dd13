"""Randomised invariants checked with hypothesis."""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from trotterlab.evolution import potentials
from trotterlab.evolution.cantor import CantorSpec, cantor_open_measure
from trotterlab.evolution.riemann import SimplexPoint, propagator_exact, riemann_error, trotter_propagator
from trotterlab.landau import classify_rate, curve_from_values
from trotterlab.operator_core import expm, is_accretive, op_norm
from trotterlab.trotter_engine import Ordering, trotter_product

from test_cantor import sweep_measure

small = st.floats(-1.0, 1.0, allow_nan=False)
mats = st.integers(1, 5).flatmap(lambda d: arrays(np.float64, (d, d), elements=small))


def accretive(m):
    # shift the symmetric part so that it is positive semidefinite
    lam = np.linalg.eigvalsh((m + m.T) / 2).min()
    return m + max(0.0, -lam) * np.eye(m.shape[0])


@settings(max_examples=60, deadline=None)
@given(mats, st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_semigroup_law_and_contraction(m, s, t):
    a = accretive(m)
    assert is_accretive(a)
    lhs = expm(a, s + t)
    assert np.allclose(lhs, expm(a, s) @ expm(a, t), atol=1e-10)
    assert op_norm(lhs) <= 1 + 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(lambda d: arrays(np.float64, (d,), elements=small)), st.integers(1, 64))
def test_commuting_pair_is_exact(diag, n):
    a, b = np.diag(np.abs(diag)), np.diag(np.abs(diag[::-1]))
    for ordering in Ordering:
        assert np.allclose(trotter_product(a, b, 1.0, n, ordering), expm(a + b), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.floats(0.01, 1.0), st.integers(1, 200))
def test_pointwise_sandwich(beta, u, v, n):
    q = potentials.holder_kink(beta)
    s, t = sorted((u * v, v))
    if s <= 0:
        return
    p = SimplexPoint(s, t)
    err = abs(propagator_exact(q, p) - trotter_propagator(q, p, n))
    r = riemann_error(q, p, n)
    assert np.exp(-q.sup_norm) * r - 1e-15 <= err <= r + 1e-15


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (8,), elements=st.floats(1e-6, 1.0)), st.floats(1e-3, 1e3), st.sampled_from(["n^-0.5", "1/n", "1"]))
def test_classification_scale_invariant(errs, scale, ref):
    ns = [2**k for k in range(3, 11)]
    # powers of two keep the rescaling exact in floating point
    scale = 2.0 ** round(np.log2(scale))
    assert classify_rate(curve_from_values(ns, errs), ref) == classify_rate(curve_from_values(ns, errs * scale), ref)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**12), st.integers(0, 2**12))
def test_cantor_measure_against_sweep(cap, i, j):
    s, t = sorted((Fraction(i, 2**12), Fraction(j, 2**12)))
    got = cantor_open_measure(CantorSpec(cap), (float(s), float(t)))
    assert got.exact == sweep_measure(cap, s, t)
