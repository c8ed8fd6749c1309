import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Monomial, exact_divided_difference
from expbounds.divdiff import (
    SmoothExpFamily,
    dd_family,
    dd_lower_bound_check,
    divided_difference,
    lemma2_residual_bounds,
    mean_derivative_approx,
    p_vector,
)
from expbounds.errors import InvalidUSum, NotStrictlyIncreasing
from expbounds.highprec import PrecisionConfig
from expbounds.nodes import node_sum, validate_nodes
from expbounds.verify import random_nodes

E = math.e
EXP = SmoothExpFamily()


def symmetric_dd_exp(v, f, dps=60):
    """sum_i f(v_i) / prod_{j != i}(v_i - v_j) at high precision."""
    with mpmath.workdps(dps):
        c, m = mpmath.mpf(f.c), f.m
        total = mpmath.mpf(0)
        for i, vi in enumerate(v):
            denom = mpmath.mpf(1)
            for j, vj in enumerate(v):
                if j != i:
                    denom *= mpmath.mpf(vi) - mpmath.mpf(vj)
            total += mpmath.exp(c * vi) / c**m / denom
        return float(total)


def test_family_derivatives():
    f = SmoothExpFamily(2.0, 3)
    assert f.derivative(0, 0.5) == pytest.approx(math.exp(1.0) / 8)
    assert f.derivative(3, 0.5) == pytest.approx(math.exp(1.0))
    assert f.derivative(5, 0.5) == pytest.approx(4 * math.exp(1.0))
    with pytest.raises(ValueError):
        SmoothExpFamily(0.0, 1)


@pytest.mark.parametrize(
    "v, expected",
    [((0,), 1.0), ((0, 1), E - 1), ((0, 1, 2), (E - 1) ** 2 / 2)],
)
def test_dd_fixtures(v, expected):
    assert divided_difference(v, EXP).value == pytest.approx(expected, rel=1e-14)


def test_dd_table_shape_and_diagonal():
    r = divided_difference([0, 1, 2, 3], EXP)
    assert [len(row) for row in r.table] == [4, 3, 2, 1]
    assert r.table[-1][0] == r.value
    assert r.table[1][0] == pytest.approx(E - 1)


def test_dd_matches_symmetric_formula(rng):
    for _ in range(50):
        n = int(rng.integers(1, 8))
        v = random_nodes(rng, n, -2, 2, 0.05)
        f = SmoothExpFamily(float(rng.uniform(-2, 2)) or 1.0, int(rng.integers(0, 3)))
        assert divided_difference(v, f).value == pytest.approx(symmetric_dd_exp(v, f), rel=1e-9)


def test_dd_tight_nodes_use_high_precision():
    v = [0.0, 1e-5, 2e-5, 3e-5, 4e-5]
    got = divided_difference(v, EXP).value
    assert got == pytest.approx(symmetric_dd_exp(v, EXP, dps=80), rel=1e-14)
    # the forced high-precision path gives the same
    assert divided_difference(v, EXP, PrecisionConfig()).value == got


@settings(max_examples=50)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_dd_permutation_invariant(n, seed):
    rng = np.random.default_rng(seed)
    v = random_nodes(rng, n, -2, 2, 1e-3)
    shuffled = list(rng.permutation(v))
    a = divided_difference(v, EXP).value
    b = divided_difference(shuffled, EXP).value
    assert b == pytest.approx(a, rel=1e-12)


def test_dd_rejects_repeated_nodes():
    with pytest.raises(NotStrictlyIncreasing):
        divided_difference([0, 1, 1], EXP)


@pytest.mark.parametrize("n", range(2, 8))
def test_dd_polynomials(n, rng):
    v = [Fraction(int(k)) / 7 for k in sorted(rng.choice(60, size=n, replace=False) - 30)]
    # exact reference on rationals
    assert exact_divided_difference(v, lambda a: a ** (n - 1)) == 1
    assert exact_divided_difference(v, lambda a: a ** (n - 2)) == 0
    floats = [float(a) for a in v]
    assert divided_difference(floats, Monomial(n - 1)).value == pytest.approx(1.0, rel=1e-9)
    assert divided_difference(floats, Monomial(n - 2)).value == pytest.approx(0.0, abs=1e-9)
    assert divided_difference(floats, Monomial(n - 1), PrecisionConfig()).value == pytest.approx(1.0, rel=1e-30)


@pytest.mark.parametrize(
    "v, expected",
    [((0, 1), math.exp(0.5)), ((0, 1, 2), E / 2), ((0.7,), math.exp(0.7))],
)
def test_mean_derivative_fixtures(v, expected):
    assert mean_derivative_approx(v, EXP) == pytest.approx(expected, rel=1e-15)


def test_residual_fixture_two_nodes():
    r = lemma2_residual_bounds([0, 1], EXP)
    assert r.residual == pytest.approx((E - 1) - math.exp(0.5), rel=1e-14)
    assert r.residual == pytest.approx(0.0695606, abs=1e-7)
    assert r.lo == pytest.approx(0.25 / 6, rel=1e-14)
    assert r.hi == pytest.approx(0.25 * E / 6, rel=1e-14)
    assert r.holds()


def test_residual_single_node():
    r = lemma2_residual_bounds([1.3], EXP)
    assert r == type(r)(0.0, 0.0, 0.0)


def test_residual_three_symmetric_nodes():
    r = lemma2_residual_bounds([-1, 0, 1], EXP)
    # [-1,0,1]e^a = (e - 2 + 1/e)/2, mean derivative term e^0/2!, S/2 = 1
    assert r.residual == pytest.approx((E - 2 + 1 / E) / 2 - 0.5, rel=1e-14)
    assert r.lo == pytest.approx(math.exp(-1) / 24, rel=1e-14)
    assert r.hi == pytest.approx(E / 24, rel=1e-14)
    assert r.holds()


def test_residual_negative_scale():
    r = lemma2_residual_bounds([-1.0, 0.2, 0.9, 1.5], SmoothExpFamily(-1.3, 0))
    assert r.lo <= r.residual <= r.hi


@settings(max_examples=200)
@given(st.integers(2, 6), st.floats(0.2, 2.0), st.integers(0, 2**32 - 1))
def test_residual_sandwich_property(n, c, seed):
    rng = np.random.default_rng(seed)
    v = random_nodes(rng, n, -2, 2)
    assert lemma2_residual_bounds(v, SmoothExpFamily(c, 0)).holds()


@pytest.mark.parametrize("x, p", [((1, 2, 3), (3, 4, 5)), ((0, 1), (0, 1)), ((7.5,), (0.0,))])
def test_p_vector_fixtures(x, p):
    assert p_vector(x).values == p


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=8, unique=True))
def test_p_vector_sum(xs):
    x = validate_nodes(sorted(xs))
    p = p_vector(x)
    assert node_sum(p) == (len(x) - 1) * node_sum(x)


def test_p_vector_sum_floats(rng):
    for _ in range(100):
        n = int(rng.integers(1, 8))
        x = validate_nodes(random_nodes(rng, n, -3, 3, 1e-3))
        s = node_sum(p_vector(x))
        assert s == pytest.approx((n - 1) * node_sum(x), abs=4 * n * np.spacing(max(1.0, abs(s))))


def test_dd_lower_bound_fixtures():
    r = dd_lower_bound_check([0, 1], 1.0)
    assert r.dd == pytest.approx(E - 1, rel=1e-15)
    assert r.bound == pytest.approx(math.exp(0.5), rel=1e-15)
    r = dd_lower_bound_check([0, 1, 2], 2.0)
    assert r.dd == pytest.approx(E * (E - 1) ** 2 / 2, rel=1e-15)
    assert r.bound == pytest.approx(E**2 / 2, rel=1e-15)
    assert r.dd >= r.bound


def test_dd_lower_bound_single_node():
    r = dd_lower_bound_check([0.4], 2.0)
    assert r.dd == r.bound == 1.0


def test_dd_lower_bound_family():
    f = dd_family(4, 1.5)
    assert (f.c, f.m) == (0.5, 3)
    with pytest.raises(InvalidUSum):
        dd_lower_bound_check([0, 1], 0.0)


def test_dd_lower_bound_bound_is_mean_derivative(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        x = random_nodes(rng, n, -2, 2, 1e-3)
        u = float(rng.uniform(0.2, 4))
        r = dd_lower_bound_check(x, u)
        assert r.bound == pytest.approx(math.exp(u * sum(x) / n) / math.factorial(n - 1), rel=1e-12)
        assert r.bound == pytest.approx(mean_derivative_approx(p_vector(x), dd_family(n, u)), rel=1e-12)
        assert r.dd >= r.bound - 1e-12
