import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.arith import CoeffTable, named_table
from shiftconv.errors import CoverageError, DomainError
from shiftconv.oracles import linear_pairs_bruteforce, quad_shift_box
from shiftconv.quadforms import QuadraticForm, SphericalPoly, theta_coeffs
from shiftconv.shifted import (
    FourierSeries,
    HypothesisWarning,
    WeightFn,
    alias_free_size,
    assemble_projected_series,
    contributing_pairs,
    fourier_unfold_check,
    growth_experiment,
    growth_fit,
    growth_prediction,
    linear_shift_sum,
    quad_shift_sum,
)

BUMP = WeightFn("compact_bump", 1.0, 1.0)
X2 = QuadraticForm.diagonal(1)
SUM2 = QuadraticForm.diagonal(1, 1)


def test_weight_shapes():
    g = WeightFn("gaussian_bump", 2.0, 0.5)
    assert g(2.0) == pytest.approx(1.0)
    assert g(2 * math.e) == pytest.approx(math.exp(-2.0))
    assert BUMP(1.0) == 1.0
    assert BUMP(0.5) == 0 and BUMP(2.0) == 0 and BUMP(1.999) > 0
    assert BUMP(-1.0) == 0
    with pytest.raises(DomainError):
        WeightFn("box", 1, 1)


def test_empty_support_gives_zero(delta_small):
    # support [Y/2, 2Y] around Y = 1 contains only m = 1, which f(a) + 5 never hits
    assert quad_shift_sum(delta_small, X2, SphericalPoly.one(1), 5, 1.0, BUMP) == 0


def test_odd_polynomial_cancels(delta_small):
    p = SphericalPoly.parse(1, "1:1")
    for alpha in (1, 3, -2):
        assert quad_shift_sum(delta_small, X2, p, alpha, 300, BUMP) == 0


def test_quadratic_routes_agree_gaussian():
    T = named_table("delta", 600_000)
    W = WeightFn("gaussian_bump", 1.0, 1.0)
    one = SphericalPoly.one(1)
    a = quad_shift_sum(T, X2, one, 1, 100, W, route="lattice")
    b = quad_shift_sum(T, X2, one, 1, 100, W, route="theta")
    assert abs(a - b) <= 1e-12 * abs(b)


@pytest.mark.parametrize("alpha", [1, -1, 2, -2, 5])
@pytest.mark.parametrize(
    "f",
    [X2, SUM2, QuadraticForm.from_upper(2, [2, 1, 2]), QuadraticForm.diagonal(1, 1, 1)],
    ids=["x2", "sum2", "hex", "sum3"],
)
def test_quadratic_routes_and_box_oracle(f, alpha, delta_small):
    one = SphericalPoly.one(f.k)
    a = quad_shift_sum(delta_small, f, one, alpha, 400, BUMP, route="lattice")
    b = quad_shift_sum(delta_small, f, one, alpha, 400, BUMP, route="theta")
    c = quad_shift_box(delta_small, f, alpha, 400, BUMP)
    assert abs(a - b) <= 1e-12 * abs(b)
    assert abs(a - c) <= 1e-12 * abs(c)
    assert abs(a.imag) <= 1e-12 * abs(a)


def test_quadratic_routes_large_Y():
    T = named_table("delta", 20_001)
    one = SphericalPoly.one(2)
    a = quad_shift_sum(T, SUM2, one, 2, 10_000, BUMP, route="lattice")
    b = quad_shift_sum(T, SUM2, one, 2, 10_000, BUMP, route="theta")
    assert abs(a - b) <= 1e-12 * abs(b)


def test_quadratic_coverage(delta_small):
    with pytest.raises(CoverageError):
        quad_shift_sum(delta_small, X2, SphericalPoly.one(1), 1, 5000, BUMP)
    with pytest.raises(DomainError):
        quad_shift_sum(delta_small, X2, SphericalPoly.one(1), 0, 50, BUMP)


def test_linear_disjoint_supports(delta_small):
    far = WeightFn("compact_bump", 1000.0, 1.0)
    assert linear_shift_sum(delta_small, delta_small, 1, 1, 1, 1.0, BUMP, far) == 0


def test_linear_examples(delta_small):
    a = linear_shift_sum(delta_small, delta_small, 1, 1, 1, 50, BUMP, BUMP)
    b = linear_pairs_bruteforce(delta_small, delta_small, 1, 1, 1, 50, BUMP, BUMP)
    assert abs(a - b) <= 1e-12 * max(abs(b), 1e-300)
    a = linear_shift_sum(delta_small, delta_small, 2, 3, 1, 300, BUMP, BUMP)
    b = linear_pairs_bruteforce(delta_small, delta_small, 2, 3, 1, 300, BUMP, BUMP)
    assert abs(a - b) <= 1e-12 * abs(b)


def test_linear_scan_vs_pairs_all_small_moduli(delta_small, sym2_small):
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        for l1 in range(1, 11):
            for l2 in range(1, 11):
                for alpha in (1, -1, 5):
                    a = linear_shift_sum(delta_small, sym2_small, l1, l2, alpha, 300, BUMP, BUMP)
                    b = linear_pairs_bruteforce(delta_small, sym2_small, l1, l2, alpha, 300, BUMP, BUMP)
                    worst = max(worst, abs(a - b) / max(abs(b), 1e-12))
    assert worst <= 1e-12


def test_linear_hypothesis_warning(delta_small):
    with pytest.warns(HypothesisWarning):
        linear_shift_sum(delta_small, delta_small, 2, 4, 1, 100, BUMP, BUMP)
    with pytest.warns(HypothesisWarning):
        linear_shift_sum(delta_small, delta_small, 3, 2, 3, 100, BUMP, BUMP)


def test_scaling_leaves_pairs_unchanged():
    for l1, l2, alpha in ((2, 3, 1), (5, 7, -2), (1, 4, 3)):
        base = contributing_pairs(l1, l2, alpha, (1, 500))
        for t in (2, 3, 7):
            scaled = contributing_pairs(t * l1, t * l2, t * alpha, (1, 500))
            assert np.array_equal(base, scaled)


def test_real_tables_give_real_sums(delta_small, sym2_small):
    v = linear_shift_sum(delta_small, sym2_small, 3, 5, 2, 400, BUMP, BUMP)
    assert abs(v.imag) <= 1e-12 * max(abs(v), 1e-300)


def test_assembled_series_examples(delta_small):
    far = WeightFn("compact_bump", 1000.0, 1.0)
    assert len(assemble_projected_series(delta_small, 2, far, 1.0, 10)) == 0
    vals = np.zeros(101, dtype=complex)
    vals[7] = 1.0
    single = CoeffTable("single", 2, 100, vals)
    F = assemble_projected_series(single, 2, BUMP, 6.0, 100)
    assert list(F.coeffs) == [7]
    F = assemble_projected_series(delta_small, 2, BUMP, 100, 1000)
    for g in (51, 77, 100, 150, 199):
        expected = delta_small(g) / math.sqrt(g) * math.exp(2 * math.pi * g / 100) * BUMP(g / 100)
        assert F.get(g) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        assemble_projected_series(delta_small, 3, BUMP, 100, 1000)


def test_unfold_trivial_cases():
    F = FourierSeries({1: 1.0}, 1)
    assert fourier_unfold_check(F, F, 0, 8) == (pytest.approx(1), pytest.approx(1))
    lhs, rhs = fourier_unfold_check(F, F, 5, 8)
    assert abs(lhs) < 1e-15 and rhs == 0
    with pytest.raises(DomainError):
        fourier_unfold_check(F, F, 0, 4)


@pytest.mark.parametrize("name", ["delta", "sym2"])
@pytest.mark.parametrize("f", [X2, SUM2], ids=["x2", "sum2"])
def test_three_way_unfolding(name, f):
    Y, M = 100.0, 2000
    T = named_table(name, M + 2)
    one = SphericalPoly.one(f.k)
    G = FourierSeries.from_theta(theta_coeffs(f, one, M).r, Y)
    F = assemble_projected_series(T, T.degree, BUMP, Y, M)
    N = alias_free_size(F, G)
    assert N > 2 * (F.truncation + G.truncation) and N & (N - 1) == 0
    for alpha in (1, 2):
        lhs, rhs = fourier_unfold_check(F, G, alpha, N)
        direct = math.exp(2 * math.pi * alpha / Y) * quad_shift_sum(T, f, one, alpha, Y, BUMP)
        assert abs(lhs - rhs) <= 1e-9 * abs(direct)
        assert abs(rhs - direct) <= 1e-9 * abs(direct)


@settings(max_examples=30, deadline=None)
@given(
    st.dictionaries(st.integers(-20, 20), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), max_size=8),
    st.dictionaries(st.integers(-20, 20), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), max_size=8),
    st.integers(-45, 45),
)
def test_unfold_random_sparse(fc, gc, alpha):
    F, G = FourierSeries(fc, 20), FourierSeries(gc, 20)
    lhs, rhs = fourier_unfold_check(F, G, alpha, alias_free_size(F, G))
    assert abs(lhs - rhs) <= 1e-10 * (1 + sum(abs(v) for v in fc.values()) * sum(abs(v) for v in gc.values()))


def test_growth_fit_synthetic():
    Ys = [1e3, 3e3, 1e4, 3e4, 1e5]
    fit = growth_fit([(Y, Y**0.37) for Y in Ys])
    assert fit.slope == pytest.approx(0.37, abs=1e-10)
    assert growth_fit([(Y, 5.0) for Y in Ys]).slope == pytest.approx(0, abs=1e-12)
    with pytest.raises(DomainError):
        growth_fit([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(DomainError):
        growth_fit([(1, 1), (2, 0), (3, 3), (4, 1)])


def test_growth_prediction_values():
    assert growth_prediction(1, 7 / 64) == 0
    assert growth_prediction(2, 7 / 64) == pytest.approx(0.25)
    assert growth_prediction(2, 0.6) == pytest.approx(0.3)


def test_growth_experiment_below_prediction():
    T = named_table("delta", 200_001)
    pts, fit = growth_experiment(T, X2, 1, [1e3, 3e3, 1e4, 3e4, 1e5])
    assert len(pts) == 5
    assert fit.slope <= growth_prediction(1) + 0.15
