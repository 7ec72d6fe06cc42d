import math

import mpmath
import numpy as np
import pytest

from shiftconv.arith import CoeffTable, coeff_from_satake, delta_rep, formal_ones_rep, named_table
from shiftconv.errors import CoverageError, DomainError
from shiftconv.mellin import (
    MellinSpec,
    constant_coeff_mellin_closed,
    constant_coeff_mellin_numeric,
    dirichlet_series_D,
    gamma_product,
    sym_square_partial,
)
from shiftconv.quadforms import QuadraticForm, SphericalPoly
from shiftconv.special import WhittakerParams, whittaker_mellin_lhs

X2 = QuadraticForm.diagonal(1)
SUM2 = QuadraticForm.diagonal(1, 1)
ONE1 = SphericalPoly.one(1)


@pytest.fixture(scope="module")
def delta_table():
    return named_table("delta", 4000)


def single_term(bound=50):
    vals = np.zeros(bound + 1, dtype=complex)
    vals[1] = 1.0
    return CoeffTable("single", 2, bound, vals)


def test_spec_validation(delta_table):
    with pytest.raises(DomainError):
        MellinSpec(delta_table, X2, SphericalPoly.one(2), 0.5, 0.0, 3)
    with pytest.raises(DomainError):
        MellinSpec(delta_table, X2, ONE1, 0.5, 0.0, 3, exponent="other")
    with pytest.raises(DomainError):
        MellinSpec(delta_table, X2, ONE1, 0.5, 0.0, -2)


def test_closed_equals_numeric_central_case(delta_table):
    spec = MellinSpec(delta_table.truncated(2000), X2, ONE1, 0.5, 0.0, 3.0)
    a = constant_coeff_mellin_closed(spec, 2000).value
    b = constant_coeff_mellin_numeric(spec, 2000).value
    assert a != 0
    assert abs(a - b) / abs(a) <= 1e-6


@pytest.mark.parametrize("kappa,nu", [(0.5, 0.0), (0.0, 0.3), (0.25, 0.1j)])
@pytest.mark.parametrize("s", [2.0, 3.0, 2.5 + 1j])
@pytest.mark.parametrize("exponent", ["stated", "derived"])
def test_closed_equals_numeric_grid(delta_table, kappa, nu, s, exponent):
    spec = MellinSpec(delta_table, X2, ONE1, kappa, nu, s, exponent)
    a = constant_coeff_mellin_closed(spec, 400).value
    b = constant_coeff_mellin_numeric(spec, 400).value
    assert abs(a - b) <= 1e-6 * abs(a)


def test_single_term_reduces_to_whittaker_mellin():
    T = single_term()
    for kappa, nu, s in [(0.5, 0.0, 3.0), (0.0, 0.3, 2.0), (0.2, 0.4j, 1.5)]:
        spec = MellinSpec(T, X2, ONE1, kappa, nu, s)
        w = spec.w
        # a = +-1 both land on m = 1
        expected = 2 * (4 * math.pi) ** (-w) * whittaker_mellin_lhs(WhittakerParams(kappa, nu), w)
        got = constant_coeff_mellin_numeric(spec, 50).value
        assert abs(got - expected) <= 1e-8 * abs(expected)
        assert constant_coeff_mellin_closed(spec, 50).value == pytest.approx(2 * gamma_product(spec), rel=1e-14)


def test_gamma_recursion_under_shift():
    T = single_term()
    for kappa, nu in [(0.5, 0.0), (0.0, 0.3)]:
        a = MellinSpec(T, X2, ONE1, kappa, nu, 2.0)
        b = MellinSpec(T, X2, ONE1, kappa, nu, 3.0)
        w = a.w
        factor = (0.5 + w + nu) * (0.5 + w - nu) / ((1 + w - kappa) * 4 * math.pi)
        ratio = constant_coeff_mellin_closed(b, 50).value / constant_coeff_mellin_closed(a, 50).value
        assert ratio == pytest.approx(factor, rel=1e-12)


def test_nu_zero_squares_the_gamma():
    T = single_term()
    spec = MellinSpec(T, X2, ONE1, 0.5, 0.0, 3.0)
    w = spec.w
    expected = (4 * math.pi) ** (-w) * math.gamma(0.5 + w.real) ** 2 / math.gamma(1 + w.real - 0.5)
    assert gamma_product(spec) == pytest.approx(expected, rel=1e-13)


def test_odd_polynomial_vanishes(delta_table):
    spec = MellinSpec(delta_table, X2, SphericalPoly.parse(1, "1:1"), 0.5, 0.0, 3.0)
    assert constant_coeff_mellin_closed(spec, 1000).value == 0
    assert constant_coeff_mellin_numeric(spec, 1000).value == 0


def test_harmonic_cancellation_survives_integral(delta_table):
    p = SphericalPoly.parse(2, "2,0:1;0,2:-1")
    spec = MellinSpec(delta_table, SUM2, p, 0.5, 0.0, 3.0)
    assert abs(constant_coeff_mellin_closed(spec, 500).value) <= 1e-10
    assert abs(constant_coeff_mellin_numeric(spec, 500).value) <= 1e-10


def test_coverage_error(delta_table):
    spec = MellinSpec(delta_table, X2, ONE1, 0.5, 0.0, 3.0)
    with pytest.raises(CoverageError):
        constant_coeff_mellin_closed(spec, 10**5)


def test_sym_square_denominator_against_zeta():
    # Satake parameters all one: L(Sym^2) = zeta^3, so the ratio is 2 zeta(2u)^3 / zeta(4u)
    r = sym_square_partial(formal_ones_rep(2), 2.0, 20000)
    for u, got in ((2.5, r.ratio_nminus2), (2.0, r.ratio_nminus1)):
        exact = float(2 * mpmath.zeta(2 * u) ** 3 / mpmath.zeta(4 * u))
        assert abs(got - exact) <= max(r.tail_bound, 1e-8)


def test_sym_square_tail_contract():
    rep = delta_rep(10**6)
    a = sym_square_partial(rep, 1.5, 5000)
    b = sym_square_partial(rep, 1.5, 10000)
    assert abs(a.ratio_nminus2 - b.ratio_nminus2) <= a.tail_bound
    assert abs(a.ratio_nminus1 - b.ratio_nminus1) <= a.tail_bound


def test_sym_square_three_way_at_large_s():
    rep = delta_rep(10**6)
    s = 6.0
    r = sym_square_partial(rep, s, 4000)
    spec = MellinSpec(named_table("delta", 4000), X2, ONE1, 0.5, 0.0, s)
    series = constant_coeff_mellin_closed(spec, 4000).value / gamma_product(spec)
    assert np.isfinite(r.ratio_nminus2) and np.isfinite(r.ratio_nminus1)
    matches = [abs(series - x) <= 1e-10 * abs(series) for x in (r.ratio_nminus2, r.ratio_nminus1)]
    assert matches == [True, False]


def test_sym_square_needs_degree_two():
    from shiftconv.arith import sym_power_rep

    with pytest.raises(DomainError):
        sym_square_partial(sym_power_rep(delta_rep(100), 2), 3.0, 100)
    with pytest.raises(DomainError):
        sym_square_partial(delta_rep(100), 0.0, 100)


def _divisors_of_square(a: int) -> int:
    count, x, p = 1, a, 2
    while p * p <= x:
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        count *= 2 * e + 1
        p += 1
    return count * (3 if x > 1 else 1)


def test_D_formal_ones_against_direct_sum():
    T = coeff_from_satake(formal_ones_rep(2), 10**4)
    got = dirichlet_series_D(T, X2, ONE1, 3.0, 10**4).value
    oracle = 2 * math.fsum(_divisors_of_square(a) * a**-6.0 for a in range(1, 101))
    assert abs(got - oracle) <= 1e-10


def test_D_dual_paths(delta_table):
    for p in (SphericalPoly.one(2), SphericalPoly.parse(2, "2,0:1;0,2:-1"), SphericalPoly.parse(2, "1,1:1")):
        a = dirichlet_series_D(delta_table, SUM2, p, 2.5, 3000, route="theta").value
        b = dirichlet_series_D(delta_table, SUM2, p, 2.5, 3000, route="lattice").value
        assert abs(a - b) <= 1e-12


def test_D_odd_polynomial_and_bad_route(delta_table):
    assert dirichlet_series_D(delta_table, X2, SphericalPoly.parse(1, "3:1"), 3.0, 1000).value == 0
    with pytest.raises(DomainError):
        dirichlet_series_D(delta_table, X2, ONE1, 3.0, 100, route="other")
