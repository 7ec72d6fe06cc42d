import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.amplifier import (
    AmplifierSpec,
    ExponentInput,
    amplifier_primes,
    balance_report,
    diagonal_estimate,
    exponent_calculator,
    moment_S,
    plancherel_check,
    quoted_u_n3,
    script_L,
)
from shiftconv.arith import CoeffTable, characters, dirichlet_char, euler_phi, named_table
from shiftconv.errors import CoverageError, DomainError, UnsupportedModulusError

TH = Fraction(7, 64)


@pytest.fixture(scope="module")
def delta():
    return named_table("delta", 5000)


def one_coefficient(g0: int, bound: int = 5000) -> CoeffTable:
    vals = np.zeros(bound + 1, dtype=complex)
    vals[g0] = 1.0
    return CoeffTable("single", 2, bound, vals)


def test_amplifier_primes_examples():
    assert amplifier_primes(10, 5) == [11, 13, 17, 19]
    assert amplifier_primes(2, 2) == [3]
    assert amplifier_primes(10, 11) == [13, 17, 19]
    with pytest.raises(DomainError):
        amplifier_primes(1.5, 5)


def test_spec_validation():
    with pytest.raises(UnsupportedModulusError):
        AmplifierSpec(6, 0, 10, 100)
    with pytest.raises(DomainError):
        AmplifierSpec(5, 4, 10, 100)
    with pytest.raises(DomainError):
        AmplifierSpec(101, 0, 3, 100)  # L below log q
    with pytest.raises(DomainError):
        AmplifierSpec(5, 0, 10, 100, w=0.5)


def test_script_L_term_oracle(delta):
    spec = AmplifierSpec(5, 2, 10, 200, w=0.3j)
    xi = dirichlet_char(5, 2)
    W = spec.weight
    terms = []
    for g in range(1, 1000):
        y = g / 200
        wt = float(W(y))
        if wt:
            terms.append(delta(g) * xi(g) / math.sqrt(g) * wt * cmath.exp(-0.3j * math.log(y)))
    oracle = sum(terms)
    assert abs(script_L(delta, xi, spec) - oracle) <= 1e-13


def test_script_L_single_term():
    T = one_coefficient(301)
    spec = AmplifierSpec(5, 0, 10, 200)
    y = 301 / 200
    expected = 1 / math.sqrt(301) * float(spec.weight(y))
    assert script_L(T, dirichlet_char(5, 0), spec) == pytest.approx(expected, rel=1e-14)
    spun = AmplifierSpec(5, 0, 10, 200, w=0.5j)
    assert abs(script_L(T, dirichlet_char(5, 0), spun)) == pytest.approx(expected, rel=1e-14)


def test_script_L_checks_modulus_and_coverage(delta):
    spec = AmplifierSpec(5, 0, 10, 200)
    with pytest.raises(DomainError):
        script_L(delta, dirichlet_char(7, 0), spec)
    with pytest.raises(CoverageError):
        script_L(delta.truncated(100), dirichlet_char(5, 0), spec)


def test_moment_lower_bound_and_size(delta):
    for q in (5, 7, 13):
        for idx in range(euler_phi(q)):
            r = moment_S(delta, q, idx, AmplifierSpec(q, idx, 10, 500))
            assert r.S - r.lower_bound >= -1e-12 * r.S
    r = moment_S(delta, 5, 2, AmplifierSpec(5, 2, 10, 500))
    assert r.amplifier_size == 4
    assert r.lower_bound == pytest.approx(16 * abs(r.script_L_chi) ** 2, rel=1e-15)


def test_moment_matches_direct_character_sum(delta):
    spec = AmplifierSpec(7, 1, 10, 300)
    primes = amplifier_primes(10, 7)
    chi = spec.chi
    direct = 0.0
    for xi in characters(7):
        amp = sum(xi(l) * np.conj(chi(l)) for l in primes)
        direct += abs(amp) ** 2 * abs(script_L(delta, xi, spec)) ** 2
    assert moment_S(delta, 7, 1, spec).S == pytest.approx(direct, rel=1e-12)


def test_moment_q3_by_hand():
    # one coefficient at g0: every character contributes the same |L|^2 = K, amplifier {2}
    T = one_coefficient(200)
    for idx in (0, 1):
        spec = AmplifierSpec(3, idx, 2, 150)
        K = float(spec.weight(200 / 150)) ** 2 / 200
        r = moment_S(T, 3, idx, spec)
        assert r.amplifier_size == 1
        assert r.S == pytest.approx(2 * K, rel=1e-14)
        assert r.lower_bound == pytest.approx(K, rel=1e-14)
        assert r.ratio == pytest.approx(2, rel=1e-14)


def test_moment_spec_mismatch(delta):
    with pytest.raises(DomainError):
        moment_S(delta, 7, 0, AmplifierSpec(5, 0, 10, 100))


def test_plancherel_single_l():
    lhs, rhs = plancherel_check(7, 2, inner_values={3: 2 - 1j})
    assert lhs == pytest.approx(6 * 5, rel=1e-14)
    assert rhs == pytest.approx(6 * 5, rel=1e-14)


def test_plancherel_two_residues():
    lhs, rhs = plancherel_check(11, 3, inner_values={2: 1.0, 5: 1j})
    assert lhs == pytest.approx(rhs, rel=1e-14)
    assert rhs == pytest.approx(10 * 2, rel=1e-14)


def test_plancherel_default_amplifier():
    lhs, rhs = plancherel_check(5, 1, L=10)
    assert lhs == pytest.approx(rhs, rel=1e-13)
    with pytest.raises(DomainError):
        plancherel_check(5, 1)
    with pytest.raises(DomainError):
        plancherel_check(5, 1, inner_values={10: 1.0})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_plancherel_random_q7(idx, seed):
    rng = random.Random(seed)
    ls = rng.sample([l for l in range(1, 300) if l % 7], rng.randint(1, 15))
    A = {l: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for l in ls}
    lhs, rhs = plancherel_check(7, idx, inner_values=A)
    assert abs(lhs - rhs) <= 1e-12 * max(rhs, 1.0)


def test_diagonal_stable_in_Y(delta):
    ratios = [diagonal_estimate(delta, 5, 10, Y).ratio for Y in (250, 500, 1000)]
    assert all(np.isfinite(ratios))
    assert max(ratios) / min(ratios) <= 2


def test_diagonal_ratio_drops_with_L(delta):
    small = diagonal_estimate(delta, 5, 10, 500)
    big = diagonal_estimate(delta, 5, 20, 500)
    assert big.ratio < small.ratio
    assert big.ratio / small.ratio == pytest.approx(0.5, abs=0.1)


def test_diagonal_against_pair_enumeration(delta):
    L, Y = 3.0, 200
    spec = AmplifierSpec(7, 1, L, Y)
    chi = spec.chi
    W = spec.weight
    primes = amplifier_primes(L, 7)
    coef = {g: delta(g) / math.sqrt(g) * float(W(g / Y)) for g in range(1, 1000) if W(g / Y) > 0}
    total = 0j
    for l1 in primes:
        for l2 in primes:
            for g1, a in coef.items():
                if (l1 * g1) % l2 == 0 and (l1 * g1) // l2 in coef:
                    total += np.conj(chi(l1)) * chi(l2) * a * np.conj(coef[l1 * g1 // l2])
    got = diagonal_estimate(delta, 7, L, Y, chi_index=1).diagonal
    assert abs(got - total) <= 1e-12 * abs(total)


def test_exponent_examples():
    assert exponent_calculator(ExponentInput(4, TH, 0))[2] == Fraction(39, 64)
    u = Fraction(1, 4) - TH / 2
    assert exponent_calculator(ExponentInput(4, TH, u))[0] == Fraction(3, 8) + TH / 4
    ub = float(quoted_u_n3(float(TH)))
    assert ub == pytest.approx(0.0253456, abs=1e-7)
    e = exponent_calculator(ExponentInput(3, float(TH), ub))[0]
    assert abs(e - (13 + 2 * 7 / 64) / (2 * (14 - 4 * 7 / 64))) <= 1e-15
    assert e == pytest.approx(0.4873272, abs=1e-7)


def test_exponent_input_validation():
    with pytest.raises(DomainError):
        ExponentInput(1)
    with pytest.raises(DomainError):
        ExponentInput(3, Fraction(3, 4))
    with pytest.raises(DomainError):
        ExponentInput(3, TH, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_final_exponent_is_v_shaped(n):
    rep = balance_report(n, TH)
    us = [Fraction(k, 200) for k in range(201)]
    e = [exponent_calculator(ExponentInput(n, TH, u))[2] for u in us]
    for a, b, u in zip(e, e[1:], us):
        if u + Fraction(1, 200) <= rep.u_star:
            assert b <= a
        elif u >= rep.u_star:
            assert b >= a


def test_balance_report_small_n():
    r = balance_report(3, TH)
    assert 0 < r.u_star < 1
    assert r.e_diag == r.e_offdiag == r.e_final
    assert r.quoted_u == quoted_u_n3(TH)
    assert r.quoted_matches is False
    assert r.u_star == (1 - 6 * TH) / (14 + 4 * TH)
    assert r.beats_convexity


@pytest.mark.parametrize("n", [4, 5, 8])
def test_balance_report_clamps_for_large_n(n):
    r = balance_report(n, TH)
    assert r.u_star == 0
    assert r.e_final == Fraction(n, 4) * (Fraction(1, 2) + TH)
    assert r.quoted_u is None and r.quoted_matches is None


def test_theta_zero_collapse():
    for n in (2, 3, 4, 5):
        assert exponent_calculator(ExponentInput(n, 0, 0))[1] == Fraction(n, 8)
