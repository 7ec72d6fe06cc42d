import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.errors import ConfigError, DomainError, ResourceError
from shiftconv.quadforms import (
    QuadraticForm,
    SphericalPoly,
    automorph_count,
    box_scan,
    enumerate_reps,
    form_laplacian,
    harmonicity_check,
    lattice_points,
    theta_coeffs,
)

X2 = QuadraticForm.diagonal(1)
SUM2 = QuadraticForm.diagonal(1, 1)
HEX = QuadraticForm(((1, Fraction(1, 2)), (Fraction(1, 2), 1)))


def test_form_validation():
    with pytest.raises(DomainError):
        QuadraticForm(((1, 0), (1, 1)))
    with pytest.raises(DomainError):
        QuadraticForm(((1, 2), (2, 1)))  # indefinite
    with pytest.raises(DomainError):
        QuadraticForm(((Fraction(1, 2),),))
    with pytest.raises(ConfigError):
        QuadraticForm.from_upper(2, [2, 1])
    f = QuadraticForm.from_upper(2, [2, 1, 2])
    assert f == HEX and f.upper() == [2, 1, 2]


def test_small_enumerations():
    reps = enumerate_reps(X2, 9)
    assert reps == {0: [(0,)], 1: [(-1,), (1,)], 4: [(-2,), (2,)], 9: [(-3,), (3,)]}
    r = enumerate_reps(SUM2, 2)
    assert [len(r[m]) for m in (0, 1, 2)] == [1, 4, 4]
    assert len(enumerate_reps(HEX, 1)[1]) == 6


FORMS = [
    X2,
    SUM2,
    HEX,
    QuadraticForm.diagonal(1, 2),
    QuadraticForm.from_upper(2, [4, 3, 6]),
    QuadraticForm.diagonal(1, 1, 1),
    QuadraticForm.from_upper(3, [2, 1, 0, 2, 1, 4]),
    QuadraticForm.diagonal(1, 1, 1, 1),
    QuadraticForm.from_upper(4, [2, 1, 0, 0, 2, 1, 0, 2, 1, 2]),
]


@pytest.mark.parametrize("f", FORMS, ids=lambda f: f"k{f.k}_{'_'.join(map(str, f.upper()))}")
def test_enumeration_equals_box_scan(f):
    M = {1: 10_000, 2: 2_000, 3: 300, 4: 60}[f.k]
    assert enumerate_reps(f, M) == box_scan(f, M)


def test_grouped_counts_match_total():
    f = QuadraticForm.from_upper(3, [2, 1, 0, 2, 1, 4])
    pts, _ = lattice_points(f, 200)
    th = theta_coeffs(f, SphericalPoly.one(3), 200)
    assert sum(th.exact(m) for m in range(201)) == len(pts)


def test_ceiling():
    with pytest.raises(ResourceError):
        lattice_points(QuadraticForm.diagonal(1, 1, 1), 10_000, ceiling=1000)


def test_poly_parse_and_harmonicity():
    p = SphericalPoly.parse(2, "2,0:1;0,2:-1")
    assert p.degree == 2
    assert harmonicity_check(SUM2, SphericalPoly.one(2))
    assert harmonicity_check(SUM2, p)
    q = SphericalPoly.parse(2, "2,0:1;0,2:1")
    assert not harmonicity_check(SUM2, q)
    assert form_laplacian(SUM2, q) == SphericalPoly.parse(2, "0,0:4")
    # a^2 - ab against the Laplacian of a^2 + ab + b^2 worked out by hand
    r = SphericalPoly.parse(2, "2,0:1;1,1:-1")
    inv = HEX.inverse
    lap = 2 * inv[0][0] - inv[0][1] - inv[1][0]
    assert harmonicity_check(HEX, r) == (lap == 0)
    with pytest.raises(ConfigError):
        SphericalPoly.parse(2, "garbage")


def test_theta_examples():
    th = theta_coeffs(X2, SphericalPoly.one(1), 50)
    for m in range(51):
        root = math.isqrt(m)
        expected = 1 if m == 0 else (2 if root * root == m else 0)
        assert th.exact(m) == expected
    harm = theta_coeffs(SUM2, SphericalPoly.parse(2, "2,0:1;0,2:-1"), 30)
    assert harm.exact(1) == 0
    r = theta_coeffs(SUM2, SphericalPoly.one(2), 25)
    assert r.exact(25) == 12
    assert r.exact(25) == sum(1 for a in range(-5, 6) for b in range(-5, 6) if a * a + b * b == 25)


def test_odd_harmonic_theta_vanishes():
    for f, text in ((X2, "1:1"), (SUM2, "1,0:1"), (SUM2, "3,0:1;1,2:-3"), (HEX, "1,0:2;0,1:-1")):
        p = SphericalPoly.parse(f.k, text)
        assert all(x == 0 for x in theta_coeffs(f, p, 100).numerators)


def test_automorphs():
    assert automorph_count(SUM2) == (8, 4)
    assert automorph_count(HEX) == (12, 6)
    assert automorph_count(QuadraticForm.diagonal(1, 2)) == (4, 2)
    with pytest.raises(DomainError):
        automorph_count(QuadraticForm.diagonal(1, 1, 1))


def _brute_automorphs(f):
    full = rot = 0
    for a, b, c, d in itertools.product(range(-3, 4), repeat=4):
        if abs(a * d - b * c) != 1:
            continue
        ok = all(f((a * x + b * y, c * x + d * y)) == f((x, y)) for x, y in ((1, 0), (0, 1), (1, 1)))
        if ok:
            full += 1
            rot += a * d - b * c == 1
    return full, rot


@pytest.mark.parametrize("upper", [[2, 0, 2], [2, 1, 2], [2, 0, 4], [4, 2, 6], [2, 1, 6]])
def test_automorphs_exhaustive(upper):
    f = QuadraticForm.from_upper(2, upper)
    assert automorph_count(f) == _brute_automorphs(f)


@pytest.mark.parametrize("f", [SUM2, HEX, QuadraticForm.diagonal(1, 1, 1)])
def test_average_growth_band(f):
    k = f.k
    th = theta_coeffs(f, SphericalPoly.one(k), 4000)
    r = th.r
    # mean of r(m) over dyadic blocks divided by m^{k/2-1}
    ratios = []
    for lo in (250, 500, 1000, 2000):
        block = r[lo : 2 * lo]
        ratios.append(block.mean() / lo ** (k / 2 - 1))
    assert max(ratios) / min(ratios) < 3


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(0, 3),
    st.integers(1, 4),
    st.integers(0, 60),
)
def test_binary_form_enumeration_property(a, b, c, M):
    if 4 * a * c - b * b <= 0:
        return
    f = QuadraticForm.from_upper(2, [2 * a, b, 2 * c])
    assert enumerate_reps(f, M) == box_scan(f, M)
