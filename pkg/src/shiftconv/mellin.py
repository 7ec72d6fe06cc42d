"""Mellin transform of the constant Fourier coefficient, and the series D(s, c, f, p).

At d = 1 the transform is a sum over lattice values m = f(a) of one-dimensional
integrals

    int_0^inf exp(-2 pi m y) W_{kappa,nu}(4 pi m y) y^{w} dy/y,
    w = s + k/4 - (n-2)/2,

each of which is (4 pi m)^{-w} Gamma(1/2+w+nu) Gamma(1/2+w-nu) / Gamma(1+w-kappa).

The power of m standing in front of the integral depends on how the
integration variable is normalised.  ``"stated"`` takes |f(a)|^{-(s+k/2-(n-2)/2)}
in front of the unit-scale integral; ``"derived"`` expands the coefficient from
its definition, which leaves |f(a)|^{-(s+k/4)}.  Both routes below honour the
choice, so closed form and quadrature are compared like for like.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ._summation import csum
from ._tails import tail_from_abs
from .arith import CoeffTable, RepDescriptor, coeff_from_satake, sym_power_rep
from .errors import CoverageError, DomainError
from .quadforms import QuadraticForm, SphericalPoly, lattice_points, theta_coeffs
from .special import (
    DEFAULT_QUAD,
    QuadratureConfig,
    WhittakerParams,
    gamma_array,
    mellin_integral,
)

EXPONENTS = ("stated", "derived")


@dataclass(frozen=True)
class MellinSpec:
    table: CoeffTable
    f: QuadraticForm
    p: SphericalPoly
    kappa: float
    nu: complex
    s: complex
    exponent: str = "stated"

    def __post_init__(self):
        if self.p.k != self.f.k:
            raise DomainError("polynomial and form have different dimensions")
        if self.exponent not in EXPONENTS:
            raise DomainError(f"exponent must be one of {EXPONENTS}")
        object.__setattr__(self, "s", complex(self.s))
        # convergence at y -> 0 of every per-value integral
        if not self.w.real > abs(complex(self.nu).real) - 0.5:
            raise DomainError(f"s = {self.s} is outside the convergence region")
        if not (self.s.real + self.f.k / 4 - (self.n - 2) / 2 > -1):
            raise DomainError(f"s = {self.s} violates Re(s) + k/4 - (n-2)/2 > -1")

    @property
    def n(self) -> int:
        return self.table.degree

    @property
    def w(self) -> complex:
        """Exponent of y in the integral."""
        return self.s + self.f.k / 4 - (self.n - 2) / 2

    @property
    def f_power(self) -> complex:
        """Exponent e with |f(a)|^{-e} in front of the unit-scale integral."""
        if self.exponent == "stated":
            return self.s + self.f.k / 2 - (self.n - 2) / 2
        return self.s + self.f.k / 4

    @property
    def params(self) -> WhittakerParams:
        return WhittakerParams(self.kappa, self.nu)


@dataclass(frozen=True)
class MellinValue:
    value: complex
    tail_bound: float
    terms: int


def gamma_product(spec: MellinSpec) -> complex:
    """(4 pi)^{-w} Gamma(1/2+w+nu) Gamma(1/2+w-nu) / Gamma(1+w-kappa)."""
    w, nu = spec.w, complex(spec.nu)
    g = gamma_array([0.5 + w + nu, 0.5 + w - nu, 1 + w - spec.kappa])
    return complex((4 * math.pi) ** (-w) * g[0] * g[1] / g[2])


def _weighted_values(spec: MellinSpec, M: int) -> Dict[int, complex]:
    """{m: r_{f,p}(m) c(m)} for 1 <= m <= M, skipping zeros."""
    if M > spec.table.bound:
        raise CoverageError(f"M = {M} exceeds table bound {spec.table.bound}")
    th = theta_coeffs(spec.f, spec.p, M)
    out = {}
    for m, r in th.nonzero():
        if m == 0:
            continue
        v = float(r) * spec.table(m)
        if v != 0:
            out[m] = v
    return out


def constant_coeff_mellin_closed(spec: MellinSpec, M: int) -> MellinValue:
    vals = _weighted_values(spec, M)
    e = spec.f_power
    series = csum([v * np.exp(-e * math.log(m)) for m, v in vals.items()])
    absb = np.zeros(M)
    for m, v in vals.items():
        absb[m - 1] = abs(v)
    G = gamma_product(spec)
    tail = tail_from_abs(absb, e.real) * abs(G) if vals else 0.0
    return MellinValue(series * G, tail, len(vals))


def constant_coeff_mellin_numeric(
    spec: MellinSpec, M: int, cfg: QuadratureConfig = DEFAULT_QUAD
) -> MellinValue:
    """Quadrature of the y-integral at each lattice value m, at its own scale.

    The per-value integral at scale m is multiplied by m^{w - e}, the power
    that converts it to the normalisation selected by ``spec.exponent``.
    """
    vals = _weighted_values(spec, M)
    w, e = spec.w, spec.f_power
    params = spec.params
    terms = []
    absb = np.zeros(M)
    for m, v in sorted(vals.items()):
        # psi(i m y) = exp(-2 pi m y) and W_phi(m y) = W(4 pi m y)
        integral = mellin_integral(params, w, 4 * math.pi * m, cfg)
        terms.append(v * np.exp((w - e) * math.log(m)) * integral)
        absb[m - 1] = abs(v)
    tail = tail_from_abs(absb, e.real) * abs(gamma_product(spec)) if vals else 0.0
    return MellinValue(csum(terms), tail, len(vals))


@dataclass(frozen=True)
class SymSquareRatios:
    ratio_nminus2: complex
    ratio_nminus1: complex
    tail_bound: float


def _sym_square_ratio(sym2: CoeffTable, u: complex, M: int) -> Tuple[complex, float]:
    m = np.arange(1, M + 1)
    num = csum(sym2.take(m) * np.exp(-2 * u * np.log(m)))
    den = csum(np.exp(-4 * u * np.log(m)))
    tail_num = tail_from_abs(np.abs(sym2.values[1 : M + 1]), 2 * u.real)
    tail_den = tail_from_abs(np.ones(M), 4 * u.real, 0.0)
    ratio = 2 * num / den
    # first-order propagation of the two truncation errors
    tail = 2 * (tail_num / abs(den) + abs(num) * tail_den / abs(den) ** 2)
    return ratio, tail


def sym_square_partial(rep: RepDescriptor, s: complex, M: int) -> SymSquareRatios:
    """2 L_M(2u, Sym^2)/zeta_M(4u) at u = s + 1/2 - (n-2)/2 and at u = s + 1/2 - (n-1)/2.

    The central character is taken trivial, so its L-series is zeta.
    """
    if rep.degree != 2:
        raise DomainError("symmetric square needs a degree-2 representation")
    s = complex(s)
    n = rep.degree
    u2 = s + 0.5 - (n - 2) / 2
    u1 = s + 0.5 - (n - 1) / 2
    if min(u1.real, u2.real) <= 0.5:
        raise DomainError(f"s = {s} is outside the convergence half-plane of both series")
    sym2 = coeff_from_satake(sym_power_rep(rep, 2), M)
    r2, t2 = _sym_square_ratio(sym2, u2, M)
    r1, t1 = _sym_square_ratio(sym2, u1, M)
    return SymSquareRatios(r2, r1, max(t1, t2))


def dirichlet_series_D(
    table: CoeffTable,
    f: QuadraticForm,
    p: SphericalPoly,
    s: complex,
    M: int,
    route: str = "theta",
) -> MellinValue:
    """sum_{0 < f(a) <= M} p(a) c(f(a)) f(a)^{-s}."""
    s = complex(s)
    if p.k != f.k:
        raise DomainError("polynomial and form have different dimensions")
    if M > table.bound:
        raise CoverageError(f"M = {M} exceeds table bound {table.bound}")
    if route == "theta":
        th = theta_coeffs(f, p, M)
        m = np.arange(1, M + 1)
        coef = th.r[1:] * table.take(m)
        terms = coef * np.exp(-s * np.log(m))
        absb = np.abs(coef)
    elif route == "lattice":
        pts, vals = lattice_points(f, M)
        pv, D = p.evaluate_scaled(pts)
        pw = np.array(pv, dtype=float) / D
        keep = vals > 0
        vals, pw = vals[keep], pw[keep]
        terms = pw * table.take(vals) * np.exp(-s * np.log(vals))
        absb = np.zeros(M)
        np.add.at(absb, vals - 1, np.abs(pw * table.take(vals)))
    else:
        raise DomainError(f"unknown route {route!r}")
    tail = tail_from_abs(absb, s.real)
    return MellinValue(csum(terms), tail, int(np.count_nonzero(terms)))
