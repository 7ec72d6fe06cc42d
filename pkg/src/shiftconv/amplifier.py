"""Amplified second moment over characters mod q, and its exponent bookkeeping."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Dict, List, Mapping, Tuple

import numpy as np

from ._summation import csum, rsum
from .arith import CoeffTable, DirichletChar, characters, dirichlet_char, euler_phi, is_prime, prime_sieve
from .errors import CoverageError, DomainError, UnsupportedModulusError
from .shifted import WeightFn

DIAGONAL_EPS = 0.01


@dataclass(frozen=True)
class AmplifierSpec:
    q: int
    chi_index: int
    L: float
    Y: float
    w: complex = 0j
    weight: WeightFn = WeightFn("compact_bump", 1.0, 1.0)

    def __post_init__(self):
        if not is_prime(self.q):
            raise UnsupportedModulusError(f"q = {self.q} is not prime")
        if not 0 <= self.chi_index < self.q - 1:
            raise DomainError(f"chi_index must lie in 0..{self.q - 2}")
        if self.L < max(2.0, math.log(self.q)):
            raise DomainError(f"L = {self.L} is below max(2, log q)")
        if self.Y <= 0:
            raise DomainError("Y must be positive")
        w = complex(self.w)
        if w.real != 0:
            raise DomainError("w must be purely imaginary")
        object.__setattr__(self, "w", w)

    @property
    def chi(self) -> DirichletChar:
        return dirichlet_char(self.q, self.chi_index)


@dataclass(frozen=True)
class ExponentInput:
    n: int
    theta0: Real = Fraction(7, 64)
    u: Real = 0
    delta0: Real | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be >= 2")
        if not 0 <= self.theta0 <= Fraction(1, 2):
            raise DomainError("theta0 must lie in [0, 1/2]")
        if not 0 <= self.u <= 1:
            raise DomainError("u must lie in [0, 1]")


def amplifier_primes(L: float, q: int) -> List[int]:
    """Primes l with L <= l <= 2L and l not dividing q."""
    if L < 2:
        raise DomainError("L must be >= 2")
    top = int(math.floor(2 * L))
    return [p for p in prime_sieve(top).tolist() if p >= L and q % p != 0]


def _weighted_coeffs(table: CoeffTable, spec: AmplifierSpec) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma, c(gamma) gamma^{-1/2} weight(gamma/Y) (gamma/Y)^{-w}) over the weight support."""
    lo, hi = spec.weight.index_range(spec.Y)
    if hi > table.bound:
        raise CoverageError(f"weight support reaches {hi}, table bound is {table.bound}")
    g = np.arange(lo, hi + 1)
    y = g / spec.Y
    wt = spec.weight(y)
    nz = wt != 0
    g, y, wt = g[nz], y[nz], wt[nz]
    return g, table.take(g) / np.sqrt(g) * wt * np.exp(-spec.w * np.log(y))


def script_L(table: CoeffTable, xi: DirichletChar, spec: AmplifierSpec) -> complex:
    """sum_g c(g) xi(g) g^{-1/2} weight(g/Y) (g/Y)^{-w}."""
    if xi.modulus != spec.q:
        raise DomainError("character modulus differs from q")
    g, v = _weighted_coeffs(table, spec)
    return csum(v * xi.take(g))


@dataclass(frozen=True)
class MomentResult:
    S: float
    lower_bound: float
    amplifier_size: int
    script_L_chi: complex

    @property
    def ratio(self) -> float:
        return self.S / self.lower_bound if self.lower_bound else math.inf


def moment_S(table: CoeffTable, q: int, chi_index: int, spec: AmplifierSpec) -> MomentResult:
    """sum over all xi mod q of |sum_l xi(l) conj(chi)(l)|^2 |script_L_xi|^2."""
    if (q, chi_index) != (spec.q, spec.chi_index):
        raise DomainError("q and chi_index disagree with the amplifier spec")
    chi = spec.chi
    primes = amplifier_primes(spec.L, q)
    g, v = _weighted_coeffs(table, spec)
    # bucket the coefficient sum by residue class, then pair with each character
    buckets = np.zeros(q, dtype=complex)
    np.add.at(buckets, g % q, v)
    terms = []
    L_chi = 0j
    for xi in characters(q):
        amp = csum([xi(l) * np.conj(chi(l)) for l in primes])
        Lxi = csum(xi.values * buckets)
        if xi.index == chi_index:
            L_chi = Lxi
        terms.append(abs(amp) ** 2 * abs(Lxi) ** 2)
    S = rsum(terms)
    return MomentResult(S, len(primes) ** 2 * abs(L_chi) ** 2, len(primes), L_chi)


def plancherel_check(
    q: int,
    chi_index: int,
    L: float | None = None,
    inner_values: Mapping[int, complex] | None = None,
) -> Tuple[float, float]:
    """Both sides of sum_xi |sum_l xi(l) conj(chi)(l) A_l|^2 = phi(q) sum_x |sum_{l = x} conj(chi)(l) A_l|^2.

    ``inner_values`` maps integers l coprime to q to the amplitudes A_l.  When
    it is omitted the amplifier primes for L are used with A_l = 1.
    """
    chi = dirichlet_char(q, chi_index)
    if inner_values is None:
        if L is None:
            raise DomainError("give either L or inner_values")
        inner_values = {l: 1.0 for l in amplifier_primes(L, q)}
    for l in inner_values:
        if math.gcd(l, q) != 1:
            raise DomainError(f"l = {l} is not coprime to q = {q}")
    items = sorted(inner_values.items())
    lhs = rsum(
        [abs(csum([xi(l) * np.conj(chi(l)) * A for l, A in items])) ** 2 for xi in characters(q)]
    )
    by_res: Dict[int, List[complex]] = {}
    for l, A in items:
        by_res.setdefault(l % q, []).append(np.conj(chi(l)) * A)
    rhs = euler_phi(q) * rsum([abs(csum(v)) ** 2 for _, v in sorted(by_res.items())])
    return lhs, rhs


@dataclass(frozen=True)
class DiagonalResult:
    diagonal: complex
    ratio: float
    amplifier_size: int


def diagonal_estimate(
    table: CoeffTable,
    q: int,
    L: float,
    Y: float,
    chi_index: int = 0,
    weight: WeightFn = WeightFn("compact_bump", 1.0, 1.0),
    w: complex = 0j,
) -> DiagonalResult:
    """Diagonal l1 g1 = l2 g2 of the opened moment, normalised by its expected size.

    The diagonal enters with prefactor q^{1+eps}/L^2 and is expected to be
    O(q^{1+eps}/L); the ratio of the two is |diagonal| / L.
    """
    spec = AmplifierSpec(q, chi_index, L, Y, w, weight)
    primes = amplifier_primes(L, q)
    if not primes:
        return DiagonalResult(0j, 0.0, 0)
    g, v = _weighted_coeffs(table, spec)
    coef = dict(zip(g.tolist(), v.tolist()))
    chi = spec.chi
    terms = []
    for l1 in primes:
        for l2 in primes:
            # l1 g1 = l2 g2 with distinct primes forces g1 = l2 t, g2 = l1 t
            phase = np.conj(chi(l1)) * chi(l2)
            if l1 == l2:
                terms.extend(phase * abs(x) ** 2 for x in coef.values())
                continue
            for t in range(1, max(coef) // max(l1, l2) + 1):
                a, b = coef.get(l2 * t), coef.get(l1 * t)
                if a is not None and b is not None:
                    terms.append(phase * a * np.conj(b))
    diag = csum(terms)
    return DiagonalResult(diag, abs(diag) / L, len(primes))


# ---------------------------------------------------------------------------
# exponent algebra, L = q^u


def exponent_calculator(inp: ExponentInput) -> Tuple[Real, Real, Real]:
    """(e_diag, e_offdiag, e_final) for |L(1/2)| << q^{e_diag} + q^{e_offdiag}."""
    n, th, u = inp.n, inp.theta0, inp.u
    exact = all(isinstance(x, (int, Fraction)) for x in (th, u))
    if exact:
        th, u = Fraction(th), Fraction(u)
    else:
        th, u = float(th), float(u)
    e_diag = (1 - u) / 2
    e_off = n * (0.5 + th) / 4 if not exact else Fraction(n, 4) * (Fraction(1, 2) + th)
    e_off += u * (th + (Fraction(5, 2) if exact else 2.5)) / 2
    return e_diag, e_off, max(e_diag, e_off)


@dataclass(frozen=True)
class BalanceReport:
    u_star: Real
    e_diag: Real
    e_offdiag: Real
    e_final: Real
    convexity: Real
    beats_convexity: bool
    quoted_u: Real | None
    quoted_matches: bool | None


def quoted_u_n3(theta0: Real) -> Real:
    """Parameter choice (1 - 6 theta0)/(14 - 4 theta0) quoted for n = 3."""
    return (1 - 6 * theta0) / (14 - 4 * theta0)


def balance_report(n: int, theta0: Real = Fraction(7, 64)) -> BalanceReport:
    """Solve e_diag(u) = e_offdiag(u) on [0, 1], clamping to the boundary."""
    ExponentInput(n, theta0, 0)
    th = theta0
    # (1-u)/2 = (n/4)(1/2+th) + u(5/2+th)/2
    u = (1 - Fraction(n, 2) * (Fraction(1, 2) + th)) / (Fraction(7, 2) + th)
    u = min(max(u, 0), 1)
    e_diag, e_off, e_fin = exponent_calculator(ExponentInput(n, th, u))
    conv = Fraction(n, 4)
    quoted = quoted_u_n3(th) if n == 3 else None
    matches = None if quoted is None else abs(quoted - u) <= 1e-12
    return BalanceReport(u, e_diag, e_off, e_fin, conv, e_fin < conv, quoted, matches)
