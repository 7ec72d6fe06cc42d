"""Central values of twisted L-functions through the approximate functional equation.

With Lambda(s) = Q^s gamma(s) L(s), Q the square root of the arithmetic
conductor, and any even kernel G with G(0) = 1,

    L(1/2) = sum a_m m^{-1/2} V(m/(QX)) + eps * sum conj(a_m) m^{-1/2} V(mX/Q) - polar,

    V(y) = (2 pi i)^{-1} int_(sigma) G(s) gamma(1/2+s)/gamma(1/2) y^{-s} ds/s.

The root number eps is not computed from local data.  The identity holds for
every kernel width and every X, so eps is fitted from three kernel widths
and a second split point X and the spread of the fitted values is the reported residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from ._summation import csum
from ._tails import dirichlet_tail, growth_exponent
from .arith import (
    REP_NAMES,
    CoeffTable,
    DirichletChar,
    RepDescriptor,
    coeff_from_satake,
    dirichlet_char,
    factorize,
    gauss_sum,
    named_table,
)
from .errors import ConvergenceError, CoverageError, DomainError, PoleError
from .special import gamma_array, gamma_r

CONVENTIONS = ("verbatim", "parity_free")


@dataclass(frozen=True)
class AFEConfig:
    kernel_width: float = 8.0
    contour_sigma: float = 1.5
    contour_T: float = 30.0
    contour_step: float = 0.01
    cutoff_multiplier: float = 1.0
    convention: str = "verbatim"

    def __post_init__(self):
        if self.kernel_width <= 0:
            raise DomainError("kernel_width must be positive")
        if self.contour_sigma <= 0:
            raise DomainError("contour_sigma must be positive")
        if not 0 < self.contour_step < self.contour_T:
            raise DomainError("need 0 < contour_step < contour_T")
        if self.cutoff_multiplier < 1:
            raise DomainError("cutoff_multiplier must be >= 1")
        if self.convention not in CONVENTIONS:
            raise DomainError(f"convention must be one of {CONVENTIONS}")


@dataclass(frozen=True)
class TwistedL:
    rep: RepDescriptor
    chi: DirichletChar
    conductor_product: float
    epsilon: Optional[complex] = None

    def __post_init__(self):
        if self.epsilon is not None and abs(abs(self.epsilon) - 1) > 1e-9:
            raise DomainError("root number must have modulus 1")


def _shifts(rep: RepDescriptor, parity: int, convention: str) -> List[complex]:
    if parity not in (1, -1):
        raise DomainError("parity must be +1 or -1")
    sign = parity if convention == "verbatim" else 1
    return [sign * complex(mu) for mu in rep.arch_params]


def gamma_factor(rep: RepDescriptor, parity: int, s: complex, convention: str = "verbatim") -> complex:
    """prod_i Gamma_R(s + parity mu_i); ``parity_free`` drops the parity sign."""
    val = 1 + 0j
    for mu in _shifts(rep, parity, convention):
        val *= gamma_r(complex(s) + mu)
    return val


def _gamma_factor_array(shifts: List[complex], s: np.ndarray) -> np.ndarray:
    z = np.concatenate([(s + mu) / 2 for mu in shifts])
    g = gamma_array(z).reshape(len(shifts), -1)
    return np.prod(g, axis=0) * np.exp(-len(shifts) * s / 2 * math.log(math.pi) - sum(mu for mu in shifts) / 2 * math.log(math.pi))


def analytic_conductor(rep: RepDescriptor, q: int, parity: int) -> float:
    """N q^n pi^{-n} prod_i |1/4 + parity mu_i / 2|^2."""
    if q < 1:
        raise DomainError("q must be positive")
    if parity not in (1, -1):
        raise DomainError("parity must be +1 or -1")
    n = rep.degree
    val = rep.conductor * float(q) ** n * math.pi ** (-n)
    for mu in rep.arch_params:
        val *= abs(0.25 + parity * complex(mu) / 2) ** 2
    return val


def convexity_bound(rep: RepDescriptor, chi: DirichletChar, epsilon_exp: float) -> float:
    if epsilon_exp < 0:
        raise DomainError("epsilon_exp must be nonnegative")
    return analytic_conductor(rep, chi.conductor, chi.parity) ** (0.25 + epsilon_exp)


# ---------------------------------------------------------------------------
# the cutoff function V


# Chebyshev panels in log y used for long coefficient sums
_PANEL = 0.5
_PANEL_DEG = 32


class CutoffKernel:
    """Samples of G(s) gamma(1/2+s)/gamma(1/2) / s on the line Re s = sigma."""

    def __init__(self, rep: RepDescriptor, parity: int, cfg: AFEConfig):
        shifts = _shifts(rep, parity, cfg.convention)
        base = np.array([0.5 + 0j])
        for mu in shifts:
            z = 0.5 + mu
            if z.imag == 0 and z.real <= 0 and float(z.real / 2).is_integer():
                raise PoleError(f"gamma factor has a pole at s = 1/2 (shift {mu})")
        t = np.arange(-cfg.contour_T, cfg.contour_T + cfg.contour_step / 2, cfg.contour_step)
        s = cfg.contour_sigma + 1j * t
        for mu in shifts:
            # poles of Gamma_R(1/2 + s + mu) must stay left of the contour
            if (0.5 + cfg.contour_sigma + mu).real <= 0:
                raise PoleError("contour passes left of a gamma-factor pole")
        ratio = _gamma_factor_array(shifts, 0.5 + s) / _gamma_factor_array(shifts, base)[0]
        weights = np.exp(s * s / cfg.kernel_width) * ratio / s * cfg.contour_step / (2 * math.pi)
        edge = max(abs(weights[0]), abs(weights[-1]))
        peak = np.max(np.abs(weights))
        if not np.isfinite(peak) or edge > 1e-15 * peak:
            raise ConvergenceError(
                f"contour truncated at T = {cfg.contour_T} where the integrand is still {edge / peak:.1e} of its peak"
            )
        self.s = s
        self.weights = weights
        self.cfg = cfg

    def direct(self, y) -> np.ndarray:
        """Trapezoid sum on the contour for each y."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y <= 0):
            raise DomainError("V is evaluated at y > 0")
        out = np.empty(y.shape, dtype=complex)
        # chunked to keep the (len(y), len(t)) matrix small
        for i in range(0, len(y), 256):
            ly = np.log(y[i : i + 256])
            out[i : i + 256] = np.exp(-np.outer(ly, self.s)) @ self.weights
        return out

    def __call__(self, y) -> np.ndarray:
        """V(y).  Long arrays go through piecewise Chebyshev interpolation in log y."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if len(y) < 4 * _PANEL_DEG:
            return self.direct(y)
        if np.any(y <= 0):
            raise DomainError("V is evaluated at y > 0")
        u = np.log(y)
        a0 = math.floor(u.min() / _PANEL) * _PANEL
        idx = np.floor((u - a0) / _PANEL).astype(np.int64)
        out = np.empty(y.shape, dtype=complex)
        k = np.arange(_PANEL_DEG + 1)
        nodes = np.cos(np.pi * (k + 0.5) / (_PANEL_DEG + 1))
        basis = np.cos(np.outer(k, np.pi * (k + 0.5) / (_PANEL_DEG + 1))) * 2 / (_PANEL_DEG + 1)
        for j in np.unique(idx):
            a = a0 + j * _PANEL
            fv = self.direct(np.exp(a + (nodes + 1) * _PANEL / 2))
            c = basis @ fv
            c[0] /= 2
            sel = idx == j
            x = 2 * (u[sel] - a) / _PANEL - 1
            out[sel] = np.polynomial.chebyshev.chebval(x, c)
        return out

    def support_end(self, floor: float = 1e-14) -> float:
        """y beyond which |V(y)| < floor, located on a log grid up to 1e8."""
        ys = np.logspace(-1, 8, 361)
        v = np.abs(self.direct(ys))
        above = np.nonzero(v >= floor)[0]
        if len(above) == 0:
            return float(ys[0])
        if above[-1] == len(ys) - 1:
            raise ConvergenceError("cutoff function does not decay below the floor by y = 1e8")
        return float(ys[above[-1] + 1])


@lru_cache(maxsize=64)
def _kernel(rep: RepDescriptor, parity: int, cfg: AFEConfig) -> CutoffKernel:
    return CutoffKernel(rep, parity, cfg)


def afe_cutoff(rep: RepDescriptor, parity: int, cfg: AFEConfig, y: float) -> complex:
    if not y > 0:
        raise DomainError("y must be positive")
    return complex(_kernel(rep, parity, cfg).direct(y)[0])


# ---------------------------------------------------------------------------
# completed zeta for the polar terms of the formal Eisenstein-type descriptor

_TH_NODES, _TH_WEIGHTS = np.polynomial.legendre.leggauss(40)


def _completed_zeta(z: np.ndarray) -> np.ndarray:
    """pi^{-z/2} Gamma(z/2) zeta(z) from the theta integral, valid for all z != 0, 1."""
    z = np.asarray(z, dtype=complex)
    edges = np.linspace(0.0, math.log(40.0), 13)
    acc = np.zeros(z.shape, dtype=complex)
    n = np.arange(1, 5)
    for a, b in zip(edges, edges[1:]):
        u = (b - a) / 2 * _TH_NODES + (a + b) / 2
        w = (b - a) / 2 * _TH_WEIGHTS
        t = np.exp(u)
        psi = np.exp(-math.pi * np.outer(t, n * n)).sum(axis=1)
        # dt/t = du
        acc += (np.exp(np.outer(z / 2, u)) + np.exp(np.outer((1 - z) / 2, u))) @ (w * psi)
    return acc - 1 / z - 1 / (1 - z)


def _polar_term(degree: int, width: float, X: float, radius: float = 0.2, nodes: int = 64) -> complex:
    """Residues of Lambda(1/2+s) G(s) X^s / s at s = +-1/2 for Lambda = Lambda_zeta^degree."""
    total = 0j
    th = 2 * math.pi * np.arange(nodes) / nodes
    for rho in (0.5, -0.5):
        s = rho + radius * np.exp(1j * th)
        f = _completed_zeta(0.5 + s) ** degree * np.exp(s * s / width) * X**s / s
        # (2 pi i)^{-1} contour integral, ds = i radius e^{i th} dth
        total += np.mean(f * radius * np.exp(1j * th))
    return complex(total)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CentralValue:
    value: complex
    residual: float
    epsilon: complex
    epsilon_gauss: complex
    conductor: float
    terms: int

    def __iter__(self):
        return iter((self.value, self.residual))


def _euler_factor_inverse(rep: RepDescriptor, chi: DirichletChar, p: int, s: float) -> complex:
    """prod_i (1 - chi(p) alpha_i p^{-s})."""
    val = 1 + 0j
    for a in rep.satake(p).params:
        val *= 1 - chi(p) * a * p ** (-s)
    return val


def _table_for(rep: RepDescriptor, M: int) -> CoeffTable:
    if rep.name in REP_NAMES:
        return named_table(rep.name, M)
    return coeff_from_satake(rep, M)


def _has_poles(rep: RepDescriptor, chi: DirichletChar) -> bool:
    return rep.name == "formal_ones" and chi.conductor == 1


def central_value(
    rep: RepDescriptor,
    chi: DirichletChar,
    cfg: AFEConfig = AFEConfig(),
    table: Optional[CoeffTable] = None,
) -> CentralValue:
    """L(1/2, rep x chi) with a self-consistent root number.

    Imprimitive characters are reduced to the inducing character and the
    missing Euler factors are removed afterwards.
    """
    prim = chi.inducing()
    q = prim.modulus
    n = rep.degree
    Q = math.sqrt(rep.conductor * float(q) ** n)
    parity = prim.parity
    X = cfg.cutoff_multiplier
    configs = [cfg] + [replace(cfg, kernel_width=f * cfg.kernel_width) for f in (1.5, 2.0)]
    # at X = 1 the two sums of a self-dual real twist coincide and eps would be
    # undetermined, so one configuration moves the split point
    configs.append(replace(cfg, cutoff_multiplier=1.25 * X))
    kernels = [_kernel(rep, parity, c) for c in configs]
    reach = max(k.support_end() * max(c.cutoff_multiplier, 1 / c.cutoff_multiplier) for k, c in zip(kernels, configs))
    M = int(math.ceil(reach * Q)) + 1
    if table is None:
        table = _table_for(rep, M)
    if table.bound < M:
        raise CoverageError(f"AFE needs coefficients up to {M}, table has {table.bound}")
    m = np.arange(1, M + 1)
    a = table.take(m) * prim.take(m) / np.sqrt(m)
    A, B = [], []
    for k, c in zip(kernels, configs):
        x = c.cutoff_multiplier
        first = csum(a * k(m / (Q * x)))
        if _has_poles(rep, prim):
            first -= _polar_term(n, c.kernel_width, x) / (math.sqrt(Q) * gamma_factor(rep, parity, 0.5, c.convention))
        A.append(first)
        B.append(csum(np.conj(a) * k(m * x / Q)))
    A, B = np.array(A), np.array(B)
    # least squares for A_i + eps B_i = L
    design = np.stack([np.ones(len(A)), -B], axis=1)
    (L_fit, eps), *_ = np.linalg.lstsq(design, A, rcond=None)
    if abs(eps) == 0 or not np.isfinite(eps):
        raise ConvergenceError("root number could not be determined")
    eps = eps / abs(eps)
    if rep.selfdual and prim.is_real:
        eps = complex(1.0 if eps.real >= 0 else -1.0)
    vals = A + eps * B
    value = complex(vals[0])
    residual = float(np.max(np.abs(vals - value)))
    for p in sorted(factorize(chi.modulus)):
        if q % p:
            value *= _euler_factor_inverse(rep, prim, p, 0.5)
    g_eps = (gauss_sum(prim) / math.sqrt(q)) ** n if q > 1 else 1 + 0j
    C = analytic_conductor(rep, q, parity)
    return CentralValue(value, residual, complex(eps), complex(g_eps), C, M)


def twisted(rep: RepDescriptor, q: int, index: int, cfg: AFEConfig = AFEConfig()) -> Tuple[TwistedL, CentralValue]:
    chi = dirichlet_char(q, index)
    cv = central_value(rep, chi, cfg)
    return TwistedL(rep, chi, cv.conductor, cv.epsilon), cv


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    theta: float


def dirichlet_series(table: CoeffTable, chi: DirichletChar, s: complex, M: int) -> SeriesValue:
    """sum_{m <= M} c(m) chi(m) m^{-s} with an empirical tail bound."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError(f"Dirichlet series diverges at Re(s) = {s.real}")
    if M > table.bound:
        raise CoverageError(f"M = {M} exceeds table bound {table.bound}")
    m = np.arange(1, M + 1)
    terms = table.take(m) * chi.take(m) * np.exp(-s * np.log(m))
    theta = growth_exponent(table, M)
    return SeriesValue(csum(terms), dirichlet_tail(table, s.real, M, theta), theta)
