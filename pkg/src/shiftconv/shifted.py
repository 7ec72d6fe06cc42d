"""Shifted convolution sums of automorphic coefficients.

Two families are computed: sums along a quadratic form, p(a) c(f(a) + alpha),
and linear progressions l1*g1 - l2*g2 = alpha.  Each has a second, independent
evaluation path used as an oracle in the tests.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ._summation import csum
from .arith import CoeffTable
from .errors import CoverageError, DomainError
from .quadforms import QuadraticForm, SphericalPoly, lattice_points, theta_coeffs

# weights below this are treated as outside the support
_WEIGHT_FLOOR = 1e-16


class HypothesisWarning(UserWarning):
    """Inputs fall outside the coprimality hypotheses of the linear sum."""


@dataclass(frozen=True)
class WeightFn:
    """Smooth weight on (0, inf).

    gaussian_bump: exp(-(log(y/center))^2 / (2 width^2)), negligible outside
    the window where it drops below 1e-16.
    compact_bump: exp(1 - 1/(1 - u^2)) with u = log2(y/center), so it is
    supported in [center/2, 2 center] and peaks at 1.  ``width`` is unused.
    """

    family: str = "gaussian_bump"
    center: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        if self.family not in ("gaussian_bump", "compact_bump"):
            raise DomainError(f"unknown weight family {self.family!r}")
        if not (self.center > 0 and self.width > 0):
            raise DomainError("center and width must be positive")

    def support(self) -> Tuple[float, float]:
        if self.family == "compact_bump":
            return self.center / 2, self.center * 2
        r = self.width * math.sqrt(-2 * math.log(_WEIGHT_FLOOR))
        return self.center * math.exp(-r), self.center * math.exp(r)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        pos = y > 0
        lo, hi = self.support()
        inside = pos & (y > lo) & (y < hi)
        yy = y[inside]
        if self.family == "gaussian_bump":
            out[inside] = np.exp(-np.log(yy / self.center) ** 2 / (2 * self.width**2))
        else:
            u = np.log2(yy / self.center)
            out[inside] = np.exp(1 - 1 / (1 - u * u))
        return out if out.ndim else float(out)

    def index_range(self, Y: float, scale: float = 1.0) -> Tuple[int, int]:
        """Integers g >= 1 with g*scale/Y strictly inside the support."""
        lo, hi = self.support()
        return max(1, math.floor(lo * Y / scale)), math.ceil(hi * Y / scale)


def _need(table: CoeffTable, top: int, what: str = "table"):
    if top > table.bound:
        raise CoverageError(f"{what} '{table.name}' has bound {table.bound}, need {top}")


# ---------------------------------------------------------------------------
# sums along a quadratic form


def _quad_terms(table: CoeffTable, m_shift: np.ndarray, weights_p: np.ndarray, Y: float, W: WeightFn) -> np.ndarray:
    keep = (m_shift > 0) & (weights_p != 0)
    m = m_shift[keep]
    wv = W(m / Y)
    nz = wv != 0
    m, wv, pv = m[nz], wv[nz], weights_p[keep][nz]
    return pv * table.take(m) / np.sqrt(m) * wv


def quad_shift_sum(
    table: CoeffTable,
    f: QuadraticForm,
    p: SphericalPoly,
    alpha: int,
    Y: float,
    W: WeightFn,
    route: str = "lattice",
) -> complex:
    """sum_a p(a) c(f(a)+alpha) |f(a)+alpha|^{-1/2} W((f(a)+alpha)/Y), skipping f(a)+alpha = 0.

    ``route="lattice"`` sums over enumerated vectors; ``route="theta"`` groups
    them first into r_{f,p}(m).
    """
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    if p.k != f.k:
        raise DomainError("polynomial and form have different dimensions")
    _, top = W.index_range(Y)
    _need(table, top)
    Mf = top - alpha
    if Mf < 0:
        return 0j
    if route == "lattice":
        pts, vals = lattice_points(f, Mf)
        pv, D = p.evaluate_scaled(pts)
        pw = np.array(pv, dtype=float) / D
        terms = _quad_terms(table, vals + alpha, pw, Y, W)
    elif route == "theta":
        th = theta_coeffs(f, p, Mf)
        ms = np.arange(Mf + 1)
        terms = _quad_terms(table, ms + alpha, th.r, Y, W)
    else:
        raise DomainError(f"unknown route {route!r}")
    return csum(terms)


# ---------------------------------------------------------------------------
# linear progressions


def _check_hypotheses(l1: int, l2: int, alpha: int) -> List[str]:
    flags = []
    if math.gcd(l1, l2) != 1:
        flags.append(f"gcd(l1, l2) = {math.gcd(l1, l2)}")
    for name, l in (("l1", l1), ("l2", l2)):
        if math.gcd(l, alpha) != 1:
            flags.append(f"gcd({name}, alpha) = {math.gcd(l, alpha)}")
    return flags


def contributing_pairs(l1: int, l2: int, alpha: int, g1_range: Tuple[int, int]) -> np.ndarray:
    """Pairs (g1, g2), g2 >= 1, with l1 g1 - l2 g2 = alpha and g1 in the range."""
    g1 = np.arange(g1_range[0], g1_range[1] + 1, dtype=np.int64)
    rest = l1 * g1 - alpha
    ok = (rest > 0) & (rest % l2 == 0)
    return np.stack([g1[ok], rest[ok] // l2], axis=1)


def linear_shift_sum(
    tableA: CoeffTable,
    tableB: CoeffTable,
    l1: int,
    l2: int,
    alpha: int,
    Y: float,
    W1: WeightFn,
    W2: WeightFn,
) -> complex:
    """sum over l1 g1 - l2 g2 = alpha of c_A(g1) conj(c_B(g2)) (g1 g2)^{-1/2} W1(g1 l1/Y) W2(g2 l2/Y).

    Scans g1 over the support of W1 and keeps those with l1 g1 - alpha a
    positive multiple of l2.
    """
    if l1 < 1 or l2 < 1:
        raise DomainError("l1 and l2 must be positive")
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    flags = _check_hypotheses(l1, l2, alpha)
    if flags:
        warnings.warn("; ".join(flags), HypothesisWarning, stacklevel=2)
    r1 = W1.index_range(Y, l1)
    lo2, hi2 = W2.index_range(Y, l2)
    pairs = contributing_pairs(l1, l2, alpha, r1)
    if len(pairs) == 0:
        return 0j
    g1, g2 = pairs[:, 0], pairs[:, 1]
    w = W1(g1 * l1 / Y) * W2(g2 * l2 / Y)
    nz = w != 0
    g1, g2, w = g1[nz], g2[nz], w[nz]
    if len(g1) == 0:
        return 0j
    _need(tableA, int(g1.max()), "tableA")
    _need(tableB, int(g2.max()), "tableB")
    terms = tableA.take(g1) * np.conj(tableB.take(g2)) / np.sqrt(g1 * g2.astype(float)) * w
    return csum(terms)


# ---------------------------------------------------------------------------
# unit-interval Fourier series


@dataclass(frozen=True)
class FourierSeries:
    """Trigonometric polynomial sum_g coeffs[g] e(g x), |g| <= truncation.

    ``normalization`` is the global constant the coefficients were divided by
    (powers of Y dropped by the assembler); it is 1 when nothing was dropped.
    """

    coeffs: Dict[int, complex]
    truncation: int
    normalization: float = 1.0

    def __post_init__(self):
        bad = [g for g in self.coeffs if abs(g) > self.truncation]
        if bad:
            raise DomainError(f"frequencies {bad[:3]} exceed truncation {self.truncation}")

    def __len__(self) -> int:
        return len(self.coeffs)

    def get(self, g: int) -> complex:
        return self.coeffs.get(g, 0j)

    def samples(self, N: int) -> np.ndarray:
        """Values at x_j = j/N, j < N."""
        arr = np.zeros(N, dtype=complex)
        for g, c in self.coeffs.items():
            arr[g % N] += c
        return np.fft.ifft(arr) * N

    @classmethod
    def from_theta(cls, r: Sequence[float], Y: float) -> "FourierSeries":
        """theta(x + i/Y) = sum_m r(m) e^{-2 pi m / Y} e(m x)."""
        return cls({m: complex(v * math.exp(-2 * math.pi * m / Y)) for m, v in enumerate(r) if v}, len(r) - 1)


def assemble_projected_series(
    table: CoeffTable,
    n: int,
    W: WeightFn,
    Y: float,
    M: int,
    shift_phase: complex = 1.0,
) -> FourierSeries:
    """Coefficients c(g) g^{-1/2} exp(2 pi g/Y) W(g/Y) * shift_phase for 1 <= g <= M.

    The factor exp(2 pi g/Y) is kept explicitly so that it cancels against the
    theta decay only in the product.  Powers of |y| are not included, so the
    recorded normalization is 1.
    """
    if n != table.degree:
        raise DomainError(f"degree {n} does not match table degree {table.degree}")
    _need(table, M)
    g = np.arange(1, M + 1)
    w = W(g / Y)
    nz = w != 0
    g, w = g[nz], w[nz]
    vals = table.take(g) / np.sqrt(g) * np.exp(2 * math.pi * g / Y) * w * shift_phase
    return FourierSeries({int(a): complex(v) for a, v in zip(g, vals) if v != 0}, M, 1.0)


def fourier_unfold_check(F: FourierSeries, G: FourierSeries, alpha: int, N: int) -> Tuple[complex, complex]:
    """(unit-interval average of F conj(G) e(-alpha x), sum_m F_{m+alpha} conj(G_m)).

    Equidistant sampling with N > 2 (F.truncation + G.truncation) is exact for
    these trigonometric polynomials.
    """
    if N <= 2 * (F.truncation + G.truncation):
        raise DomainError(f"N = {N} aliases; need N > {2 * (F.truncation + G.truncation)}")
    prod = F.samples(N) * np.conj(G.samples(N))
    lhs = np.fft.fft(prod)[alpha % N] / N
    rhs = csum([F.get(m + alpha) * np.conj(c) for m, c in sorted(G.coeffs.items())])
    return complex(lhs), rhs


def alias_free_size(F: FourierSeries, G: FourierSeries) -> int:
    """Smallest power of two above the alias bound."""
    need = 2 * (F.truncation + G.truncation) + 1
    return 1 << (need - 1).bit_length()


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    residual: float


def growth_fit(values: Sequence[Tuple[float, float]]) -> GrowthFit:
    """Least-squares line through (log Y, log |S|); residual is the RMS deviation."""
    if len(values) < 4:
        raise DomainError("need at least four points")
    Ys = np.array([v[0] for v in values], dtype=float)
    Ss = np.array([v[1] for v in values], dtype=float)
    if np.any(np.diff(Ys) <= 0):
        raise DomainError("Y values must be strictly increasing")
    if np.any(Ss <= 0) or np.any(Ys <= 0):
        raise DomainError("Y and |S(Y)| must be positive")
    x, y = np.log(Ys), np.log(Ss)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return GrowthFit(float(slope), float(intercept), resid)


def growth_prediction(k: int, theta0: float = 7 / 64) -> float:
    """max of main-term exponent (k-1)/4 and error exponent (k-2)/4 + theta0/2."""
    return max((k - 1) / 4, (k - 2) / 4 + theta0 / 2)


def growth_experiment(
    table: CoeffTable,
    f: QuadraticForm,
    alpha: int,
    Ys: Sequence[float],
    W: WeightFn = WeightFn("compact_bump", 1.0, 1.0),
) -> Tuple[List[Tuple[float, float]], GrowthFit]:
    """|S(Y)| at each Y with p = 1, and the log-log fit."""
    one = SphericalPoly.one(f.k)
    pts = [(float(Y), abs(quad_shift_sum(table, f, one, alpha, Y, W))) for Y in Ys]
    return pts, growth_fit(pts)
