"""Positive definite integral quadratic forms, harmonic weights and theta coefficients."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DomainError, ResourceError

REP_CEILING = 5_000_000

Matrix = Tuple[Tuple[Fraction, ...], ...]


def _frac_matrix(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _ldl(gram: Matrix) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """Exact LDL^T; returns pivots d and unit lower factor L."""
    k = len(gram)
    L = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    d: List[Fraction] = []
    for j in range(k):
        dj = gram[j][j] - sum(L[j][t] ** 2 * d[t] for t in range(j))
        if dj <= 0:
            raise DomainError("Gram matrix is not positive definite")
        d.append(dj)
        for i in range(j + 1, k):
            L[i][j] = (gram[i][j] - sum(L[i][t] * L[j][t] * d[t] for t in range(j))) / dj
    return d, L


def _inverse(gram: Matrix) -> Matrix:
    k = len(gram)
    aug = [list(gram[i]) + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for c in range(k):
        piv = next(r for r in range(c, k) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(k):
            if r != c and aug[r][c] != 0:
                fac = aug[r][c]
                aug[r] = [x - fac * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(row[k:]) for row in aug)


@dataclass(frozen=True)
class QuadraticForm:
    """f(a) = a^T A a with A symmetric rational and f integral on Z^k."""

    gram: Matrix

    def __post_init__(self):
        g = _frac_matrix(self.gram)
        k = len(g)
        if k < 1 or any(len(row) != k for row in g):
            raise DomainError("Gram matrix must be square and nonempty")
        for i in range(k):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise DomainError("Gram matrix must be symmetric")
        for i in range(k):
            if g[i][i].denominator != 1:
                raise DomainError(f"f(e_{i}) = {g[i][i]} is not an integer")
            for j in range(i):
                if (2 * g[i][j]).denominator != 1:
                    raise DomainError(f"f(e_{i} + e_{j}) is not an integer")
        _ldl(g)
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_upper(cls, k: int, upper: Sequence[int]) -> "QuadraticForm":
        """Build from the row-major upper triangle of the integer matrix 2A."""
        need = k * (k + 1) // 2
        if k < 1 or len(upper) != need:
            raise ConfigError(f"need {need} upper-triangle entries of 2A for k = {k}")
        g = [[Fraction(0)] * k for _ in range(k)]
        it = iter(upper)
        for i in range(k):
            for j in range(i, k):
                v = Fraction(int(next(it)), 2)
                g[i][j] = g[j][i] = v
        return cls(tuple(map(tuple, g)))

    @classmethod
    def diagonal(cls, *coeffs: int) -> "QuadraticForm":
        k = len(coeffs)
        return cls(tuple(tuple(Fraction(coeffs[i]) if i == j else Fraction(0) for j in range(k)) for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.gram)

    @property
    def twice_gram(self) -> np.ndarray:
        return np.array([[int(2 * x) for x in row] for row in self.gram], dtype=np.int64)

    @property
    def inverse(self) -> Matrix:
        return _inverse(self.gram)

    def __call__(self, a: Sequence[int]) -> int:
        val = sum(self.gram[i][j] * a[i] * a[j] for i in range(self.k) for j in range(self.k))
        return int(val)

    def bilinear(self, u: Sequence[int], v: Sequence[int]) -> Fraction:
        return sum(self.gram[i][j] * u[i] * v[j] for i in range(self.k) for j in range(self.k))

    def upper(self) -> List[int]:
        return [int(2 * self.gram[i][j]) for i in range(self.k) for j in range(i, self.k)]


# ---------------------------------------------------------------------------
# enumeration


def lattice_points(f: QuadraticForm, M: int, ceiling: int = REP_CEILING) -> Tuple[np.ndarray, np.ndarray]:
    """All a in Z^k with f(a) <= M, lexicographically sorted, with their values.

    Fincke-Pohst: coordinates are fixed from the last to the first, each range
    read off the LDL factorisation; the first coordinate is filled in bulk.
    """
    if M < 0:
        raise DomainError("M must be nonnegative")
    k = f.k
    d_exact, L_exact = _ldl(f.gram)
    d = [float(x) for x in d_exact]
    L = [[float(x) for x in row] for row in L_exact]
    slack = 1e-9 * (M + 1)
    chunks: List[np.ndarray] = []
    count = 0
    coords = [0] * k

    # f(a) = sum_j d_j (a_j + sum_{i>j} L[i][j] a_i)^2
    def rec(j: int, budget: float):
        nonlocal count
        centre = -sum(L[i][j] * coords[i] for i in range(j + 1, k))
        r = math.sqrt(max(budget, 0.0) / d[j])
        lo, hi = math.ceil(centre - r - 1e-9), math.floor(centre + r + 1e-9)
        if j == 0:
            if hi < lo:
                return
            block = np.zeros((hi - lo + 1, k), dtype=np.int64)
            block[:, 0] = np.arange(lo, hi + 1)
            for i in range(1, k):
                block[:, i] = coords[i]
            chunks.append(block)
            count += hi - lo + 1
            if count > ceiling:
                raise ResourceError(f"more than {ceiling} lattice points with f(a) <= {M}")
            return
        for v in range(lo, hi + 1):
            coords[j] = v
            rec(j - 1, budget - d[j] * (v - centre) ** 2)
        coords[j] = 0

    rec(k - 1, M + slack)
    pts = np.concatenate(chunks) if chunks else np.zeros((0, k), dtype=np.int64)
    vals = _values(f, pts)
    keep = vals <= M
    pts, vals = pts[keep], vals[keep]
    order = np.lexsort(pts.T[::-1])
    return pts[order], vals[order]


def _values(f: QuadraticForm, pts: np.ndarray) -> np.ndarray:
    A2 = f.twice_gram
    return np.einsum("ni,ij,nj->n", pts, A2, pts) // 2


def enumerate_reps(f: QuadraticForm, M: int, ceiling: int = REP_CEILING) -> Dict[int, List[Tuple[int, ...]]]:
    """{m: [a with f(a) = m]} for m <= M; groups in lexicographic order."""
    pts, vals = lattice_points(f, M, ceiling)
    out: Dict[int, List[Tuple[int, ...]]] = {}
    for a, m in zip(pts.tolist(), vals.tolist()):
        out.setdefault(int(m), []).append(tuple(a))
    return dict(sorted(out.items()))


def box_scan(f: QuadraticForm, M: int) -> Dict[int, List[Tuple[int, ...]]]:
    """Naive enumeration over the box |a_i| <= 1 + sqrt(M (A^{-1})_{ii})."""
    inv = f.inverse
    radii = [1 + math.isqrt(int(math.ceil(M * inv[i][i]))) + 1 for i in range(f.k)]
    grids = np.meshgrid(*[np.arange(-r, r + 1) for r in radii], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    vals = _values(f, pts)
    keep = vals <= M
    pts, vals = pts[keep], vals[keep]
    order = np.lexsort(pts.T[::-1])
    out: Dict[int, List[Tuple[int, ...]]] = {}
    for a, m in zip(pts[order].tolist(), vals[order].tolist()):
        out.setdefault(int(m), []).append(tuple(a))
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# harmonic polynomials

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class SphericalPoly:
    """Homogeneous polynomial with rational coefficients in k variables."""

    k: int
    terms: Tuple[Tuple[Monomial, Fraction], ...]

    def __post_init__(self):
        merged: Dict[Monomial, Fraction] = {}
        for exps, c in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.k or any(e < 0 for e in exps):
                raise DomainError(f"bad monomial {exps} for k = {self.k}")
            merged[exps] = merged.get(exps, Fraction(0)) + Fraction(c)
        clean = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        degrees = {sum(e) for e, _ in clean}
        if len(degrees) > 1:
            raise DomainError("polynomial is not homogeneous")
        object.__setattr__(self, "terms", clean)

    @classmethod
    def one(cls, k: int) -> "SphericalPoly":
        return cls(k, (((0,) * k, Fraction(1)),))

    @classmethod
    def parse(cls, k: int, text: str) -> "SphericalPoly":
        """``"e0,e1:c;e0,e1:c"``, one monomial per ';'.  ``"1"`` is the constant."""
        text = text.strip()
        if text == "1":
            return cls.one(k)
        terms = []
        for chunk in text.split(";"):
            try:
                exps, coeff = chunk.split(":")
                terms.append((tuple(int(e) for e in exps.split(",")), Fraction(coeff.strip())))
            except ValueError as exc:
                raise ConfigError(f"cannot parse monomial {chunk!r}") from exc
        return cls(k, tuple(terms))

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0]) if self.terms else 0

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, a: Sequence[int]) -> Fraction:
        return sum((c * math.prod(x**e for x, e in zip(a, exps)) for exps, c in self.terms), Fraction(0))

    def evaluate_scaled(self, pts: np.ndarray) -> Tuple[List[int], int]:
        """Integer values D*p(a) over the rows of pts, and the common denominator D."""
        D = math.lcm(*(c.denominator for _, c in self.terms)) if self.terms else 1
        cols = [pts[:, i].tolist() for i in range(self.k)]
        vals = [0] * len(pts)
        for exps, c in self.terms:
            ci = int(c * D)
            for n in range(len(pts)):
                term = ci
                for i, e in enumerate(exps):
                    if e:
                        term *= cols[i][n] ** e
                vals[n] += term
        return vals, D

    def derivative(self, i: int) -> "SphericalPoly":
        out = []
        for exps, c in self.terms:
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                out.append((tuple(e), c * exps[i]))
        return SphericalPoly(self.k, tuple(out))


def form_laplacian(f: QuadraticForm, p: SphericalPoly) -> SphericalPoly:
    """sum_{ij} (A^{-1})_{ij} d_i d_j p, exactly."""
    if p.k != f.k:
        raise DomainError("polynomial and form have different dimensions")
    inv = f.inverse
    acc: Dict[Monomial, Fraction] = {}
    for i in range(f.k):
        di = p.derivative(i)
        for j in range(f.k):
            if inv[i][j] == 0:
                continue
            for exps, c in di.derivative(j).terms:
                acc[exps] = acc.get(exps, Fraction(0)) + inv[i][j] * c
    return SphericalPoly(f.k, tuple(acc.items()))


def harmonicity_check(f: QuadraticForm, p: SphericalPoly) -> bool:
    return form_laplacian(f, p).is_zero


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaCoeffs:
    """r(m) = sum_{f(a) = m} p(a), kept exactly as numerators over a common denominator."""

    bound: int
    numerators: Tuple[int, ...]
    denominator: int

    @property
    def r(self) -> np.ndarray:
        return np.array([x / self.denominator for x in self.numerators], dtype=float)

    def exact(self, m: int) -> Fraction:
        return Fraction(self.numerators[m], self.denominator)

    def nonzero(self) -> Iterable[Tuple[int, Fraction]]:
        for m, x in enumerate(self.numerators):
            if x:
                yield m, Fraction(x, self.denominator)


def theta_coeffs(f: QuadraticForm, p: SphericalPoly, M: int) -> ThetaCoeffs:
    if p.k != f.k:
        raise DomainError("polynomial and form have different dimensions")
    pts, vals = lattice_points(f, M)
    pv, D = p.evaluate_scaled(pts)
    acc = [0] * (M + 1)
    for m, v in zip(vals.tolist(), pv):
        acc[m] += v
    g = math.gcd(D, *acc) if any(acc) else D
    return ThetaCoeffs(M, tuple(x // g for x in acc), D // g)


def automorph_count(f: QuadraticForm) -> Tuple[int, int]:
    """(all integral automorphs, determinant +1 automorphs) of a binary form."""
    if f.k != 2:
        raise DomainError("automorph_count is implemented for binary forms only")
    n1, n2 = int(f.gram[0][0]), int(f.gram[1][1])
    reps = enumerate_reps(f, max(n1, n2))
    full = rot = 0
    for u, v in itertools.product(reps.get(n1, []), reps.get(n2, [])):
        if f.bilinear(u, v) == f.gram[0][1]:
            det = u[0] * v[1] - u[1] * v[0]
            full += 1
            rot += det == 1
    return full, rot
