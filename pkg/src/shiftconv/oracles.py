"""Slow, independent reference computations.

Nothing here shares code with the fast paths it is used to check.
"""
from __future__ import annotations

import math
from typing import Dict, List

import numpy as np
from scipy import integrate

from .arith import CoeffTable, prime_sieve
from .quadforms import QuadraticForm
from .shifted import WeightFn


def tau_eta_product(M: int) -> List[int]:
    """tau(1..M) from q * (prod (1 - q^n)^3)^8 with Jacobi's series for the cube."""
    N = M  # coefficients of q^0 .. q^{M-1} of the product
    cube: Dict[int, int] = {}
    k = 0
    while k * (k + 1) // 2 < N:
        cube[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    acc = [0] * N
    acc[0] = 1
    for _ in range(8):
        nxt = [0] * N
        for e, c in cube.items():
            for i in range(N - e):
                if acc[i]:
                    nxt[i + e] += c * acc[i]
        acc = nxt
    return acc


def bessel_k_quad(nu: float, z: float) -> float:
    """K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt for real nu."""
    top = math.acosh(800 / z + 1)
    val, _ = integrate.quad(
        lambda t: math.exp(-z * math.cosh(t)) * math.cosh(nu * t), 0, top, limit=200, epsabs=0, epsrel=1e-12
    )
    return val


def quad_shift_box(
    table: CoeffTable, f: QuadraticForm, alpha: int, Y: float, W: WeightFn
) -> complex:
    """sum_a c(f(a)+alpha) (f(a)+alpha)^{-1/2} W(...) with p = 1, by scanning a box."""
    _, top = W.index_range(Y)
    M = top - alpha
    if M < 0:
        return 0j
    A2 = np.array([[int(2 * x) for x in row] for row in f.gram], dtype=np.int64)
    # |a_i| <= sqrt(M (A^{-1})_{ii}) bounds every vector with f(a) <= M
    inv = np.linalg.inv(A2 / 2)
    radius = [int(math.isqrt(int(M * inv[i, i])) + 1) for i in range(f.k)]
    grids = np.meshgrid(*[np.arange(-r, r + 1) for r in radius], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    m = (pts * (pts @ A2)).sum(axis=1) // 2 + alpha
    m = m[(m > 0) & (m <= top)]
    w = W(m / Y)
    terms = table.take(m) / np.sqrt(m) * w
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def linear_pairs_bruteforce(
    tableA: CoeffTable,
    tableB: CoeffTable,
    l1: int,
    l2: int,
    alpha: int,
    Y: float,
    W1: WeightFn,
    W2: WeightFn,
) -> complex:
    """Every (g1, g2) in the product of both weight supports, tested for l1 g1 - l2 g2 = alpha."""
    lo1, hi1 = W1.index_range(Y, l1)
    lo2, hi2 = W2.index_range(Y, l2)
    g1 = np.arange(lo1, hi1 + 1)
    g2 = np.arange(lo2, hi2 + 1)
    G1, G2 = np.meshgrid(g1, g2, indexing="ij")
    hit = l1 * G1 - l2 * G2 == alpha
    a, b = G1[hit], G2[hit]
    terms = [
        tableA(int(x)) * np.conj(tableB(int(y))) / math.sqrt(x * y) * float(W1(x * l1 / Y)) * float(W2(y * l2 / Y))
        for x, y in zip(a, b)
    ]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def zeta_half_eta() -> float:
    """zeta(1/2) from the alternating Dirichlet eta series, Cohen-Villegas-Zagier acceleration."""
    n = 60
    d = (3 + math.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b, c, s = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        s += c / math.sqrt(k + 1)
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    eta = s / d
    return eta / (1 - math.sqrt(2))


def euler_product_degree2(table: CoeffTable, s: float, P: int) -> float:
    """prod_{p <= P} (1 - c(p) p^{-s} + p^{-2s})^{-1} for a real degree-2 table."""
    log = 0.0
    for p in prime_sieve(P).tolist():
        log -= math.log(1 - table(p).real * p ** (-s) + p ** (-2 * s))
    return math.exp(log)
