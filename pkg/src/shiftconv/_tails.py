"""Empirical tail bounds for truncated Dirichlet series."""
from __future__ import annotations

import math

import numpy as np

from .arith import CoeffTable


def _growth(absc: np.ndarray) -> float:
    M = len(absc)
    full = math.fsum(absc)
    half = math.fsum(absc[: M // 2])
    if M < 8 or half <= 0:
        return 0.0
    return max(0.0, math.log(full / half) / math.log(M / (M // 2)) - 1.0)


def growth_exponent(table: CoeffTable, M: int) -> float:
    """theta with sum_{m <= x} |c(m)| ~ x^{1+theta}, read off between M/2 and M."""
    return _growth(np.abs(table.values[1 : M + 1]))


def tail_from_abs(absc: np.ndarray, sigma: float, theta: float | None = None) -> float:
    """Bound for sum_{m > M} b(m) m^{-sigma} given b(1..M) = absc.

    Partial summation with S(x) = sum_{m <= x} b(m) extrapolated as
    S(M) (x/M)^{1+theta}; infinite when sigma <= 1 + theta.
    """
    absc = np.asarray(absc, dtype=float)
    M = len(absc)
    if theta is None:
        theta = _growth(absc)
    if sigma <= 1 + theta:
        return math.inf
    S = math.fsum(absc)
    return sigma * S * M ** (-sigma) / (sigma - 1 - theta)


def dirichlet_tail(table: CoeffTable, sigma: float, M: int, theta: float | None = None) -> float:
    return tail_from_abs(np.abs(table.values[1 : M + 1]), sigma, theta)
