"""Gamma factors and classical Whittaker functions W_{kappa,nu}.

W is evaluated from the Laplace-type integral

    W_{k,m}(y) = e^{-y/2} y^k / Gamma(m-k+1/2)
                 * int_0^inf e^{-t} t^{m-k-1/2} (1 + t/y)^{m+k-1/2} dt,

valid while Re(m - k + 1/2) > 0.  Larger kappa is reached by the three-term
recurrence in kappa, and kappa = nu + 1/2 has the closed form y^{nu+1/2} e^{-y/2}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, PoleError

# Lanczos approximation, g = 7, nine terms
_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_SQRT_2PI = math.sqrt(2 * math.pi)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _lanczos(z: np.ndarray) -> np.ndarray:
    z = z - 1
    x = np.full(z.shape, _LANCZOS[0], dtype=complex)
    for i in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * np.exp(-t) * x


def gamma_array(z) -> np.ndarray:
    """Vectorised complex Gamma; raises PoleError at nonpositive integers."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    for zz in flat:
        if _is_nonpositive_integer(complex(zz)):
            raise PoleError(f"Gamma has a pole at {complex(zz).real:g}")
    out = np.empty(flat.shape, dtype=complex)
    left = flat.real < 0.5
    right = ~left
    out[right] = _lanczos(flat[right])
    if left.any():
        zl = flat[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * _lanczos(1 - zl))
    return out.reshape(z.shape)


def gamma(z):
    """Gamma function; real in, real out."""
    val = complex(gamma_array(complex(z)))
    if isinstance(z, (int, float, np.floating, np.integer)):
        return val.real
    return val


def gamma_r(s):
    """``pi^{-s/2} Gamma(s/2)``."""
    sc = complex(s)
    if _is_nonpositive_integer(sc / 2):
        raise PoleError(f"Gamma_R has a pole at s = {sc.real:g}")
    val = cmath.exp(-sc / 2 * math.log(math.pi)) * complex(gamma_array(sc / 2))
    if isinstance(s, (int, float, np.floating, np.integer)):
        return val.real
    return val


def gamma_r_array(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    return np.exp(-s / 2 * math.log(math.pi)) * gamma_array(s / 2)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-15
    max_subdivisions: int = 200
    truncation_radius: float = 200.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class WhittakerParams:
    """Index pair (kappa, nu) of W_{kappa,nu}.

    kappa must be real.  nu may be real or purely imaginary; W is even in nu.
    """

    kappa: complex
    nu: complex

    def __post_init__(self):
        k, n = complex(self.kappa), complex(self.nu)
        if k.imag != 0:
            raise DomainError("complex kappa is not supported")
        if n.real != 0 and n.imag != 0:
            raise DomainError("nu must be real or purely imaginary")
        object.__setattr__(self, "kappa", k.real)
        object.__setattr__(self, "nu", n if n.imag != 0 else complex(n.real, 0.0))

    @property
    def mu(self) -> complex:
        """Representative of {nu, -nu} with nonnegative real part."""
        return self.nu if self.nu.real >= 0 else -self.nu

    @property
    def closed_form(self) -> bool:
        return abs(self.kappa - self.mu - 0.5) < 1e-15 or abs(self.kappa + self.mu - 0.5) < 1e-15


def _quad_complex(f, a, b, cfg: QuadratureConfig, **kw) -> complex:
    def run(g):
        val, err, *info = integrate.quad(
            g,
            a,
            b,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions,
            full_output=1,
            **kw,
        )
        if len(info) > 1 and "roundoff" not in info[1] and err > max(cfg.abs_tol, 1e-6 * abs(val)):
            raise ConvergenceError(f"quadrature did not converge on [{a}, {b}]: {info[1]}")
        return val

    re = run(lambda t: f(t).real)
    im = run(lambda t: f(t).imag)
    return complex(re, im)


# trapezoid step in x = log t; the integrand is analytic in |Im x| < pi/2 and the
# rule converges geometrically, 1/20 leaves a wide margin below 1e-14
_TRAP_STEP = 0.05


def _w_integral(kappa: float, mu: complex, y) -> np.ndarray:
    """Integral representation after t = e^x, vectorised in y."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a = mu - kappa + 0.5
    b = mu + kappa - 0.5
    # below t ~ min(y, 1) the integrand decays like t^{Re a}
    lo = min(0.0, math.log(y.min())) - 44.0 / a.real
    hi = math.log(60.0 + 3.0 * abs(a + b) + 0.0)
    x = np.arange(lo, hi + _TRAP_STEP, _TRAP_STEP)
    et = np.exp(x)
    logf = a * x[None, :] - et[None, :] + b * np.log1p(et[None, :] / y[:, None])
    log_pref = -y / 2 + kappa * np.log(y) - complex(np.log(gamma_array(a)))
    # factor out the row maximum so that large exponents cannot overflow
    shift = logf.real.max(axis=1)
    total = np.exp(logf - shift[:, None]).sum(axis=1) * _TRAP_STEP
    return np.exp(log_pref + shift) * total


def whittaker_w_array(params: WhittakerParams, y) -> np.ndarray:
    """W_{kappa,nu} on an array of positive y; complex dtype."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(~(y > 0)):
        raise DomainError("W is evaluated on y > 0")
    kappa, mu = params.kappa, params.mu
    if params.closed_form:
        return np.exp(-y / 2 + kappa * np.log(y)).astype(complex)
    if (mu - kappa + 0.5).real > 0.5:
        return _w_integral(kappa, mu, y)
    # climb in kappa from two starting values with Re(mu - kappa + 1/2) > 1/2
    steps = math.floor(kappa - mu.real) + 1
    k0 = kappa - steps
    w_prev = _w_integral(k0 - 1, mu, y)
    w_cur = _w_integral(k0, mu, y)
    k = k0
    for _ in range(steps):
        w_next = (y - 2 * k) * w_cur - (k - mu - 0.5) * (k + mu - 0.5) * w_prev
        w_prev, w_cur = w_cur, w_next
        k += 1
    return w_cur


def whittaker_w(params: WhittakerParams, y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """W_{kappa,nu}(y) for y > 0.

    Real kappa with real or imaginary nu gives a real function, so a float is
    returned.  ``cfg`` is accepted for signature symmetry with the quadrature
    routines; the inner integral uses a fixed-step rule.
    """
    if not y > 0:
        raise DomainError("W is evaluated on y > 0")
    return float(whittaker_w_array(params, [y])[0].real)


def bessel_k_integral(nu: complex, z: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """K_nu(z) from ``int_0^inf exp(-z cosh t) cosh(nu t) dt``."""
    if z <= 0:
        raise DomainError("K_nu(z) needs z > 0")
    nu = complex(nu)
    upper = math.acosh(max(1.0, 750.0 / z)) + 5.0
    return _quad_complex(lambda t: cmath.exp(-z * math.cosh(t)) * cmath.cosh(nu * t), 0.0, upper, cfg)


def _check_mellin_domain(params: WhittakerParams, s: complex):
    # e^{-y/2} W(y) ~ y^{1/2 - |Re nu|} at 0, so the integral needs Re(s) > |Re nu| - 1/2
    if not s.real > abs(params.nu.real) - 0.5:
        raise DomainError(f"Mellin integral diverges at s = {s}: need Re(s) > |Re nu| - 1/2")


def whittaker_mellin_rhs(params: WhittakerParams, s: complex) -> complex:
    """``Gamma(1/2+s+nu) Gamma(1/2+s-nu) / Gamma(1+s-kappa)``."""
    s = complex(s)
    _check_mellin_domain(params, s)
    num = gamma_array([0.5 + s + params.nu, 0.5 + s - params.nu])
    den_arg = 1 + s - params.kappa
    if _is_nonpositive_integer(den_arg):
        # reciprocal Gamma vanishes at its poles
        return 0j
    return complex(num[0] * num[1] / gamma_array(den_arg))


def mellin_integral(
    params: WhittakerParams, s: complex, scale: float = 1.0, cfg: QuadratureConfig = DEFAULT_QUAD
) -> complex:
    """``int_0^inf e^{-scale y/2} W(scale y) y^{s-1} dy``, integrated in y itself.

    Equals ``scale^{-s}`` times the unit-scale transform; the quadrature is not
    rescaled so that the identity is tested rather than assumed.
    """
    s = complex(s)
    _check_mellin_domain(params, s)
    if scale <= 0:
        raise DomainError("scale must be positive")

    def f(y):
        t = scale * y
        return math.exp(-t / 2) * whittaker_w(params, t, cfg) * cmath.exp((s - 1) * math.log(y))

    R = cfg.truncation_radius
    pts = [0.0] + [b / scale for b in (1.0, 10.0, 50.0) if b < R] + [R / scale]
    total = 0j
    for a, b in zip(pts, pts[1:]):
        total += _quad_complex(f, a, b, cfg)
    return total


def whittaker_mellin_lhs(params: WhittakerParams, s: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """``int_0^R e^{-y/2} W_{kappa,nu}(y) y^{s-1} dy`` by adaptive quadrature.

    The exponential enters with a minus sign; with e^{+y/2} the integral
    diverges and cannot equal the Gamma quotient of ``whittaker_mellin_rhs``.
    """
    return mellin_integral(params, s, 1.0, cfg)


def whittaker_bound_check(params: WhittakerParams, epsilon: float, y_grid: Sequence[float]) -> float:
    """Empirical sup of ``|W/Gamma(1/2+nu+kappa)| / y^{1/2-|Re nu|-eps}`` on the grid."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if params.nu.imag == 0 and abs(params.nu.real) >= 0.5:
        raise DomainError("bound check needs |nu| < 1/2 or imaginary nu")
    norm_arg = 0.5 + params.nu + params.kappa
    if _is_nonpositive_integer(norm_arg):
        raise PoleError("normalising Gamma factor has a pole")
    norm = abs(complex(gamma_array(norm_arg)))
    expo = 0.5 - abs(params.nu.real) - epsilon
    best = 0.0
    for y in y_grid:
        if not 0 < y <= 1:
            raise DomainError("grid points must lie in (0, 1]")
        best = max(best, abs(whittaker_w(params, y)) / norm / y**expo)
    return best


# ---------------------------------------------------------------------------
# normalised Whittaker functions on R^x


def _star_admissible(k: int, nu: complex) -> bool:
    nu = complex(nu)
    if nu.real == 0:
        return True
    if nu.imag != 0:
        return False
    x = nu.real
    if k % 2 == 0:
        return abs(x) < 0.5 or float(x - 0.5).is_integer()
    return float(x).is_integer()


def _star_norm(k: int, nu: complex, sign: int) -> complex:
    kap = sign * k / 2
    g = gamma_array([0.5 - nu + kap, 0.5 + nu + kap])
    return cmath.sqrt(g[0] * g[1])


def whittaker_star(k: int, nu: complex, y: float) -> complex:
    """Normalised ``W*_{k/2,nu}(y)`` on the punctured real line."""
    if not _star_admissible(k, nu):
        raise DomainError(f"nu = {nu} is not admissible for parity of k = {k}")
    if y == 0:
        raise DomainError("W* is defined for y != 0")
    sign = 1 if y > 0 else -1
    kap = sign * k / 2
    w = whittaker_w(WhittakerParams(kap, nu), 4 * math.pi * abs(y))
    return (1j) ** (sign * k / 2) * w / _star_norm(k, nu, sign)


def whittaker_star_gram(
    ks: Sequence[int],
    nu: complex,
    ymin: float = 1e-6,
    ymax: float = 50.0,
    panels: int = 60,
    order: int = 20,
) -> np.ndarray:
    """Matrix of truncated inner products over ymin <= |y| <= ymax, measure dy/|y|.

    Composite Gauss-Legendre in log|y|; each W* is sampled once per node.
    """
    for k in ks:
        if not _star_admissible(k, nu):
            raise DomainError(f"nu = {nu} is not admissible for k = {k}")
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(math.log(ymin), math.log(ymax), panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges, edges[1:]):
        nodes.append((b - a) / 2 * x + (a + b) / 2)
        weights.append((b - a) / 2 * wts)
    u = np.concatenate(nodes)
    wq = np.concatenate(weights)
    ys = np.exp(u)
    samples = {}
    for k in ks:
        for sign in (1, -1):
            samples[k, sign] = np.array([whittaker_star(k, nu, sign * y) for y in ys])
    gram = np.zeros((len(ks), len(ks)), dtype=complex)
    for i, k1 in enumerate(ks):
        for j, k2 in enumerate(ks):
            tot = 0j
            for sign in (1, -1):
                tot += np.sum(wq * samples[k1, sign] * np.conj(samples[k2, sign]))
            gram[i, j] = tot
    return gram
