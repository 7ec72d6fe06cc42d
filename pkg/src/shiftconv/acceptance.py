"""Acceptance suite: eleven numbered checks, each with its own tolerance and time budget."""
from __future__ import annotations

import math
import random
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np

from . import oracles
from .amplifier import (
    AmplifierSpec,
    ExponentInput,
    exponent_calculator,
    moment_S,
    plancherel_check,
)
from .arith import (
    characters,
    delta_rep,
    dirichlet_char,
    euler_phi,
    formal_ones_rep,
    gauss_sum,
    named_table,
    prime_sieve,
    ramanujan_tau,
)
from .lfunc import AFEConfig, analytic_conductor, central_value
from .mellin import MellinSpec, constant_coeff_mellin_closed, constant_coeff_mellin_numeric
from .quadforms import QuadraticForm, SphericalPoly, theta_coeffs
from .shifted import (
    FourierSeries,
    HypothesisWarning,
    WeightFn,
    alias_free_size,
    assemble_projected_series,
    fourier_unfold_check,
    growth_experiment,
    growth_prediction,
    linear_shift_sum,
    quad_shift_sum,
)
from .special import WhittakerParams, whittaker_mellin_lhs, whittaker_mellin_rhs, whittaker_star_gram

THETA0 = Fraction(7, 64)


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float
    budget: float

    @property
    def in_budget(self) -> bool:
        return self.elapsed <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed and self.in_budget else "FAIL"
        extra = "" if self.in_budget else f" (over budget {self.budget:g} s)"
        return f"[{status}] {self.number:2d} {self.title}: {self.detail} [{self.elapsed:.2f} s]{extra}"


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def c1_whittaker_mellin() -> Tuple[bool, str]:
    worst = 0.0
    for kappa, nu in ((0.5, 0.0), (0.0, 0.3), (0.0, 0.5j)):
        p = WhittakerParams(kappa, nu)
        for s in (1.0, 1.5, 2.0):
            worst = max(worst, _rel(whittaker_mellin_lhs(p, s), whittaker_mellin_rhs(p, s)))
    # kappa = nu + 1/2: W is elementary and the identity is checked on it
    closed = 0.0
    for nu, s in ((0.0, 1.0), (0.25, 1.5), (0.5, 2.0)):
        p = WhittakerParams(nu + 0.5, nu)
        closed = max(closed, _rel(whittaker_mellin_lhs(p, s), whittaker_mellin_rhs(p, s)))
    ok = worst <= 1e-6 and closed <= 1e-10
    return ok, f"max rel err {worst:.2e} (tol 1e-6), closed-form case {closed:.2e} (tol 1e-10)"


def c2_mellin_routes() -> Tuple[bool, str]:
    T = named_table("delta", 2000)
    f = QuadraticForm.diagonal(1)
    spec = MellinSpec(T, f, SphericalPoly.one(1), 0.5, 0.0, 3.0)
    closed = constant_coeff_mellin_closed(spec, 2000).value
    numeric = constant_coeff_mellin_numeric(spec, 2000).value
    err = _rel(numeric, closed)
    return err <= 1e-6, f"closed {closed.real:.12g}, rel diff {err:.2e} (tol 1e-6)"


def c3_unfolding() -> Tuple[bool, str]:
    Y, M = 100.0, 2000
    W = WeightFn("compact_bump", 1.0, 1.0)
    worst = 0.0
    for name in ("delta", "sym2"):
        T = named_table(name, M + 2)
        for f in (QuadraticForm.diagonal(1), QuadraticForm.diagonal(1, 1)):
            one = SphericalPoly.one(f.k)
            G = FourierSeries.from_theta(theta_coeffs(f, one, M).r, Y)
            F = assemble_projected_series(T, T.degree, W, Y, M)
            N = alias_free_size(F, G)
            for alpha in (1, 2):
                quad, conv = fourier_unfold_check(F, G, alpha, N)
                direct = math.exp(2 * math.pi * alpha / Y) * quad_shift_sum(T, f, one, alpha, Y, W)
                scale = max(abs(direct), 1e-300)
                worst = max(worst, abs(quad - conv) / scale, abs(conv - direct) / scale)
    return worst <= 1e-9, f"max three-way rel diff {worst:.2e} (tol 1e-9)"


def c4_dual_paths() -> Tuple[bool, str]:
    W = WeightFn("compact_bump", 1.0, 1.0)
    T = named_table("delta", 5000)
    worst_q = 0.0
    forms = (
        QuadraticForm.diagonal(1),
        QuadraticForm.diagonal(1, 1),
        QuadraticForm.from_upper(2, [2, 1, 4]),
        QuadraticForm.diagonal(1, 1, 1),
    )
    for f in forms:
        p = SphericalPoly.one(f.k)
        for alpha in (1, 2, -1, 5):
            a = quad_shift_sum(T, f, p, alpha, 500, W, route="lattice")
            b = quad_shift_sum(T, f, p, alpha, 500, W, route="theta")
            worst_q = max(worst_q, abs(a - b) / max(abs(b), 1e-300))
    worst_l = 0.0
    S2 = named_table("sym2", 5000)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        for l1 in range(1, 11):
            for l2 in range(1, 11):
                for alpha in (1, -1, 5):
                    a = linear_shift_sum(T, S2, l1, l2, alpha, 400, W, W)
                    b = oracles.linear_pairs_bruteforce(T, S2, l1, l2, alpha, 400, W, W)
                    worst_l = max(worst_l, abs(a - b) / max(abs(b), 1e-12))
    ok = worst_q <= 1e-12 and worst_l <= 1e-12
    return ok, f"quadratic lattice/theta {worst_q:.2e}, linear scan/pairs {worst_l:.2e} (tol 1e-12)"


def c5_afe() -> Tuple[bool, str]:
    rep = delta_rep(10**6)
    chi = dirichlet_char(5, 2)
    vals = []
    for width in (1.0, 2.0):
        for mult in (1.0, 2.0):
            vals.append(central_value(rep, chi, AFEConfig(kernel_width=width, cutoff_multiplier=mult)).value)
    spread = max(abs(a - b) for a in vals for b in vals)
    imag = max(abs(v.imag) for v in vals)
    z = oracles.zeta_half_eta()
    ones = central_value(formal_ones_rep(2), dirichlet_char(1, 0)).value
    zerr = abs(ones - z * z)
    ok = spread <= 1e-6 and imag <= 1e-8 and zerr <= 1e-4
    return ok, (
        f"L = {vals[0].real:.10f}, pairwise spread {spread:.1e} (tol 1e-6), |Im| {imag:.1e} (tol 1e-8); "
        f"zeta(1/2)^2 {ones.real:.7f} vs oracle {z * z:.7f}, diff {zerr:.1e} (tol 1e-4)"
    )


def c6_conductor() -> Tuple[bool, str]:
    rep = delta_rep(100)
    C5 = analytic_conductor(rep, 5, 1)
    target = 25 * 9 * 12.25 / math.pi**2
    err = abs(C5 - target) / target
    scale = max(
        abs(analytic_conductor(rep, q, 1) / analytic_conductor(rep, 1, 1) - q**2) / q**2 for q in (2, 3, 7, 101)
    )
    ok = err <= 1e-12 and scale <= 1e-12
    return ok, f"C(q=5) = {C5:.12g}, rel err {err:.1e}; q^n scaling err {scale:.1e} (tol 1e-12)"


def c7_exponents() -> Tuple[bool, str]:
    th = THETA0
    a = exponent_calculator(ExponentInput(4, th, Fraction(1, 4) - th / 2))[0]
    ua = float(Fraction(1, 4) - th / 2)
    a_float = exponent_calculator(ExponentInput(4, float(th), ua))[0]
    ok_a = a == Fraction(3, 8) + th / 4 and abs(a_float - float(Fraction(3, 8) + th / 4)) <= 1e-15
    ub = (1 - 6 * th) / (14 - 4 * th)
    b = exponent_calculator(ExponentInput(3, float(th), float(ub)))[0]
    target_b = (13 + 2 * th) / (2 * (14 - 4 * th))
    ok_b = abs(b - float(target_b)) <= 1e-15
    c = exponent_calculator(ExponentInput(4, th, 0))[2]
    ok_c = c == Fraction(39, 64)
    return ok_a and ok_b and ok_c, f"(a) {a} (b) {b:.16f} vs {float(target_b):.16f} (c) {c}"


def c8_amplifier() -> Tuple[bool, str]:
    rng = random.Random(20240611)
    primes = [p for p in prime_sieve(101).tolist() if p > 2]
    worst = 0.0
    for _ in range(100):
        q = rng.choice(primes)
        idx = rng.randrange(euler_phi(q))
        ls = rng.sample([l for l in range(1, 400) if l % q], rng.randint(1, 12))
        A = {l: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for l in ls}
        lhs, rhs = plancherel_check(q, idx, None, A)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    T = named_table("delta", 2000)
    lower_ok = True
    for q in (5, 7, 13):
        for L in (10, 20):
            for idx in range(euler_phi(q)):
                r = moment_S(T, q, idx, AmplifierSpec(q, idx, L, 500))
                lower_ok &= r.S - r.lower_bound >= -1e-12 * r.S
    ok = worst <= 1e-10 and lower_ok
    return ok, f"Plancherel max rel err {worst:.1e} over 100 draws (tol 1e-10); lower bound holds: {lower_ok}"


def c9_arithmetic() -> Tuple[bool, str]:
    B = 10**5
    tau = [0] + ramanujan_tau(B)
    arr = np.array(tau, dtype=object)
    bad_mult = 0
    for m in range(2, int(math.isqrt(B)) + 1):
        n = np.arange(m + 1, B // m + 1)
        n = n[np.gcd(n, m) == 1]
        bad_mult += int(np.count_nonzero(arr[m * n] != arr[m] * arr[n]))
    bad_hecke = 0
    for p in prime_sieve(B).tolist():
        pk = p
        while pk * p <= B:
            if tau[pk * p] != tau[p] * tau[pk] - p**11 * tau[pk // p]:
                bad_hecke += 1
            pk *= p
    T = named_table("delta", 10**4)
    ps = prime_sieve(10**4)
    deligne = float(np.max(np.abs(T.take(ps))))
    orth = 0.0
    gauss = 0.0
    for q in (3, 4, 5, 7, 8, 9, 11, 12, 13, 16, 25, 27, 49):
        try:
            chars = characters(q)
        except Exception:
            continue
        V = np.array([c.values for c in chars])
        G = V @ V.conj().T
        orth = max(orth, float(np.max(np.abs(G - euler_phi(q) * np.eye(len(chars))))))
        for c in chars:
            if c.primitive:
                gauss = max(gauss, abs(abs(gauss_sum(c)) - math.sqrt(q)))
    ok = bad_mult == 0 and bad_hecke == 0 and deligne <= 2 + 1e-9 and orth <= 1e-12 and gauss <= 1e-10
    return ok, (
        f"multiplicativity failures {bad_mult}, Hecke failures {bad_hecke}, max |c(p)| {deligne:.6f}, "
        f"orthogonality {orth:.1e}, Gauss {gauss:.1e}"
    )


def c10_growth() -> Tuple[bool, str]:
    Ys = [1e3, 3e3, 1e4, 3e4, 1e5]
    T = named_table("delta", 200001)
    _, fit = growth_experiment(T, QuadraticForm.diagonal(1), 1, Ys)
    pred = growth_prediction(1, float(THETA0))
    ok = fit.slope <= pred + 0.15
    return ok, f"slope {fit.slope:.3f}, prediction {pred:.4f} + 0.15"


def c11_orthonormality() -> Tuple[bool, str]:
    G = whittaker_star_gram([0, 2, 4], 0.4j)
    err = float(np.max(np.abs(G - np.eye(3))))
    return err <= 1e-4, f"max |<W*_k1, W*_k2> - delta| = {err:.1e} (tol 1e-4)"


CRITERIA: List[Tuple[int, str, Callable[[], Tuple[bool, str]], float]] = [
    (1, "Whittaker-Mellin identity", c1_whittaker_mellin, 5),
    (2, "Mellin closed vs numeric", c2_mellin_routes, 30),
    (3, "unfolding three-way", c3_unfolding, 30),
    (4, "dual-path oracles", c4_dual_paths, 30),
    (5, "AFE kernel robustness", c5_afe, 120),
    (6, "analytic conductor", c6_conductor, 1),
    (7, "exponent algebra", c7_exponents, 1),
    (8, "amplifier bookkeeping", c8_amplifier, 60),
    (9, "arithmetic engine", c9_arithmetic, 60),
    (10, "growth experiment", c10_growth, 120),
    (11, "W* orthonormality", c11_orthonormality, 60),
]


def run_one(number: int) -> Outcome:
    for num, title, fn, budget in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, reported as such
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return Outcome(num, title, ok, detail, time.perf_counter() - t0, budget)
    raise KeyError(number)


def run_all(emit: Callable[[str], None] | None = None, numbers: Sequence[int] | None = None) -> List[Outcome]:
    out = []
    for num, *_ in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        o = run_one(num)
        if emit:
            emit(o.line())
        out.append(o)
    return out
