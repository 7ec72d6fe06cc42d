"""Multiplicative coefficient tables, Satake data, and Dirichlet characters.

The GL(2) seed is the discriminant form Delta.  Its Fourier coefficients are
obtained by expanding ``q * prod(1 - q^k)^24``; higher-degree surrogates are
symmetric-power lifts built formally from local Satake parameters.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence, TextIO

import gmpy2
import numpy as np

from ._summation import rsum
from .errors import DomainError, ResourceError, UnsupportedModulusError

COEFF_CEILING = 10**6

DELTA_WEIGHT = 12
DELTA_ARCH = (5.5, 6.5)


class DescriptorWarning(UserWarning):
    """A representation descriptor fails one of its sanity gates."""


# ---------------------------------------------------------------------------
# elementary number theory


def prime_sieve(n: int) -> np.ndarray:
    """Return all primes <= n in ascending order."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


# ---------------------------------------------------------------------------
# exact power-series arithmetic via Kronecker substitution


def _slot_bits(bound_bits: int) -> int:
    # one sign bit of headroom, rounded up to whole bytes
    return 8 * ((bound_bits + 1 + 7) // 8)


def _pack_signed(coeffs: dict[int, int], w: int, n: int) -> gmpy2.mpz:
    """Pack ``sum c_i X^i`` into an integer modulo ``2^(w n)`` with ``X = 2^w``."""
    nbytes = w // 8
    pos = bytearray(n * nbytes)
    neg = bytearray(n * nbytes)
    for i, c in coeffs.items():
        if c == 0 or i >= n:
            continue
        buf = pos if c > 0 else neg
        buf[i * nbytes : (i + 1) * nbytes] = abs(c).to_bytes(nbytes, "little")
    value = gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))
    return gmpy2.f_mod_2exp(value, w * n)


def _unpack_signed(packed: gmpy2.mpz, w: int, n: int) -> list[int]:
    nbytes = w // 8
    bias_slot = b"\x00" * (nbytes - 1) + b"\x80"
    bias = gmpy2.mpz(int.from_bytes(bias_slot * n, "little"))
    shifted = gmpy2.f_mod_2exp(packed + bias, w * n)
    raw = int(shifted).to_bytes(n * nbytes, "little")
    half = 1 << (w - 1)
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(n)]


def euler_product_series(n: int) -> dict[int, int]:
    """Coefficients of ``prod_{k>=1} (1 - q^k)`` below degree n (sparse)."""
    out: dict[int, int] = {0: 1}
    j = 1
    while True:
        e1 = j * (3 * j - 1) // 2
        e2 = j * (3 * j + 1) // 2
        if e1 >= n:
            break
        sign = -1 if j % 2 else 1
        out[e1] = sign
        if e2 < n:
            out[e2] = sign
        j += 1
    return out


def _series_power_packed(base: dict[int, int], exponent: int, n: int, w: int) -> gmpy2.mpz:
    packed = _pack_signed(base, w, n)
    result = None
    square = packed
    nbits = w * n
    e = exponent
    while e:
        if e & 1:
            result = square if result is None else gmpy2.f_mod_2exp(result * square, nbits)
        e >>= 1
        if e:
            square = gmpy2.f_mod_2exp(square * square, nbits)
    return result


_TAU_CACHE: list[int] = []


def ramanujan_tau(M: int, ceiling: int = COEFF_CEILING) -> list[int]:
    """Exact ``tau(1..M)`` as a list indexed from 0 (``tau[0]`` is tau(1))."""
    global _TAU_CACHE
    if M < 1:
        raise DomainError(f"bound must be >= 1, got {M}")
    if M > ceiling:
        raise ResourceError(f"coefficient bound {M} exceeds ceiling {ceiling}")
    if len(_TAU_CACHE) >= M:
        return _TAU_CACHE[:M]
    # |tau(m)| <= d(m) m^(11/2) < m^(13/2)
    w = _slot_bits(int(6.5 * math.log2(M + 1)) + 2)
    base = euler_product_series(M)
    packed = _series_power_packed(base, 24, M, w)
    _TAU_CACHE = _unpack_signed(packed, w, M)
    return _TAU_CACHE[:M]


# ---------------------------------------------------------------------------
# coefficient tables


@dataclass(frozen=True)
class CoeffTable:
    """Dense table ``m -> c(m)`` for ``1 <= m <= bound``; index 0 holds 0."""

    name: str
    degree: int
    bound: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.bound + 1,):
            raise DomainError(f"values must have length bound+1={self.bound + 1}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __call__(self, m: int) -> complex:
        m = abs(int(m))
        if m > self.bound:
            raise ResourceError(f"coefficient c({m}) beyond table bound {self.bound}")
        return complex(self.values[m])

    def take(self, ms) -> np.ndarray:
        """Vectorised lookup; negative arguments map to ``c(|m|)``."""
        idx = np.abs(np.asarray(ms, dtype=np.int64))
        if idx.size and idx.max() > self.bound:
            raise ResourceError(f"coefficient index {idx.max()} beyond table bound {self.bound}")
        return self.values[idx]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    def truncated(self, M: int) -> "CoeffTable":
        if M > self.bound:
            raise ResourceError(f"cannot truncate table of bound {self.bound} to {M}")
        return CoeffTable(self.name, self.degree, M, self.values[: M + 1].copy())


def delta_coefficients(M: int, ceiling: int = COEFF_CEILING) -> CoeffTable:
    """Normalised coefficients ``tau(m) / m^(11/2)`` of Delta up to M."""
    tau = ramanujan_tau(M, ceiling)
    m = np.arange(1, M + 1, dtype=float)
    vals = np.zeros(M + 1, dtype=complex)
    vals[1:] = np.array(tau, dtype=float) / m**5.5
    return CoeffTable("delta", 2, M, vals)


# ---------------------------------------------------------------------------
# Satake parameters and representation surrogates


@dataclass(frozen=True)
class SatakeLocal:
    prime: int
    params: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.params)

    def product_modulus(self) -> float:
        prod = complex(1.0)
        for a in self.params:
            prod *= a
        return abs(prod)


def satake_from_coeff(p: int, cp: complex) -> SatakeLocal:
    """Roots of ``X^2 - cp X + 1`` ordered by nonincreasing modulus."""
    cp = complex(cp)
    disc = cmath.sqrt(cp * cp - 4)
    a = (cp + disc) / 2
    b = (cp - disc) / 2
    if abs(b) > abs(a):
        a, b = b, a
    return SatakeLocal(int(p), (a, b))


@dataclass(frozen=True)
class RepDescriptor:
    """A degree-n representation surrogate described by its local data."""

    name: str
    degree: int
    arch_params: tuple[complex, ...]
    satake_source: Callable[[int], SatakeLocal] = field(repr=False, compare=False)
    selfdual: bool = True
    conductor: int = 1
    max_prime: int | None = None

    def __post_init__(self):
        if self.degree < 2:
            raise DomainError("degree must be >= 2")
        if len(self.arch_params) != self.degree:
            raise DomainError("need one archimedean parameter per degree")
        for msg in self.validate():
            warnings.warn(f"{self.name}: {msg}", DescriptorWarning, stacklevel=3)

    def validate(self) -> list[str]:
        msgs = []
        lrs = 1.0 / (self.degree**2 + 1)
        worst = max(complex(mu).real for mu in self.arch_params)
        if worst > lrs:
            msgs.append(f"max Re(mu) = {worst:g} exceeds 1/(n^2+1) = {lrs:g}")
        if self.selfdual:
            mus = sorted((complex(m) for m in self.arch_params), key=lambda z: (z.real, z.imag))
            conj = sorted((complex(m).conjugate() for m in self.arch_params), key=lambda z: (z.real, z.imag))
            if any(abs(x - y) > 1e-9 for x, y in zip(mus, conj)):
                msgs.append("archimedean parameters not closed under conjugation")
        return msgs

    def satake(self, p: int) -> SatakeLocal:
        if self.max_prime is not None and p > self.max_prime:
            raise ResourceError(f"{self.name}: no Satake data beyond p = {self.max_prime}")
        return self.satake_source(p)


def delta_rep(bound: int, ceiling: int = COEFF_CEILING) -> RepDescriptor:
    table = delta_coefficients(bound, ceiling)

    def source(p: int) -> SatakeLocal:
        return satake_from_coeff(p, table(p))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DescriptorWarning)
        return RepDescriptor("delta", 2, DELTA_ARCH, source, selfdual=True, max_prime=bound)


def formal_ones_rep(degree: int = 2) -> RepDescriptor:
    """Formal Eisenstein-type descriptor: every Satake parameter equals 1."""

    def source(p: int) -> SatakeLocal:
        return SatakeLocal(p, (1.0 + 0j,) * degree)

    return RepDescriptor("formal_ones", degree, (0.0,) * degree, source, selfdual=True)


def sym_power_rep(seed: RepDescriptor, r: int) -> RepDescriptor:
    """Formal r-th symmetric power of a degree-2 descriptor."""
    if seed.degree != 2:
        raise DomainError("symmetric powers are built from a degree-2 seed")
    if r < 1:
        raise DomainError("r must be >= 1")
    if r == 1:
        return seed
    mu1, mu2 = seed.arch_params
    arch = tuple((r - i) * mu1 + i * mu2 for i in range(r + 1))

    def source(p: int) -> SatakeLocal:
        a, b = seed.satake(p).params
        return SatakeLocal(p, tuple(a ** (r - i) * b**i for i in range(r + 1)))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DescriptorWarning)
        return RepDescriptor(
            f"sym{r}({seed.name})" if seed.name != "delta" else f"sym{r}",
            r + 1,
            arch,
            source,
            selfdual=seed.selfdual,
            conductor=seed.conductor,
            max_prime=seed.max_prime,
        )


def complete_homogeneous(params: Sequence[complex], K: int) -> np.ndarray:
    """``h_0..h_K`` of the given variables, from ``prod (1 - a X)^-1``."""
    h = np.zeros(K + 1, dtype=complex)
    h[0] = 1.0
    for a in params:
        for k in range(1, K + 1):
            h[k] += a * h[k - 1]
    return h


def coeff_from_satake(rep: RepDescriptor, M: int, ceiling: int = COEFF_CEILING) -> CoeffTable:
    """Multiplicative table with ``c(p^k) = h_k(Satake parameters at p)``."""
    if M < 1:
        raise DomainError("bound must be >= 1")
    if M > ceiling:
        raise ResourceError(f"coefficient bound {M} exceeds ceiling {ceiling}")
    vals = np.ones(M + 1, dtype=complex)
    vals[0] = 0.0
    for p in prime_sieve(M).tolist():
        K = int(math.log(M) / math.log(p)) + 1
        while p**K > M:
            K -= 1
        h = complete_homogeneous(rep.satake(p).params, K)
        if K == 1:
            vals[p::p] *= h[1]
            continue
        pk = p
        for k in range(1, K + 1):
            idx = np.arange(pk, M + 1, pk)
            idx = idx[idx % (pk * p) != 0]
            vals[idx] *= h[k]
            pk *= p
    return CoeffTable(rep.name, rep.degree, M, vals)


REP_NAMES = ("delta", "sym2", "sym3", "formal_ones")


@lru_cache(maxsize=16)
def named_table(name: str, bound: int) -> CoeffTable:
    """Coefficient table for one of the named surrogates."""
    if name == "delta":
        return delta_coefficients(bound)
    return coeff_from_satake(named_rep(name, bound), bound)


def named_rep(name: str, bound: int) -> RepDescriptor:
    if name == "delta":
        return delta_rep(bound)
    if name == "sym2":
        return sym_power_rep(delta_rep(bound), 2)
    if name == "sym3":
        return sym_power_rep(delta_rep(bound), 3)
    if name == "formal_ones":
        return formal_ones_rep(2)
    raise DomainError(f"unknown representation {name!r}; expected one of {REP_NAMES}")


def rankin_selberg_partial(table: CoeffTable, Y: int) -> float:
    """``sum_{m <= Y} |c(m)|^2``."""
    if not 1 <= Y <= table.bound:
        raise ResourceError(f"Y = {Y} outside 1..{table.bound}")
    return rsum(np.abs(table.values[1 : Y + 1]) ** 2)


# ---------------------------------------------------------------------------
# text format


def write_table(table: CoeffTable, dest: str | Path | TextIO) -> None:
    lines = [f"# rep={table.name} degree={table.degree} bound={table.bound}\n"]
    for m in range(1, table.bound + 1):
        z = table.values[m]
        lines.append(f"{m} {z.real:.17g} {z.imag:.17g}\n")
    if isinstance(dest, (str, Path)):
        Path(dest).write_text("".join(lines))
    else:
        dest.writelines(lines)


def read_table(src: str | Path | TextIO) -> CoeffTable:
    text = Path(src).read_text() if isinstance(src, (str, Path)) else src.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DomainError("missing '# rep=... degree=... bound=...' header")
    header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    try:
        name, degree, bound = header["rep"], int(header["degree"]), int(header["bound"])
    except KeyError as exc:
        raise DomainError(f"header lacks {exc.args[0]!r}") from None
    vals = np.zeros(bound + 1, dtype=complex)
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"line {lineno}: expected 'm re im'")
        m = int(parts[0])
        if not 0 <= m <= bound:
            raise DomainError(f"line {lineno}: index {m} outside 0..{bound}")
        vals[m] = complex(float(parts[1]), float(parts[2]))
        seen += 1
    return CoeffTable(name, degree, bound, vals)


# ---------------------------------------------------------------------------
# Dirichlet characters


def _unit_group_cyclic(q: int) -> bool:
    if q in (1, 2, 4):
        return True
    fac = factorize(q)
    return len(fac) == 1 and 2 not in fac


def primitive_root(q: int) -> int:
    if not _unit_group_cyclic(q):
        raise UnsupportedModulusError(f"(Z/{q}Z)^x is not cyclic or modulus unsupported")
    if q <= 2:
        return 1
    phi = euler_phi(q)
    prime_divs = list(factorize(phi))
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // r, q) != 1 for r in prime_divs):
            return g
    raise UnsupportedModulusError(f"no primitive root modulo {q}")  # pragma: no cover


def _root_of_unity(num: int, den: int) -> complex:
    """``exp(2 pi i num/den)`` with exact values at quarter turns."""
    frac = Fraction(num % den, den)
    quarter = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if frac in quarter:
        return quarter[frac]
    return cmath.exp(2j * math.pi * float(frac))


@dataclass(frozen=True)
class DirichletChar:
    modulus: int
    index: int
    values: np.ndarray = field(repr=False, compare=False)
    parity: int
    conductor: int

    @property
    def primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    def __call__(self, a: int) -> complex:
        return complex(self.values[int(a) % self.modulus])

    def take(self, ms) -> np.ndarray:
        return self.values[np.asarray(ms, dtype=np.int64) % self.modulus]

    def conj(self) -> "DirichletChar":
        phi = euler_phi(self.modulus)
        return dirichlet_char(self.modulus, (-self.index) % phi)

    def inducing(self) -> "DirichletChar":
        """The primitive character inducing this one."""
        d = self.conductor
        if d == self.modulus:
            return self
        for idx in range(euler_phi(d)):
            cand = dirichlet_char(d, idx)
            if all(
                abs(cand(a) - self(a)) < 1e-12
                for a in range(1, self.modulus)
                if math.gcd(a, self.modulus) == 1
            ):
                return cand
        raise DomainError("no inducing character found")  # pragma: no cover


def _conductor(values: np.ndarray, q: int) -> int:
    units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(abs(values[a % q] - 1) < 1e-12 for a in units if a % d == 1 % d):
            return d
    return q


@lru_cache(maxsize=4096)
def dirichlet_char(q: int, index: int) -> DirichletChar:
    """Character mod q sending the least primitive root g to ``e(index/phi(q))``."""
    if q < 1:
        raise DomainError("modulus must be positive")
    g = primitive_root(q)
    phi = euler_phi(q)
    if not 0 <= index < phi:
        raise DomainError(f"index must lie in 0..{phi - 1}")
    values = np.zeros(q, dtype=complex)
    if q == 1:
        values[0] = 1.0
    else:
        x = 1
        for j in range(phi):
            values[x] = _root_of_unity(index * j, phi)
            x = x * g % q
    values.flags.writeable = False
    parity = 1 if q <= 2 else int(round(values[q - 1].real))
    return DirichletChar(q, index, values, parity, _conductor(values, q))


def characters(q: int) -> list[DirichletChar]:
    return [dirichlet_char(q, i) for i in range(euler_phi(q))]


def gauss_sum(chi: DirichletChar) -> complex:
    """``sum_a chi(a) e(a/q)`` for primitive chi."""
    if not chi.primitive:
        raise DomainError(f"Gauss sum requires a primitive character (conductor {chi.conductor} != {chi.modulus})")
    q = chi.modulus
    a = np.arange(q)
    return complex(np.sum(chi.values * np.exp(2j * np.pi * a / q)))
