"""Multiplicative number theory and Dirichlet characters.

Exact building blocks shared by the closed-form Petersson machinery:
integer factorization with certified primality, divisor counts, indices
of the groups Gamma_0(N) inside each other, the local factors
prod_{p | n, p not| N} (1 + 1/p), Kronecker symbols, and Dirichlet
characters whose values are kept exact (0, +-1, or explicit roots of
unity).  Everything here is deterministic and desk-scale; the heavy
numerics live downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2

__all__ = [
    "is_prime",
    "factor",
    "Factorization",
    "divisors",
    "sigma0",
    "mobius",
    "index_gamma0",
    "local_factor_product",
    "kronecker_symbol",
    "RootOfUnity",
    "DirichletCharacter",
    "induce_character",
]


def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [p for p in range(limit + 1) if flags[p]]


_SMALL_PRIMES = _sieve(1000)

# Deterministic Miller-Rabin witness set for n < 3.3 * 10^24
# (Sorenson-Webster), far beyond the desk scale handled here.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Certified primality for desk-scale integers."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:20]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ascending (prime, exponent) pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.pairs:
            if p <= last or e < 1:
                raise ValueError("factorization pairs must be ascending with positive exponents")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@lru_cache(maxsize=4096)
def factor(n: int) -> Factorization:
    """Factor a positive integer by trial division.

    Small primes first; whenever the remaining cofactor certifies prime
    under Miller-Rabin the loop exits early, so desk-scale semiprimes
    do not pay the full sqrt(n) scan.
    """
    if n < 1:
        raise ValueError("factor() requires a positive integer")
    pairs = []
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        if is_prime(m):
            pairs.append((m, 1))
        else:
            p = _SMALL_PRIMES[-1] + 2
            while m > 1:
                if p * p > m or is_prime(m):
                    pairs.append((m, 1))
                    break
                if m % p == 0:
                    e = 0
                    while m % p == 0:
                        m //= p
                        e += 1
                    pairs.append((p, e))
                p += 2
    return Factorization(tuple(pairs))


def divisors(n: int | Factorization) -> list[int]:
    """All positive divisors, ascending."""
    fac = n if isinstance(n, Factorization) else factor(n)
    out = [1]
    for p, e in fac:
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def sigma0(n: int) -> int:
    """Number of positive divisors of n."""
    if n < 1:
        raise ValueError("sigma0 requires a positive integer")
    out = 1
    for _, e in factor(n):
        out *= e + 1
    return out


def mobius(n: int) -> int:
    """Moebius function mu(n)."""
    if n < 1:
        raise ValueError("mobius requires a positive integer")
    out = 1
    for _, e in factor(n):
        if e > 1:
            return 0
        out = -out
    return out


def index_gamma0(N: int, M: int) -> int:
    """Index (Gamma_0(N) : Gamma_0(M)) for N | M.

    Equals (M/N) * prod_{p | M, p not| N} (1 + 1/p), which is always an
    integer; enforced here rather than trusted.
    """
    if N < 1 or M < 1 or M % N != 0:
        raise ValueError(f"index_gamma0 requires N | M, got N={N}, M={M}")
    val = Fraction(M, N)
    for p in factor(M).primes():
        if N % p != 0:
            val *= Fraction(p + 1, p)
    assert val.denominator == 1
    return int(val)


def local_factor_product(n: int, N: int) -> Fraction:
    """prod_{p | n, p not| N} (1 + 1/p) as an exact rational."""
    if n < 1 or N < 1:
        raise ValueError("local_factor_product requires positive integers")
    out = Fraction(1)
    for p in factor(n).primes():
        if N % p != 0:
            out += out / p  # times (1 + 1/p)
    return out


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a / n), extended Jacobi symbol conventions."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a / n) for odd positive n by quadratic reciprocity.
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=512)
def _carmichael(m: int) -> int:
    lam = 1
    for p, e in factor(m):
        if p == 2:
            block = 1 if e == 1 else 2 if e == 2 else 2 ** (e - 2)
        else:
            block = (p - 1) * p ** (e - 1)
        lam = lam * block // math.gcd(lam, block)
    return lam


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2 pi i * exponent) with exponent a rational reduced mod 1."""

    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % 1)

    @property
    def order(self) -> int:
        return self.exponent.denominator if self.exponent else 1

    @property
    def is_real(self) -> bool:
        return self.exponent in (Fraction(0), Fraction(1, 2))

    def as_int(self) -> int:
        """The value as +-1 when real."""
        if self.exponent == 0:
            return 1
        if self.exponent == Fraction(1, 2):
            return -1
        raise ValueError(f"{self!r} is not real")

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            return RootOfUnity(self.exponent + other.exponent)
        if other == 1:
            return self
        if other == -1:
            return RootOfUnity(self.exponent + Fraction(1, 2))
        return NotImplemented

    __rmul__ = __mul__

    def to_mpc(self, precision: int = 53) -> "gmpy2.mpc":
        with gmpy2.context(gmpy2.get_context(), precision=precision):
            two_pi = 2 * gmpy2.const_pi()
            theta = two_pi * gmpy2.mpfr(self.exponent.numerator) / self.exponent.denominator if self.exponent else gmpy2.mpfr(0)
            return gmpy2.mpc(gmpy2.cos(theta), gmpy2.sin(theta))

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.exponent))


def _snap_to_root(value, modulus: int):
    """Snap a numeric character value to 0 or an exact root of unity.

    Character values mod m are torsion of order dividing the Carmichael
    exponent lambda(m); anything further than 1e-8 from every such root
    is rejected.
    """
    if isinstance(value, RootOfUnity):
        return value.as_int() if value.is_real else value
    if isinstance(value, (int, Fraction)) and value in (0, 1, -1):
        return int(value)
    z = complex(value)
    if abs(z) < 1e-8:
        return 0
    if abs(abs(z) - 1.0) > 1e-8:
        raise ValueError(f"character value {value!r} is neither 0 nor on the unit circle")
    lam = _carmichael(modulus) if modulus > 1 else 1
    angle = cmath.phase(z) / (2 * math.pi)
    j = round(angle * lam) % lam
    root = RootOfUnity(Fraction(j, lam))
    if abs(z - root.to_complex()) > 1e-8:
        raise ValueError(f"character value {value!r} is not a root of unity of order dividing {lam}")
    if root.is_real:
        return root.as_int()
    return root


class DirichletCharacter:
    """Dirichlet character mod m with exact values.

    Three constructions: the trivial character of any modulus, real
    quadratic characters via the Kronecker symbol (a/n) -> (d/n), and
    explicit value tables (values snapped to exact roots of unity).
    Values are 0 off the unit group and roots of unity on it; value()
    returns plain ints for 0 and +-1 so real characters stay inside
    exact rational arithmetic downstream.
    """

    def __init__(self, modulus: int, kind: str, d: int | None = None, table=None):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if kind not in ("trivial", "kronecker", "table"):
            raise ValueError(f"unknown character kind {kind!r}")
        self.modulus = modulus
        self.kind = kind
        self.d = d
        self._table = table
        if kind == "kronecker":
            if d is None or d == 0:
                raise ValueError("kronecker character needs a nonzero discriminant d")
            self._check_periodic()
        if kind == "table":
            self._check_table()

    # -- constructors -------------------------------------------------

    @classmethod
    def trivial(cls, modulus: int = 1) -> "DirichletCharacter":
        return cls(modulus, "trivial")

    @classmethod
    def kronecker(cls, d: int, modulus: int | None = None) -> "DirichletCharacter":
        return cls(abs(d) if modulus is None else modulus, "kronecker", d=d)

    @classmethod
    def from_table(cls, modulus: int, values) -> "DirichletCharacter":
        if len(values) != modulus:
            raise ValueError("table length must equal the modulus")
        table = tuple(_snap_to_root(v, modulus) for v in values)
        return cls(modulus, "table", table=table)

    # -- validation ---------------------------------------------------

    def _check_periodic(self):
        m = self.modulus
        for a in range(2 * m):
            lhs = kronecker_symbol(self.d, a)
            if math.gcd(a, m) > 1:
                lhs = 0
            rhs = kronecker_symbol(self.d, a + m)
            if math.gcd(a + m, m) > 1:
                rhs = 0
            if lhs != rhs:
                raise ValueError(f"(d={self.d}/.) is not periodic mod {m}")

    def _check_table(self):
        m = self.modulus
        t = self._table
        if t[1 % m] != 1:
            raise ValueError("character table must have chi(1) = 1")
        for a in range(m):
            if (math.gcd(a, m) == 1) == (t[a] == 0):
                raise ValueError("character table support must be exactly the units")
        units = [a for a in range(m) if math.gcd(a, m) == 1]
        for a in units:
            for b in units:
                if self._mul_vals(t[a], t[b]) != t[a * b % m]:
                    raise ValueError("character table is not completely multiplicative")

    @staticmethod
    def _mul_vals(x, y):
        out = x * y
        if isinstance(out, RootOfUnity) and out.is_real:
            return out.as_int()
        return out

    # -- evaluation ---------------------------------------------------

    def value(self, a: int):
        """chi(a) as an exact 0, +-1, or RootOfUnity."""
        a %= self.modulus if self.modulus > 1 else 1
        if self.modulus > 1 and math.gcd(a, self.modulus) > 1:
            return 0
        if self.kind == "trivial":
            return 1
        if self.kind == "kronecker":
            return kronecker_symbol(self.d, a)
        return self._table[a]

    def __call__(self, a: int):
        return self.value(a)

    def value_mpc(self, a: int, precision: int = 53):
        v = self.value(a)
        return v.to_mpc(precision) if isinstance(v, RootOfUnity) else v

    @property
    def is_real(self) -> bool:
        if self.kind in ("trivial", "kronecker"):
            return True
        return all(not isinstance(v, RootOfUnity) or v.is_real for v in self._table)

    def values(self) -> tuple:
        return tuple(self.value(a) for a in range(self.modulus))

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.values() == other.values()

    def __hash__(self):
        return hash((self.modulus, self.values()))

    def __repr__(self):
        tag = {"trivial": "trivial", "kronecker": f"kronecker({self.d})", "table": "table"}[self.kind]
        return f"DirichletCharacter({tag} mod {self.modulus})"

    # -- structure ----------------------------------------------------

    def conductor(self) -> int:
        """Smallest f | modulus through which the character factors."""
        m = self.modulus
        for f in divisors(m):
            if all(self.value(a) == 1 for a in range(1, m + 1) if a % f == 1 % f and math.gcd(a, m) == 1):
                return f
        return m  # unreachable: f = m always qualifies

    def primitive_values(self) -> tuple:
        """Values of the primitive character mod conductor() inducing self."""
        f = self.conductor()
        m = self.modulus
        out = []
        for x in range(f):
            if math.gcd(x, f) > 1:
                out.append(0)
                continue
            # lift x to a residue coprime to m in the class x mod f
            y = x
            while math.gcd(y, m) > 1:
                y += f
            out.append(self.value(y))
        return tuple(out)

    def same_primitive_core(self, other: "DirichletCharacter") -> bool:
        return self.primitive_values() == other.primitive_values()


def induce_character(chi: DirichletCharacter, M: int) -> DirichletCharacter:
    """The character mod M induced by chi; requires chi.modulus | M."""
    if M % chi.modulus != 0:
        raise ValueError(f"cannot induce a character mod {chi.modulus} to non-multiple modulus {M}")
    if M == chi.modulus:
        return chi
    if chi.kind == "trivial":
        return DirichletCharacter.trivial(M)
    if chi.kind == "kronecker":
        return DirichletCharacter.kronecker(chi.d, M)
    table = []
    for a in range(M):
        table.append(0 if math.gcd(a, M) > 1 else chi.value(a))
    return DirichletCharacter.from_table(M, table)
