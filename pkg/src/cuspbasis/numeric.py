"""Arbitrary-precision numeric helpers on top of gmpy2.

Value coercion between the exact domain (int/Fraction) and mpfr/mpc,
an upper incomplete gamma via the classical continued fraction, and
Gauss-Legendre nodes polished to working precision.  All certificate
arithmetic downstream funnels through here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

DEFAULT_PRECISION = 128


def context(precision: int):
    """A gmpy2 context at the given mpfr/mpc precision."""
    return gmpy2.context(gmpy2.get_context(), precision=precision)


def to_mpfr(x, precision: int | None = None):
    prec = precision or gmpy2.get_context().precision
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x.numerator, x.denominator)
    return gmpy2.mpfr(x, prec)


def to_mpc(x, precision: int | None = None):
    prec = precision or gmpy2.get_context().precision
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x.numerator, x.denominator)
    if hasattr(x, "to_mpc"):  # RootOfUnity
        return x.to_mpc(prec)
    return gmpy2.mpc(x, precision=(prec, prec))


def conjugate(v):
    """Complex conjugate across the exact and mpfr/mpc domains."""
    if isinstance(v, (int, Fraction)) or isinstance(v, gmpy2.mpfr):
        return v
    if hasattr(v, "conjugate"):
        return v.conjugate()
    return v


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) or isinstance(v, (gmpy2.mpz, gmpy2.mpq))


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (gmpy2.mpz, gmpy2.mpq)):
        return Fraction(int(gmpy2.numer(v)), int(gmpy2.denom(v)))
    raise TypeError(f"not an exact value: {v!r}")


def upper_gamma(s, x, precision: int | None = None):
    """Upper incomplete gamma Gamma(s, x) for s, x > 0.

    Continued-fraction (modified Lentz) evaluation, accurate for
    x >= s + 1; below that threshold the complete Gamma(s) is returned,
    which is a valid upper bound for the tail-certificate use here.
    """
    prec = precision or gmpy2.get_context().precision
    with context(prec + 16):
        s = to_mpfr(s)
        x = to_mpfr(x)
        if x <= 0:
            return gmpy2.gamma(s)
        if x < s + 1:
            return gmpy2.gamma(s)
        tiny = gmpy2.mpfr(2) ** (-(prec + 40))
        b = x + 1 - s
        c = gmpy2.mpfr(1) / tiny
        d = 1 / b
        h = d
        for i in range(1, 600):
            an = -i * (i - s)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < gmpy2.mpfr(2) ** (-(prec + 8)):
                break
        return gmpy2.exp(-x + s * gmpy2.log(x)) * h


@lru_cache(maxsize=64)
def gauss_legendre(n: int, precision: int = DEFAULT_PRECISION):
    """Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].

    Double-precision seeds from numpy, then Newton iterations on P_n at
    working precision; the recurrence also yields P_n' exactly where
    needed.  Returned as tuples of mpfr.
    """
    if n < 1:
        raise ValueError("need at least one node")
    seeds, _ = np.polynomial.legendre.leggauss(n)
    nodes = []
    weights = []
    with context(precision + 16):
        one = gmpy2.mpfr(1)
        for seed in seeds:
            x = gmpy2.mpfr(float(seed))
            for _ in range(60):
                p0, p1 = one, x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                step = p1 / dp
                x -= step
                if abs(step) < gmpy2.mpfr(2) ** (-(precision + 8)):
                    break
            p0, p1 = one, x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append(+x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    return tuple(nodes), tuple(weights)


def _sci(x, digits: int) -> str:
    """Fixed-width scientific notation for an mpfr, independent of library quirks."""
    if gmpy2.is_nan(x) or gmpy2.is_infinite(x):
        return str(x)
    if x == 0:
        return "0." + "0" * digits + "e+00"
    mant, exp10, _ = gmpy2.digits(x, 10, digits + 1)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{exp10 - 1:+03d}"


def format_value(v, digits: int = 20) -> object:
    """JSON-friendly rendering: exact values as strings, complex as pairs."""
    if isinstance(v, (int, gmpy2.mpz)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, gmpy2.mpq):
        return str(Fraction(int(gmpy2.numer(v)), int(gmpy2.denom(v))))
    if isinstance(v, gmpy2.mpfr):
        return _sci(v, digits)
    if isinstance(v, gmpy2.mpc):
        return [_sci(v.real, digits), _sci(v.imag, digits)]
    if isinstance(v, float):
        return float.__repr__(v)
    if hasattr(v, "exponent"):  # RootOfUnity
        return f"e(2*pi*i*{v.exponent})"
    raise TypeError(f"cannot format {v!r}")
