"""Truncated q-expansions with certified evaluation.

A QSeries is an immutable truncated Fourier expansion
f = sum_{1 <= n <= T} a(n) q^n (no constant term: everything here is
cuspidal), tagged with weight, level and character.  Provided here:

* Dedekind eta products via exact pentagonal-number arithmetic,
* the level-raising translates f|V_ell (q -> q^ell), the index-slicing
  operator U_m, and Hecke operators T(p),
* evaluation at a point of the upper half-plane with a certified tail
  bound derived from the measured coefficient-growth constant.

Evaluation uses |a(n)| <= C sigma_0(n) n^{(k-1)/2}, so the tail beyond
T' is at most 2C Gamma((k+3)/2, 2 pi y T') / (2 pi y)^{(k+3)/2} once T'
passes the mode of the comparison integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

from . import numeric
from ._kernels import ComplexSeriesEval, RealSeriesEval
from .arith import DirichletCharacter, induce_character

__all__ = [
    "QSeries",
    "EvalCertificate",
    "TruncationInsufficientError",
    "eta_product",
    "apply_V",
    "apply_U",
    "hecke_Tp",
    "evaluate",
    "growth_constant",
]


class TruncationInsufficientError(ValueError):
    """Raised when a certified evaluation would need more coefficients."""

    def __init__(self, needed: int, available: int, context: str = ""):
        self.needed = needed
        self.available = available
        msg = f"evaluation needs truncation ~{needed}, only {available} coefficients stored"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


@lru_cache(maxsize=16)
def _sigma0_table(limit: int) -> np.ndarray:
    table = np.zeros(limit + 1, dtype=np.int32)
    for d in range(1, limit + 1):
        table[d::d] += 1
    return table


class QSeries:
    """Immutable truncated cuspidal q-expansion.

    coeffs maps indices 1..truncation to nonzero coefficients; values
    are exact (int/Fraction) or numeric (mpfr/mpc), never mixed with a
    constant term.  weight may be a half-integer (Fraction).
    """

    __slots__ = ("weight", "level", "character", "truncation", "_coeffs", "_kernels", "_growth")

    def __init__(self, coeffs, truncation: int, weight, level: int = 1, character: DirichletCharacter | None = None):
        if truncation < 1:
            raise ValueError("truncation must be >= 1")
        if level < 1:
            raise ValueError("level must be >= 1")
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs, start=1)
        store = {}
        for n, v in items:
            if v == 0:
                continue
            n = int(n)
            if n < 1:
                raise ValueError("cusp forms have no coefficients below q^1")
            if n > truncation:
                raise ValueError(f"coefficient index {n} beyond truncation {truncation}")
            store[n] = v
        self._coeffs = store
        self.truncation = int(truncation)
        self.weight = weight if isinstance(weight, Fraction) else Fraction(int(weight))
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        self.level = int(level)
        self.character = character if character is not None else DirichletCharacter.trivial(1)
        self._kernels = {}
        self._growth = None

    # -- inspection ---------------------------------------------------

    def coefficient(self, n: int):
        if n < 1 or n > self.truncation:
            raise ValueError(f"index {n} outside stored range 1..{self.truncation}")
        return self._coeffs.get(n, 0)

    def items(self):
        return sorted(self._coeffs.items())

    def support(self):
        return sorted(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_exact(self) -> bool:
        return all(numeric.is_exact(v) for v in self._coeffs.values())

    def __repr__(self):
        head = ", ".join(f"{v}*q^{n}" for n, v in self.items()[:4])
        if len(self._coeffs) > 4:
            head += ", ..."
        return f"QSeries({head or '0'}; k={self.weight}, N={self.level}, T={self.truncation})"

    def with_level(self, level: int) -> "QSeries":
        return QSeries(dict(self._coeffs), self.truncation, self.weight, level, self.character)

    # -- packed kernel form --------------------------------------------

    def _packed(self, precision: int):
        """(stride, evaluator): coefficients regrouped on their common stride."""
        key = precision
        if key in self._kernels:
            return self._kernels[key]
        support = self.support()
        stride = 0
        for n in support:
            stride = math.gcd(stride, n)
        if stride == 0:
            packed = (1, None)
        else:
            top = support[-1] // stride
            coeffs = [0] * top
            real = True
            for n, v in self._coeffs.items():
                coeffs[n // stride - 1] = v
                real = real and not isinstance(v, gmpy2.mpc)
            conv = [gmpy2.mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else v for v in coeffs]
            cls = RealSeriesEval if real else ComplexSeriesEval
            packed = (stride, cls(conv, precision))
        self._kernels[key] = packed
        return packed


# -- eta products -----------------------------------------------------


def _pentagonal_terms(limit: int):
    """(index, sign) terms of prod (1 - q^n) with index <= limit, index > 0."""
    terms = []
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        g2 = j * (3 * j + 1) // 2
        sign = -1 if j % 2 else 1
        if g1 > limit:
            break
        terms.append((g1, sign))
        if g2 <= limit:
            terms.append((g2, sign))
        j += 1
    return terms


def _mul_pentagonal(acc: np.ndarray, scale: int, limit: int) -> np.ndarray:
    out = acc.copy()
    for idx, sign in _pentagonal_terms(limit // scale if scale else 0):
        shift = idx * scale
        if sign > 0:
            out[shift:] += acc[: limit + 1 - shift]
        else:
            out[shift:] -= acc[: limit + 1 - shift]
    return out


def _div_pentagonal(acc: np.ndarray, scale: int, limit: int) -> np.ndarray:
    # Divide by the monic sparse polynomial: sequential back-substitution.
    terms = [(idx * scale, sign) for idx, sign in _pentagonal_terms(limit // scale if scale else 0)]
    out = acc.copy()
    for n in range(limit + 1):
        c = out[n]
        for shift, sign in terms:
            if shift > n:
                break
            c -= sign * out[n - shift]
        out[n] = c
    return out


@lru_cache(maxsize=32)
def eta_product(spec, truncation: int = 10000) -> QSeries:
    """Exact expansion of prod_i eta(scale_i z)^{e_i}.

    spec is a tuple of (scale, exponent) pairs.  The total weight
    sum(e)/2 must be a positive integer and the leading exponent
    sum(scale*e)/24 a positive integer, so the result is an integral-
    weight cusp expansion with integer coefficients.  Negative
    exponents are handled by exact power-series division.
    """
    spec = tuple((int(s), int(e)) for s, e in spec)
    for s, e in spec:
        if s < 1 or e == 0:
            raise ValueError("eta spec needs positive scales and nonzero exponents")
    weight2 = sum(e for _, e in spec)
    if weight2 <= 0 or weight2 % 2:
        raise ValueError(f"total weight {weight2}/2 is not a positive integer")
    lead24 = sum(s * e for s, e in spec)
    if lead24 <= 0 or lead24 % 24:
        raise ValueError(f"leading q-power {lead24}/24 is not a positive integer")
    lead = lead24 // 24
    if lead > truncation:
        raise ValueError("truncation below the leading exponent")
    limit = truncation - lead
    acc = np.array([0] * (limit + 1), dtype=object)
    acc[0] = 1
    for s, e in spec:
        step = _mul_pentagonal if e > 0 else _div_pentagonal
        for _ in range(abs(e)):
            acc = step(acc, s, limit)
    level = math.lcm(*(s for s, _ in spec))
    coeffs = {lead + j: int(acc[j]) for j in range(limit + 1) if acc[j]}
    return QSeries(coeffs, truncation, weight2 // 2, level, DirichletCharacter.trivial(1))


# -- level and Hecke operators ----------------------------------------


def apply_V(f: QSeries, ell: int) -> QSeries:
    """f|V_ell: q -> q^ell.  Level multiplies by ell."""
    if ell < 1:
        raise ValueError("V_ell requires ell >= 1")
    if ell == 1:
        return f
    coeffs = {n * ell: v for n, v in f._coeffs.items()}
    return QSeries(coeffs, f.truncation * ell, f.weight, f.level * ell, f.character)


def apply_U(f: QSeries, m: int) -> QSeries:
    """U_m: picks coefficients a(mn).  Truncation drops to floor(T/m)."""
    if m < 1:
        raise ValueError("U_m requires m >= 1")
    if m == 1:
        return f
    top = f.truncation // m
    if top < 1:
        raise ValueError("truncation too small for U_m")
    coeffs = {n: f._coeffs[n * m] for n in range(1, top + 1) if n * m in f._coeffs}
    return QSeries(coeffs, top, f.weight, f.level, f.character)


def hecke_Tp(f: QSeries, p: int, k=None, chi: DirichletCharacter | None = None) -> QSeries:
    """Hecke operator T(p) on expansions: b(n) = a(pn) + chi(p) p^{k-1} a(n/p).

    chi defaults to f's character induced to f's level, so chi(p) = 0
    for p | level and T(p) degenerates to U_p there.
    """
    from .arith import is_prime

    if not is_prime(p):
        raise ValueError(f"T(p) requires p prime, got {p}")
    if k is None:
        k = f.weight
    if Fraction(k).denominator != 1:
        raise ValueError("integral weight required for T(p)")
    k = int(k)
    if chi is None:
        chi = induce_character(f.character, f.level)
    chi_p = chi.value(p)
    top = f.truncation // p
    if top < 1:
        raise ValueError("truncation too small for T(p)")
    pk = p ** (k - 1)
    coeffs = {}
    for n in range(1, top + 1):
        b = f._coeffs.get(n * p, 0)
        if chi_p != 0 and n % p == 0:
            a = f._coeffs.get(n // p, 0)
            if a != 0:
                if hasattr(chi_p, "to_mpc"):
                    b = numeric.to_mpc(b, 128) + chi_p.to_mpc(128) * pk * numeric.to_mpc(a, 128)
                else:
                    b = b + chi_p * pk * a
        if b != 0:
            coeffs[n] = b
    return QSeries(coeffs, top, f.weight, f.level, f.character)


# -- certified evaluation ---------------------------------------------


@dataclass(frozen=True)
class EvalCertificate:
    """Value plus an absolute bound on the discarded tail."""

    value: object
    tail: object
    terms_used: int
    tprime: int

    def __iter__(self):
        return iter((self.value, self.tail))


def growth_constant(f: QSeries) -> float:
    """Measured C with |a(n)| <= C sigma_0(n) n^{(k-1)/2} over the stored range."""
    if f._growth is not None:
        return f._growth
    if f.is_zero:
        c = 0.0
    else:
        table = _sigma0_table(f.truncation)
        expo = (float(f.weight) - 1.0) / 2.0
        c = 0.0
        for n, v in f._coeffs.items():
            mag = abs(complex(v)) if isinstance(v, gmpy2.mpc) else abs(float(v))
            c = max(c, mag / (float(table[n]) * n**expo))
    f._growth = c
    return c


def _tail_bound(C: float, k: float, y, tprime: int, precision: int):
    """Upper bound for C sum_{n > T'} sigma_0(n) n^{(k-1)/2} e^{-2 pi n y}.

    Valid once T' >= (k+1)/(2 pi y), where the comparison integrand
    (t+1) t^{(k-1)/2} e^{-2 pi y t} <= 2 t^{(k+1)/2} e^{-2 pi y t} is
    decreasing; returns +inf below that threshold.
    """
    with numeric.context(precision):
        y = numeric.to_mpfr(y)
        two_pi_y = 2 * gmpy2.const_pi() * y
        if tprime < (k + 1) / float(two_pi_y):
            return gmpy2.inf()
        s = (numeric.to_mpfr(k) + 3) / 2
        g = numeric.upper_gamma(s, two_pi_y * tprime, precision)
        return 2 * C * g / two_pi_y**s


def evaluate(f: QSeries, z, eps: float, precision: int | None = None) -> EvalCertificate:
    """Certified evaluation of f at z (Im z > 0).

    Chooses the minimal T' <= truncation whose tail bound beats eps,
    sums the stored terms up to T' by Horner at the working precision,
    and reports the tail bound actually achieved.  Raises
    TruncationInsufficientError (with the truncation that would have
    sufficed) when even the full expansion cannot certify eps.
    """
    prec = precision or numeric.DEFAULT_PRECISION
    with numeric.context(prec):
        z = numeric.to_mpc(z, prec)
        y = z.imag
        if not y > 0:
            raise ValueError("evaluation point must lie in the upper half-plane")
        if eps <= 0:
            raise ValueError("eps must be positive")
        if f.is_zero:
            return EvalCertificate(gmpy2.mpc(0), gmpy2.mpfr(0), 0, 0)
        C = growth_constant(f)
        k = float(f.weight)
        T = f.truncation

        def tail(t):
            return _tail_bound(C, k, y, t, prec)

        if not tail(T) < eps:
            t = T
            while not tail(t) < eps:
                t *= 2
                if t > T * 2**40:
                    raise ValueError("tail bound does not converge; is Im z positive?")
            lo, hi = T, t
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if tail(mid) < eps:
                    hi = mid
                else:
                    lo = mid
            raise TruncationInsufficientError(hi, T, f"point with Im z = {float(y):.4g}, eps = {eps:.3g}")
        lo, hi = 0, T
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if tail(mid) < eps:
                hi = mid
            else:
                lo = mid
        tprime = hi
        stride, kernel = f._packed(prec)
        q = gmpy2.exp(2j * gmpy2.const_pi() * z)
        jmax = tprime // stride
        if kernel is None or jmax == 0:
            value = gmpy2.mpc(0)
            used = 0
        else:
            value = kernel.eval(q**stride if stride > 1 else q, jmax)
            used = min(jmax, len(kernel))
        return EvalCertificate(value, tail(tprime), used, tprime)
