"""Coset systems of Gamma_0 groups, slash action, and trace operators.

coset_reps(N, M) enumerates representatives of Gamma_0(M) \\ Gamma_0(N)
for N | M: bottom rows are classes (c : d) of P^1(Z/M) with c = 0 mod N,
lifted to integer matrices of determinant 1 with smallest nonnegative
choices.  trace_evaluate implements the trace operator

    (f | tr_N^M)(z) = (1 / index) sum_i conj(chi(alpha_i)) (f|alpha_i)(z)

pointwise, propagating the evaluation certificates.  verify_trace_hecke
checks the eigenvalue identity

    index * (f|V_d)|tr_N^{Nd} = d^{1-k} conj(lambda(1, d)) f

numerically at supplied points of the upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2

from . import numeric
from .arith import DirichletCharacter, RootOfUnity, index_gamma0, induce_character
from .newforms import EigenvalueSystem, NewformRecord
from .qseries import EvalCertificate, QSeries, apply_V, evaluate

__all__ = [
    "UnimodularMatrix",
    "CosetSystem",
    "coset_reps",
    "slash_evaluate",
    "trace_evaluate",
    "verify_trace_hecke",
    "TraceHeckeReport",
]


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix [[a, b], [c, d]] with determinant 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant is {self.a * self.d - self.b * self.c}, not 1")

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def apply(self, z):
        """Moebius action on a point of the upper half-plane."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def jacobian_factor(self, z):
        """cz + d."""
        return self.c * z + self.d

    @property
    def bottom(self) -> tuple[int, int]:
        return (self.c, self.d)


IDENTITY = UnimodularMatrix(1, 0, 0, 1)


@lru_cache(maxsize=128)
def _p1_classes(N: int, M: int) -> tuple[tuple[int, int], ...]:
    """Canonical (c : d) classes of P^1(Z/M) with c = 0 mod N.

    Canonical form is the lexicographic minimum over the unit orbit;
    desk-scale O(M^2 phi(M)) enumeration.
    """
    units = [u for u in range(1, M + 1) if math.gcd(u, M) == 1]
    seen = set()
    for c in range(0, M, N):
        for d in range(M):
            if math.gcd(math.gcd(c, d), M) != 1:
                continue
            canon = min((u * c % M, u * d % M) for u in units)
            seen.add(canon)
    return tuple(sorted(seen))


def _lift_class(c_bar: int, d_bar: int, N: int, M: int) -> UnimodularMatrix:
    """Integer matrix in Gamma_0(N) whose bottom row is (c_bar : d_bar) mod M."""
    if c_bar % M == 0:
        c, d = 0, 1
    else:
        c = c_bar
        d = d_bar % M
        while math.gcd(c, d) != 1:
            d += M
    if c == 0:
        return IDENTITY
    # a d - b c = 1 with 0 <= a < c
    g, x, y = _ext_gcd(d, c)
    assert g == 1
    a, b = x, -y
    t = a // c
    a -= t * c
    b -= t * d
    return UnimodularMatrix(a, b, c, d)


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class CosetSystem:
    """Representatives of Gamma_0(M) \\ Gamma_0(N), N | M."""

    N: int
    M: int
    reps: tuple

    @property
    def index(self) -> int:
        return len(self.reps)


@lru_cache(maxsize=64)
def coset_reps(N: int, M: int) -> CosetSystem:
    """Full inequivalent coset representatives, verified on construction."""
    if N < 1 or M % N != 0:
        raise ValueError(f"coset_reps requires N | M, got ({N}, {M})")
    classes = _p1_classes(N, M)
    reps = tuple(_lift_class(c, d, N, M) for c, d in classes)
    expected = index_gamma0(N, M)
    if len(reps) != expected:
        raise AssertionError(f"coset count {len(reps)} != index {expected}")
    keys = set()
    for rep in reps:
        if rep.c % N != 0:
            raise AssertionError(f"representative {rep} is not in Gamma_0({N})")
        keys.add(_class_key(rep.c, rep.d, M))
    if len(keys) != expected:
        raise AssertionError("coset representatives are not pairwise inequivalent")
    return CosetSystem(N, M, reps)


def _class_key(c: int, d: int, M: int) -> tuple[int, int]:
    units = [u for u in range(1, M + 1) if math.gcd(u, M) == 1]
    return min((u * c % M, u * d % M) for u in units)


def slash_evaluate(f: QSeries, gamma: UnimodularMatrix, z, eps: float, precision: int | None = None) -> EvalCertificate:
    """(f |_k gamma)(z) = (cz + d)^{-k} f(gamma z), certified.

    The inner evaluation runs at eps * |cz + d|^k so the returned tail
    bound is a true absolute bound for the slashed value.
    """
    k = f.weight
    if k.denominator != 1:
        raise ValueError("slash action implemented for integral weight only")
    k = int(k)
    prec = precision or numeric.DEFAULT_PRECISION
    with numeric.context(prec):
        z = numeric.to_mpc(z, prec)
        jac = gamma.jacobian_factor(z)
        w = (gamma.a * z + gamma.b) / jac
        scale = abs(jac) ** k
        inner = evaluate(f, w, eps * float(scale), prec)
        fac = jac ** (-k)
        return EvalCertificate(inner.value * fac, inner.tail / scale, inner.terms_used, inner.tprime)


def trace_evaluate(
    f: QSeries,
    N: int,
    M: int,
    chi: DirichletCharacter | None = None,
    z=None,
    eps: float = 1e-20,
    precision: int | None = None,
) -> EvalCertificate:
    """(f | tr_N^M)(z): character-twisted coset average, certified.

    chi is the character of f's space at level M; its values enter at
    the representatives' lower-right entries, which are coprime to M.
    The certificate tail is the index-averaged sum of member tails.
    """
    if z is None:
        raise ValueError("an evaluation point is required")
    if chi is None:
        chi = induce_character(f.character, N)
    prec = precision or numeric.DEFAULT_PRECISION
    system = coset_reps(N, M)
    with numeric.context(prec):
        total = gmpy2.mpc(0)
        tails = gmpy2.mpfr(0)
        for rep in system.reps:
            member = slash_evaluate(f, rep, z, eps, prec)
            cv = chi.value(rep.d)
            if cv == 0:
                raise ArithmeticError("character vanishes on a coset representative; reps are corrupt")
            twist = cv.conjugate().to_mpc(prec) if isinstance(cv, RootOfUnity) else cv
            total += twist * member.value
            tails += member.tail
        idx = system.index
        return EvalCertificate(total / idx, tails / idx, 0, 0)


@dataclass
class TraceHeckeReport:
    """Pointwise comparison of index * (f|V_d)|tr against d^{1-k} conj(lambda) f."""

    form_id: str
    d: int
    rows: list  # (z, lhs, rhs, deviation, certificate)
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((float(r[3]) for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return all(float(r[3]) <= float(r[4]) + self.tolerance for r in self.rows)


def verify_trace_hecke(
    record: NewformRecord,
    d: int,
    points,
    eps: float = 1e-12,
    tolerance: float = 1e-8,
    precision: int | None = None,
) -> TraceHeckeReport:
    """Check index * (f|V_d)|tr_N^{Nd} = d^{1-k} conj(lambda(1,d)) f pointwise.

    Both sides are evaluated from q-expansions with certificates; a row
    passes when |lhs - rhs| <= combined certificate + tolerance.
    """
    if record.qexp is None:
        raise ValueError(f"record {record.id!r} has no q-expansion")
    f = record.qexp
    N, k = record.level, record.weight
    chi = induce_character(record.character, N)
    lam = EigenvalueSystem(record).value(d)
    prec = precision or numeric.DEFAULT_PRECISION
    fV = apply_V(f, d)
    idx = index_gamma0(N, N * d)
    rows = []
    with numeric.context(prec):
        factor = numeric.conjugate(numeric.to_mpc(lam, prec)) * numeric.to_mpfr(Fraction(1, d ** (k - 1)), prec)
        for z in points:
            z = numeric.to_mpc(z, prec)
            lhs_cert = trace_evaluate(fV, N, N * d, chi, z, eps, prec)
            rhs_cert = evaluate(f, z, eps, prec)
            lhs = idx * lhs_cert.value
            rhs = factor * rhs_cert.value
            dev = abs(lhs - rhs)
            cert = idx * lhs_cert.tail + abs(factor) * rhs_cert.tail
            rows.append((z, lhs, rhs, dev, cert))
    return TraceHeckeReport(record.id, d, rows, tolerance)
