"""Explicit Fourier-coefficient bounds and the Petersson-norm floor.

For an orthonormal Hecke eigenbasis element h of S_k(Gamma_0(M), chi),

    |a(h, n)| <= 2 sqrt(pi) e^{2 pi} sigma_0(n) n^{(k-1)/2}
                 * M^{1/2} prod_{p | M} (1 + 1/p)^3 / sqrt(1 - p^{-4}),

and for gcd(n, M) = 1 the local exponent 3 improves to 1.  A general
form F of the space then satisfies
|a(F, n)| <= hi_bound(n) * sqrt(<F, F> * dim).  The floor
<f, f> >= 1 / (4 pi e^{4 pi} N_f prod_{p | N_f} (1 + 1/p)) holds for
any primitive form of level N_f.

Bounds are computed with directed rounding: every operation entering an
upper bound rounds toward +inf (the exact local factors are formed as
rationals first, so no downward-rounded denominator is ever needed),
and the norm floor rounds down.  A bound that under-reports would be
worse than a loose one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import numeric
from .arith import DirichletCharacter, factor, induce_character, sigma0
from .newforms import translates_basis
from .orthobasis import assemble_full_basis, orthonormalize

__all__ = [
    "BoundReport",
    "hi_bound",
    "F_bound",
    "petersson_lower_bound",
    "empirical_check",
    "EmpiricalBoundReport",
]

MIN_BOUND_PRECISION = 64


def _up(precision: int):
    prec = max(precision, MIN_BOUND_PRECISION)
    return gmpy2.context(gmpy2.get_context(), precision=prec, round=gmpy2.RoundUp)


def _down(precision: int):
    prec = max(precision, MIN_BOUND_PRECISION)
    return gmpy2.context(gmpy2.get_context(), precision=prec, round=gmpy2.RoundDown)


def _constant():
    """2 sqrt(pi) e^{2 pi}, rounded up in the ambient context."""
    pi = gmpy2.const_pi()
    return 2 * gmpy2.sqrt(pi) * gmpy2.exp(2 * pi)


def _level_factor(M: int, exponent: int):
    """M^{1/2} prod_{p|M} (1+1/p)^exponent / sqrt(1-p^{-4}), rounded up.

    The rational parts are assembled exactly and only then rounded, so
    upward rounding of the quotient is sound.
    """
    rat = Fraction(1)
    rad = Fraction(M)
    for p, _ in factor(M):
        rat *= Fraction(p + 1, p) ** exponent
        rad *= Fraction(p**4, p**4 - 1)
    return numeric.to_mpfr(rat) * gmpy2.sqrt(numeric.to_mpfr(rad))


def _half_power(n: int, e: int):
    """n^{e/2} rounded up (exact integer when e is even)."""
    if e % 2 == 0:
        return gmpy2.mpfr(n ** (e // 2))
    return gmpy2.sqrt(gmpy2.mpfr(n**e))


def hi_bound(n: int, k: int, M: int, coprime: bool = False, precision: int = MIN_BOUND_PRECISION):
    """Coefficient bound for an orthonormal eigenbasis element, rounded up.

    coprime=True selects the sharper local exponent 1, valid only when
    gcd(n, M) = 1.
    """
    if n < 1 or k < 1 or M < 1:
        raise ValueError("n, k, M must all be >= 1")
    if coprime and math.gcd(n, M) != 1:
        raise ValueError(f"coprime variant requires gcd(n, M) = 1, got gcd({n}, {M}) = {math.gcd(n, M)}")
    with _up(precision):
        return _constant() * sigma0(n) * _half_power(n, k - 1) * _level_factor(M, 1 if coprime else 3)


@dataclass(frozen=True)
class BoundReport:
    """One certified coefficient bound with its inputs echoed."""

    n: int
    k: int
    M: int
    value: object
    variant: str  # orthonormal-element | general-form | general-form-coprime
    norm_F: object = None
    dim: int = None

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("bound value must be positive")

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "M": self.M,
            "variant": self.variant,
            "bound": numeric.format_value(self.value),
        }
        if self.norm_F is not None:
            out["norm_F"] = numeric.format_value(self.norm_F)
        if self.dim is not None:
            out["dim"] = self.dim
        return out


def hi_bound_report(n: int, k: int, M: int, coprime: bool = False, precision: int = MIN_BOUND_PRECISION) -> BoundReport:
    value = hi_bound(n, k, M, coprime, precision)
    return BoundReport(n, k, M, value, "orthonormal-element")


def F_bound(
    n: int,
    k: int,
    M: int,
    norm_F,
    dim: int,
    coprime: bool = False,
    precision: int = MIN_BOUND_PRECISION,
) -> BoundReport:
    """Bound |a(F, n)| <= hi_bound * sqrt(<F,F> * dim) for a general form."""
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    base = hi_bound(n, k, M, coprime, precision)
    with _up(precision):
        nf = numeric.to_mpfr(norm_F)
        if not nf > 0:
            raise ValueError("norm_F must be positive")
        value = base * gmpy2.sqrt(nf * dim)
    return BoundReport(n, k, M, value, "general-form-coprime" if coprime else "general-form", norm_F, dim)


def petersson_lower_bound(N_f: int, precision: int = MIN_BOUND_PRECISION):
    """Norm floor 1/(4 pi e^{4 pi} N_f prod_{p|N_f}(1+1/p)), rounded down."""
    if N_f < 1:
        raise ValueError("N_f must be >= 1")
    rat = Fraction(N_f)
    for p, _ in factor(N_f):
        rat *= Fraction(p + 1, p)
    with _up(precision):
        pi = gmpy2.const_pi()
        denom = 4 * pi * gmpy2.exp(4 * pi) * numeric.to_mpfr(rat)
    with _down(precision):
        return 1 / denom


@dataclass
class EmpiricalBoundReport:
    """Coefficient bounds and Hecke-eigenvector checks on a synthesized basis."""

    M: int
    k: int
    n_max: int
    dim: int
    rows: list  # (form_id, exponents, n_checked, violations, max_ratio, hecke_devs)
    tolerance: float

    @property
    def ok(self) -> bool:
        return all(not row[3] and all(d <= self.tolerance for d in row[5].values()) for row in self.rows)

    def to_json(self) -> dict:
        return {
            "level": self.M,
            "weight": self.k,
            "n_max": self.n_max,
            "dim": self.dim,
            "ok": self.ok,
            "rows": [
                {
                    "form": fid,
                    "exponents": list(map(list, exps)),
                    "n_checked": nch,
                    "violations": [
                        {"n": n, "coefficient": numeric.format_value(a), "bound": numeric.format_value(b)}
                        for n, a, b in viol
                    ],
                    "max_ratio": float(mr),
                    "hecke_deviation": {str(p): float(d) for p, d in hk.items()},
                }
                for fid, exps, nch, viol, mr, hk in self.rows
            ],
        }


def empirical_check(
    records,
    M: int,
    k: int,
    chi: DirichletCharacter | None = None,
    n_max: int = 500,
    tolerance: float = 1e-8,
    precision: int = numeric.DEFAULT_PRECISION,
    expected_dim: int | None = None,
) -> EmpiricalBoundReport:
    """Check |a(h_i, n)| <= hi_bound(n, k, M) on the synthesized basis.

    The orthogonal basis is orthonormalized in absolute mode using the
    records' stored Petersson norms, each h_i's q-expansion is
    synthesized through n_max from its translate coefficients, and each
    coefficient is compared against the bound.  Each h_i must also be a
    numeric T(p)-eigenvector for p not dividing M, p <= 7.  Missing
    norms are an error, as is an externally supplied dimension that
    contradicts the translate count.
    """
    recs = list(records)
    basis_inventory = translates_basis(recs, M, k, chi)
    dim = len(basis_inventory)
    if dim == 0:
        raise ValueError(f"no translates span level {M}, weight {k} with the given records")
    if expected_dim is not None and expected_dim != dim:
        raise ValueError(
            f"supplied dimension {expected_dim} != translate count {dim}; newform inventory looks incomplete"
        )
    by_id = {}
    norms = {}
    for rec in recs:
        by_id[rec.id] = rec
        if rec.petersson_norm is not None:
            norms[rec.id] = rec.petersson_norm
    elements = assemble_full_basis(recs, M, k, chi)
    for el in elements:
        if el.form_id not in norms:
            raise ValueError(f"record {el.form_id!r} carries no Petersson norm; absolute orthonormalization impossible")
    ortho = orthonormalize(elements, mode="absolute", norms=norms, precision=precision)

    rows = []
    with numeric.context(precision):
        bounds = {n: hi_bound(n, k, M, precision=precision) for n in range(1, n_max + 1)}
        hecke_primes = [p for p in (2, 3, 5, 7) if M % p != 0]
        for el in ortho:
            rec = by_id[el.form_id]
            f = rec.qexp
            if f is None:
                raise ValueError(f"record {el.form_id!r} has no q-expansion to synthesize from")
            chi_M = induce_character(rec.character, M)
            reach = min(f.truncation, max(n_max, n_max * max(hecke_primes, default=1)))

            def a_h(n):
                total = 0
                for ell, c in el.coeffs.items():
                    if n % ell == 0:
                        total += c * f.coefficient(n // ell)
                return total

            coeffs = {n: a_h(n) for n in range(1, reach + 1)}
            violations = []
            max_ratio = gmpy2.mpfr(0)
            for n in range(1, n_max + 1):
                mag = abs(coeffs[n])
                ratio = mag / bounds[n]
                if ratio > max_ratio:
                    max_ratio = ratio
                if mag > bounds[n]:
                    violations.append((n, mag, bounds[n]))
            hecke_devs = {}
            for p in hecke_primes:
                lam = numeric.to_mpc(f.coefficient(p), precision)
                cv = chi_M.value(p)
                twist = cv.to_mpc(precision) if hasattr(cv, "to_mpc") else numeric.to_mpc(cv, precision)
                pk = twist * gmpy2.mpfr(p) ** (k - 1)
                worst = gmpy2.mpfr(0)
                for n in range(1, min(n_max, reach // p) + 1):
                    tn = coeffs[p * n]
                    if n % p == 0:
                        tn += pk * coeffs[n // p]
                    dev = abs(tn - lam * coeffs[n])
                    scale = max(abs(lam * coeffs[n]), gmpy2.mpfr(1))
                    rel = dev / scale
                    if rel > worst:
                        worst = rel
                hecke_devs[p] = worst
            rows.append((el.form_id, el.exponents, n_max, violations, max_ratio, hecke_devs))
    return EmpiricalBoundReport(M, k, n_max, dim, rows, tolerance)
