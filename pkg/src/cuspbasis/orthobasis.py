"""Explicit orthogonal bases of translate spans.

Inside S_k(Gamma_0(M), chi) the translates f|V_{p^j}, 0 <= j <= r,
of a primitive form f of level N (p^r || M/N) are made orthogonal by an
explicit banded change of basis with closed-form norms:

bad prime p | N:
    g_0 = f~,   g_j = p^{jk/2} ( f~|V_{p^j} - conj(lam)/p^k f~|V_{p^{j-1}} )
    <g_j, g_j> = 1 - |lam|^2 / p^k                      (j >= 1)

good prime p not| N:
    g_1 = p^{k/2} f~|V_p - conj(lam) / (p^{k/2} (1 + 1/p)) f~
    <g_1, g_1> = 1 - |lam|^2 / (p^k (1 + 1/p)^2)
    g_j = p^{jk/2} ( f~|V_{p^j} - conj(lam)/p^k f~|V_{p^{j-1}}
                     + conj(chi(p))/p^{k+1} f~|V_{p^{j-2}} )   (j >= 2)
    <g_j, g_j> = (1 - 1/p^2) (1 - |lam|^2 / (p^k (1 + 1/p)^2))

where lam = lambda(1, p) and f~|V_m means f|V_m / sqrt(<f, f>), the
family indexing the closed-form Gram matrix.  Full bases for composite
M/N are tensor products: coefficients and norms multiply across primes,
and bases of distinct newforms are orthogonal blockwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import numeric
from .arith import DirichletCharacter, RootOfUnity, factor, induce_character
from .gram import GramMatrix, gram_matrix
from .newforms import EigenvalueSystem, NewformRecord, TranslateBasis, translates_basis

__all__ = [
    "PrimeBasisElement",
    "OrthoBasisElement",
    "prime_basis",
    "assemble_full_basis",
    "gram_schmidt_check",
    "GramSchmidtReport",
    "orthonormalize",
]


@dataclass(frozen=True)
class PrimeBasisElement:
    """g_j at one prime: coefficients indexed by V_{p^i} exponent i."""

    p: int
    j: int
    coeffs: dict
    norm_sq: object


@dataclass(frozen=True)
class OrthoBasisElement:
    """One assembled basis vector: coefficients on the translates f~|V_ell."""

    form_id: str
    level: int
    weight: int
    exponents: tuple  # ((p, j), ...) primes ascending
    coeffs: dict  # ell -> coefficient
    norm_sq: object


def _abs_sq(lam):
    if isinstance(lam, (int, Fraction)):
        return Fraction(lam) ** 2
    if isinstance(lam, gmpy2.mpc):
        return gmpy2.norm(lam)
    return gmpy2.mpfr(lam) ** 2


def _chi_conj(sys: EigenvalueSystem, p: int):
    v = sys.chi.value(p)
    if isinstance(v, RootOfUnity):
        return v.conjugate().to_mpc(sys.precision)
    return v


def prime_basis(form, p: int, r: int) -> list[PrimeBasisElement]:
    """The orthogonal vectors g_0, ..., g_r at one prime.

    Exact Fraction coefficients when the eigenvalue system is rational
    and the weight even; mpfr/mpc otherwise (odd weight brings in
    sqrt(p) powers).
    """
    sys = _system(form)
    if r < 0:
        raise ValueError("exponent range must be >= 0")
    with numeric.context(sys.precision):
        return _prime_basis(sys, p, r)


def _prime_basis(sys: EigenvalueSystem, p: int, r: int) -> list[PrimeBasisElement]:
    rec = sys.record
    k, N = rec.weight, rec.level
    lam = sys.value(p)
    lam_c = numeric.conjugate(lam)
    exact = sys.exact and k % 2 == 0

    def half_power(j):  # p^{jk/2}
        if exact:
            return Fraction(p) ** (j * k // 2)
        return gmpy2.sqrt(numeric.to_mpfr(Fraction(p) ** (j * k), sys.precision))

    one = Fraction(1) if exact else numeric.to_mpfr(1, sys.precision)
    out = [PrimeBasisElement(p, 0, {0: one}, one)]
    if r == 0:
        return out
    lam2 = _abs_sq(lam)
    if not exact and isinstance(lam2, Fraction):
        lam2 = numeric.to_mpfr(lam2, sys.precision)
    if N % p == 0:
        norm = one - lam2 / p**k
        for j in range(1, r + 1):
            s = half_power(j)
            coeffs = {j: s, j - 1: -s * lam_c / Fraction(p) ** k}
            out.append(PrimeBasisElement(p, j, coeffs, norm))
        return out
    loc = Fraction(p + 1, p)  # 1 + 1/p
    norm1 = one - lam2 / (p**k * loc**2)
    coeffs1 = {1: half_power(1), 0: -(lam_c / loc) / half_power(1)}
    out.append(PrimeBasisElement(p, 1, coeffs1, norm1))
    chi_c = _chi_conj(sys, p)
    norm_hi = (one - Fraction(1, p * p)) * norm1
    for j in range(2, r + 1):
        s = half_power(j)
        coeffs = {
            j: s,
            j - 1: -s * lam_c / Fraction(p) ** k,
            j - 2: s * chi_c / Fraction(p) ** (k + 1),
        }
        out.append(PrimeBasisElement(p, j, coeffs, norm_hi))
    return out


def _system(form) -> EigenvalueSystem:
    if isinstance(form, EigenvalueSystem):
        return form
    if isinstance(form, NewformRecord):
        return EigenvalueSystem(form)
    raise TypeError("expected a NewformRecord or EigenvalueSystem")


def assemble_full_basis(records, M: int, k: int, chi: DirichletCharacter | None = None) -> list[OrthoBasisElement]:
    """Orthogonal basis of the translate span of the records at level M.

    Tensor assembly: for each record and each exponent vector
    (j_p)_{p | M/N} in lexicographic order (primes ascending), the
    coefficient on V_ell, ell = prod p^{i_p}, is the product of the
    per-prime coefficients, and the norm is the product of norms.
    Element count per record equals its translate count sigma_0(M/N).
    """
    inventory: TranslateBasis = translates_basis(records, M, k, chi)
    by_record = []
    seen = set()
    for rec, _ in inventory.pairs:
        if id(rec) not in seen:
            seen.add(id(rec))
            by_record.append(rec)
    out = []
    for rec in by_record:
        sys = _system(rec)
        fac = factor(M // rec.level)
        primes = list(fac.primes())
        ranges = [range(e + 1) for _, e in fac.pairs]
        bases = {p: prime_basis(sys, p, e) for p, e in fac.pairs}
        with numeric.context(sys.precision):
            for vec in itertools.product(*ranges):
                norm = None
                parts = [bases[p][j] for p, j in zip(primes, vec)]
                combo = {}
                for assignment in itertools.product(*(part.coeffs.items() for part in parts)):
                    ell = 1
                    val = None
                    for (i, c), p in zip(assignment, primes):
                        ell *= p**i
                        val = c if val is None else val * c
                    combo[ell] = Fraction(1) if val is None else val
                for part in parts:
                    norm = part.norm_sq if norm is None else norm * part.norm_sq
                if norm is None:
                    norm = Fraction(1)
                if not combo:
                    combo = {1: Fraction(1)}
                out.append(
                    OrthoBasisElement(
                        rec.id,
                        rec.level,
                        rec.weight,
                        tuple(zip(primes, vec)),
                        combo,
                        norm,
                    )
                )
    return out


@dataclass
class GramSchmidtReport:
    """Pairwise products of the claimed orthogonal basis against the Gram matrix."""

    exact: bool
    size: int
    max_offdiag: object
    max_norm_dev: object

    @property
    def ok(self) -> bool:
        if self.exact:
            return self.max_offdiag == 0 and self.max_norm_dev == 0
        return float(self.max_offdiag) < 1e-20 and float(self.max_norm_dev) < 1e-20


def gram_schmidt_check(elements, gram: GramMatrix) -> GramSchmidtReport:
    """Verify <g_i, g_j> = delta_ij <g_i, g_i> with the claimed norms.

    elements must all belong to the Gram matrix's form; coefficients on
    translates outside the matrix's divisor list are an index error.
    In exact arithmetic both the off-diagonal maximum and the norm
    discrepancies must come out exactly zero.
    """
    divs = gram.divisors
    for el in elements:
        if el.form_id != gram.form_id:
            raise ValueError(f"element of form {el.form_id!r} checked against Gram matrix of {gram.form_id!r}")
        for ell in el.coeffs:
            if ell not in divs:
                raise ValueError(f"coefficient on V_{ell} has no Gram row (divisors {divs})")
    exact = all(
        isinstance(v, (int, Fraction)) for el in elements for v in el.coeffs.values()
    ) and all(isinstance(row_v, (int, Fraction)) for row in gram.entries for row_v in row)
    values = [v for el in elements for v in el.coeffs.values()]
    values += [v for row in gram.entries for v in row]
    prec = max(
        (max(v.precision) if isinstance(v, gmpy2.mpc) else v.precision for v in values if hasattr(v, "precision")),
        default=numeric.DEFAULT_PRECISION,
    )
    max_off = Fraction(0) if exact else gmpy2.mpfr(0)
    max_dev = Fraction(0) if exact else gmpy2.mpfr(0)
    with numeric.context(max(prec, numeric.DEFAULT_PRECISION)):
        for a in range(len(elements)):
            for b in range(a, len(elements)):
                ea, eb = elements[a], elements[b]
                total = None
                for m, cm in ea.coeffs.items():
                    for n, cn in eb.coeffs.items():
                        term = cm * numeric.conjugate(cn) * gram.entry(m, n)
                        total = term if total is None else total + term
                if a == b:
                    dev = total - ea.norm_sq
                    mag = abs(dev)
                    if mag > max_dev:
                        max_dev = mag
                else:
                    mag = abs(total)
                    if mag > max_off:
                        max_off = mag
    return GramSchmidtReport(exact, len(elements), max_off, max_dev)


def _sqrt_value(x, precision: int):
    """sqrt of a positive value, exact when the radicand is a perfect square."""
    if isinstance(x, (int, Fraction)):
        fx = Fraction(x)
        rn = math.isqrt(fx.numerator)
        rd = math.isqrt(fx.denominator)
        if rn * rn == fx.numerator and rd * rd == fx.denominator:
            return Fraction(rn, rd)
        return gmpy2.sqrt(numeric.to_mpfr(fx, precision))
    return gmpy2.sqrt(numeric.to_mpfr(x, precision))


def orthonormalize(elements, mode: str = "relative", norms=None, precision: int = numeric.DEFAULT_PRECISION):
    """Rescale an orthogonal basis to unit vectors.

    relative: unit norm for the normalized pairing <.,.>/<f,f>; exact
    coefficients survive when norm_sq is a perfect square.  absolute:
    the Petersson norms <f,f> (scalar, or a dict keyed by form id, or
    taken from records upstream) are folded in, so the coefficients
    then apply to the raw translates f|V_ell and the vectors have true
    Petersson norm 1.  Zero vectors are rejected.
    """
    if mode not in ("relative", "absolute"):
        raise ValueError("mode must be 'relative' or 'absolute'")
    out = []
    with numeric.context(precision):
        for el in elements:
            total = el.norm_sq
            if not total > 0:
                raise ValueError(f"element {el.exponents} of {el.form_id} has nonpositive norm_sq {total}")
            if mode == "absolute":
                if norms is None:
                    raise ValueError("absolute mode needs Petersson norms")
                base = norms.get(el.form_id) if isinstance(norms, dict) else norms
                if base is None:
                    raise ValueError(f"no Petersson norm supplied for {el.form_id!r}")
                if not base > 0:
                    raise ValueError("Petersson norm must be positive")
                total = total * numeric.to_mpfr(base, precision)
            scale = _sqrt_value(total, precision)
            coeffs = {}
            for ell, c in el.coeffs.items():
                if isinstance(c, (int, Fraction)) and isinstance(scale, Fraction):
                    coeffs[ell] = Fraction(c) / scale
                else:
                    cv = numeric.to_mpc(c, precision) if isinstance(c, gmpy2.mpc) else numeric.to_mpfr(c, precision)
                    coeffs[ell] = cv / numeric.to_mpfr(scale, precision)
            unit = Fraction(1) if isinstance(scale, Fraction) and mode == "relative" else numeric.to_mpfr(1, precision)
            out.append(OrthoBasisElement(el.form_id, el.level, el.weight, el.exponents, coeffs, unit))
    return out
