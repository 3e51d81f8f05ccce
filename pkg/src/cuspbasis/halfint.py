"""Half-integral-weight predicted products and coefficient operators.

For a Hecke eigenform f of weight k = kappa + 1/2 on Gamma_0(4N) with
T(p^2) f = lambda_p f at a prime p not dividing 4N, the stated product
formulas are

    <f, f|V_{p^2}> / <f, f> = lambda_p / ((p^2 + p) p^{2(k-1)}),
    <f, f|U(p^2)> / <f, f> = p^2 lambda_p,

where U(p^2) carries the double-coset normalization
(p^2)^{k/2-1} sum_b f|alpha_b*.  The coefficient-level operator
implemented here is the plain index extraction a(n) -> a(n p^2), which
agrees with that U only in the stated normalization; every report
therefore carries an explicit note instead of silently reconciling
conventions.  No half-integral eigenform data ships with the package:
these are calculators for user-supplied lambda_p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .arith import is_prime
from .qseries import QSeries, apply_U, apply_V

__all__ = [
    "NORMALIZATION_NOTE",
    "HalfIntegralPrediction",
    "predicted_product_V",
    "predicted_product_U",
    "halfint_U_V_coeffs",
]

NORMALIZATION_NOTE = (
    "U(p^2) is normalized as the double-coset operator (p^2)^{k/2-1} sum_b f|alpha_b*; "
    "the plain coefficient map a(n) -> a(n p^2) coincides with it only under this convention, "
    "and the factor p^2 in the U-product is tied to it."
)


def _check_prime_away_from_level(p: int, level: int | None):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        raise ValueError("p = 2 always divides the level 4N of a half-integral form")
    if level is not None:
        if level % 4 != 0:
            raise ValueError(f"half-integral level must be divisible by 4, got {level}")
        if level % p == 0:
            raise ValueError(f"prime {p} divides the level {level}")


@dataclass(frozen=True)
class HalfIntegralPrediction:
    """A predicted normalized product with its convention note."""

    operator: str  # "V" or "U"
    p: int
    kappa: int | None
    lambda_p: object
    value: object
    note: str = NORMALIZATION_NOTE

    def to_json(self) -> dict:
        from . import numeric

        return {
            "operator": self.operator,
            "p": self.p,
            "kappa": self.kappa,
            "lambda": numeric.format_value(self.lambda_p) if not isinstance(self.lambda_p, float) else self.lambda_p,
            "predicted_ratio": numeric.format_value(self.value) if not isinstance(self.value, float) else self.value,
            "normalization_note": self.note,
        }


def predicted_product_V(p: int, kappa: int, lambda_p, level: int | None = None) -> HalfIntegralPrediction:
    """Predicted <f, f|V_{p^2}> / <f, f> = lambda_p / ((p^2+p) p^{2(k-1)}).

    k = kappa + 1/2, so the exponent 2(k-1) is the odd integer
    2 kappa - 1; the denominator stays exact whenever lambda_p is exact.
    """
    if kappa < 1:
        raise ValueError("kappa must be a positive integer")
    _check_prime_away_from_level(p, level)
    denom = (p * p + p) * p ** (2 * kappa - 1)
    if isinstance(lambda_p, (int, Fraction)):
        value = Fraction(lambda_p, denom) if isinstance(lambda_p, int) else lambda_p / denom
    else:
        value = lambda_p / denom
    return HalfIntegralPrediction("V", p, kappa, lambda_p, value)


def predicted_product_U(p: int, lambda_p, level: int | None = None) -> HalfIntegralPrediction:
    """Predicted <f, f|U(p^2)> / <f, f> = p^2 lambda_p (convention-sensitive)."""
    _check_prime_away_from_level(p, level)
    if isinstance(lambda_p, int):
        value = p * p * lambda_p
    else:
        value = lambda_p * (p * p)
    return HalfIntegralPrediction("U", p, None, lambda_p, value)


def halfint_U_V_coeffs(f: QSeries, m: int) -> tuple[QSeries, QSeries]:
    """(f|U(m^2), f|V_{m^2}) as coefficient maps with level bookkeeping.

    U(m^2) keeps a(n m^2); it is defined after viewing f at level
    lcm(m, 4N), so the result carries that level.  V_{m^2} multiplies
    the level by m^2 as usual.
    """
    if f.level % 4 != 0:
        raise ValueError(f"half-integral level must be divisible by 4, got {f.level}")
    if m < 1:
        raise ValueError("m must be a positive integer")
    u = apply_U(f, m * m).with_level(lcm(m, f.level))
    v = apply_V(f, m * m)
    return u, v
