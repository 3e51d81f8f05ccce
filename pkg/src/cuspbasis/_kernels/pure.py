"""Pure-Python fallback for the series evaluation kernel.

Same API as the compiled module: coefficient arrays are converted to
mpfr/mpc once, eval() is a plain Horner loop in gmpy2 arithmetic.
"""

from __future__ import annotations

import gmpy2

BACKEND = "pure"


class RealSeriesEval:
    """Horner evaluator for series with real coefficients."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs, prec: int):
        self.prec = prec
        self.coeffs = [gmpy2.mpfr(c, prec) for c in coeffs]

    def __len__(self):
        return len(self.coeffs)

    def eval(self, q, nterms: int | None = None):
        """sum_{j=1..nterms} c_j q^j via Horner from the top."""
        c = self.coeffs
        m = len(c) if nterms is None else min(nterms, len(c))
        acc = gmpy2.mpc(0, precision=(self.prec, self.prec))
        for i in range(m - 1, -1, -1):
            acc = acc * q + c[i]
        return acc * q


class ComplexSeriesEval:
    """Horner evaluator for series with complex coefficients."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs, prec: int):
        self.prec = prec
        self.coeffs = [gmpy2.mpc(c, precision=(prec, prec)) for c in coeffs]

    def __len__(self):
        return len(self.coeffs)

    def eval(self, q, nterms: int | None = None):
        c = self.coeffs
        m = len(c) if nterms is None else min(nterms, len(c))
        acc = gmpy2.mpc(0, precision=(self.prec, self.prec))
        for i in range(m - 1, -1, -1):
            acc = acc * q + c[i]
        return acc * q
