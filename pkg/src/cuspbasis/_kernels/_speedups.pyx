# cython: language_level=3
"""Compiled Horner evaluation of truncated q-expansions.

Coefficients are unpacked once into a contiguous array of MPFR or MPC
structs; every eval() afterwards runs entirely inside libmpc/libmpfr,
skipping Python object churn in the innermost quadrature loop.
"""

from gmpy2 cimport *
from libc.stdlib cimport malloc, free

cdef extern from "mpc.h":
    void mpc_mul(mpc_ptr, mpc_ptr, mpc_ptr, int)
    void mpc_add(mpc_ptr, mpc_ptr, mpc_ptr, int)
    void mpc_add_fr(mpc_ptr, mpc_ptr, mpfr_ptr, int)
    void mpc_set_si(mpc_ptr, long, int)
    void mpc_init2(mpc_ptr, long)
    void mpc_clear(mpc_ptr)
    void mpc_set(mpc_ptr, mpc_ptr, int)

cdef extern from "mpfr.h":
    void mpfr_init2(mpfr_ptr, long)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)

import_gmpy2()

import gmpy2

BACKEND = "compiled"


cdef class RealSeriesEval:
    """Horner evaluator for series with real coefficients."""

    cdef __mpfr_struct* c
    cdef Py_ssize_t n
    cdef long prec

    def __cinit__(self, coeffs, long prec):
        self.n = len(coeffs)
        self.prec = prec
        self.c = <__mpfr_struct*>malloc(self.n * sizeof(__mpfr_struct))
        if self.c == NULL and self.n > 0:
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(self.n):
            mpfr_init2(&self.c[i], prec)
            v = gmpy2.mpfr(coeffs[i], prec)
            mpfr_set(&self.c[i], (<mpfr>v).f, MPFR_RNDN)

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.c != NULL:
            for i in range(self.n):
                mpfr_clear(&self.c[i])
            free(self.c)

    def __len__(self):
        return self.n

    def eval(self, q, nterms=None):
        """sum_{j=1..nterms} c_j q^j via Horner from the top."""
        cdef mpc qq = <mpc?>q
        cdef Py_ssize_t m = self.n if nterms is None else min(<Py_ssize_t>nterms, self.n)
        cdef mpc acc = GMPy_MPC_New(self.prec, self.prec, NULL)
        cdef Py_ssize_t i
        mpc_set_si(acc.c, 0, MPC_RNDNN)
        for i in range(m - 1, -1, -1):
            mpc_mul(acc.c, acc.c, qq.c, MPC_RNDNN)
            mpc_add_fr(acc.c, acc.c, &self.c[i], MPC_RNDNN)
        mpc_mul(acc.c, acc.c, qq.c, MPC_RNDNN)
        return acc


cdef class ComplexSeriesEval:
    """Horner evaluator for series with complex coefficients."""

    cdef __mpc_struct* c
    cdef Py_ssize_t n
    cdef long prec

    def __cinit__(self, coeffs, long prec):
        self.n = len(coeffs)
        self.prec = prec
        self.c = <__mpc_struct*>malloc(self.n * sizeof(__mpc_struct))
        if self.c == NULL and self.n > 0:
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(self.n):
            mpc_init2(&self.c[i], prec)
            v = gmpy2.mpc(coeffs[i], precision=(prec, prec))
            mpc_set(&self.c[i], (<mpc>v).c, MPC_RNDNN)

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.c != NULL:
            for i in range(self.n):
                mpc_clear(&self.c[i])
            free(self.c)

    def __len__(self):
        return self.n

    def eval(self, q, nterms=None):
        cdef mpc qq = <mpc?>q
        cdef Py_ssize_t m = self.n if nterms is None else min(<Py_ssize_t>nterms, self.n)
        cdef mpc acc = GMPy_MPC_New(self.prec, self.prec, NULL)
        cdef Py_ssize_t i
        mpc_set_si(acc.c, 0, MPC_RNDNN)
        for i in range(m - 1, -1, -1):
            mpc_mul(acc.c, acc.c, qq.c, MPC_RNDNN)
            mpc_add(acc.c, acc.c, &self.c[i], MPC_RNDNN)
        mpc_mul(acc.c, acc.c, qq.c, MPC_RNDNN)
        return acc
