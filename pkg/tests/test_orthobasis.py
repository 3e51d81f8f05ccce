"""Tests for explicit orthogonal bases: per-prime vectors, tensor assembly,
exact Gram-Schmidt verification, and normalization modes."""

from fractions import Fraction

import gmpy2
import pytest

from cuspbasis.arith import DirichletCharacter, sigma0
from cuspbasis.gram import gram_entry, gram_matrix
from cuspbasis.newforms import EigenvalueSystem, NewformRecord, embedded_records
from cuspbasis.orthobasis import (
    OrthoBasisElement,
    assemble_full_basis,
    gram_schmidt_check,
    orthonormalize,
    prime_basis,
)


@pytest.fixture(scope="module")
def forms():
    return {r.id: r for r in embedded_records(truncation=600)}


# -- per-prime vectors and closed-form norms ------------------------------


def test_prime_basis_good_prime_two(forms):
    g0, g1, g2, g3 = prime_basis(forms["delta"], 2, 3)
    assert g0.coeffs == {0: 1} and g0.norm_sq == 1
    assert g1.coeffs == {1: 64, 0: Fraction(1, 4)}
    assert g1.norm_sq == Fraction(15, 16)
    assert g2.coeffs == {2: 4096, 1: 24, 0: Fraction(1, 2)}  # -s*conj(lam)/p^k = +24
    assert g2.norm_sq == g3.norm_sq == Fraction(45, 64)


def test_prime_basis_good_prime_three(forms):
    _, g1, g2 = prime_basis(forms["delta"], 3, 2)
    assert g1.coeffs == {1: 729, 0: Fraction(-7, 27)}
    assert g1.norm_sq == Fraction(680, 729)
    assert g2.coeffs == {2: 531441, 1: -252, 0: Fraction(1, 3)}
    assert g2.norm_sq == Fraction(5440, 6561)


def test_prime_basis_bad_prime(forms):
    g0, g1, g2 = prime_basis(forms["11a"], 11, 2)
    assert g0.norm_sq == 1
    assert g1.norm_sq == g2.norm_sq == Fraction(120, 121)
    assert g1.coeffs == {1: 11, 0: Fraction(-11, 121)}


def test_prime_basis_validation(forms):
    with pytest.raises(ValueError):
        prime_basis(forms["delta"], 2, -1)
    assert len(prime_basis(forms["delta"], 2, 0)) == 1
    with pytest.raises(TypeError):
        prime_basis("delta", 2, 1)


def test_prime_basis_orthogonal_against_gram(forms):
    # Direct verification that each g_j is orthogonal to every g_i, i != j,
    # and has exactly the claimed norm, in exact arithmetic.
    for rec, p, r in ((forms["delta"], 2, 3), (forms["delta"], 3, 2), (forms["11a"], 11, 2)):
        basis = prime_basis(rec, p, r)
        for a in basis:
            for b in basis:
                prod = sum(
                    ca * cb * gram_entry(rec, p**ia, p**ib)
                    for ia, ca in a.coeffs.items()
                    for ib, cb in b.coeffs.items()
                )
                assert prod == (a.norm_sq if a.j == b.j else 0), (rec.id, p, a.j, b.j)


# -- tensor assembly --------------------------------------------------------


def test_assemble_counts_and_order(forms):
    els = assemble_full_basis(forms.values(), 48, 12)
    assert len(els) == sigma0(48)
    assert all(el.form_id == "delta" for el in els)
    exps = [el.exponents for el in els]
    assert exps[0] == ((2, 0), (3, 0))
    assert ((2, 4), (3, 1)) in exps and len(set(exps)) == len(exps)


def test_assemble_weight_filter(forms):
    els = assemble_full_basis(forms.values(), 44, 2)
    assert len(els) == sigma0(4) and all(el.form_id == "11a" for el in els)


def test_assemble_tensor_coefficients(forms):
    els = {el.exponents: el for el in assemble_full_basis([forms["delta"]], 6, 12)}
    b2 = {el.j: el for el in prime_basis(forms["delta"], 2, 1)}
    b3 = {el.j: el for el in prime_basis(forms["delta"], 3, 1)}
    mixed = els[((2, 1), (3, 1))]
    assert mixed.norm_sq == b2[1].norm_sq * b3[1].norm_sq == Fraction(15, 16) * Fraction(680, 729)
    for (i2, c2) in b2[1].coeffs.items():
        for (i3, c3) in b3[1].coeffs.items():
            assert mixed.coeffs[2**i2 * 3**i3] == c2 * c3
    assert set(mixed.coeffs) == {1, 2, 3, 6}


def test_assemble_multiple_forms_same_space(forms):
    # weight-2 space at M = 44 only matches 11a; at M = 48 only delta (weight 12)
    both = assemble_full_basis(forms.values(), 44 * 1, 2)
    assert {el.form_id for el in both} == {"11a"}


# -- exact Gram-Schmidt verification ----------------------------------------


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6, 8, 16, 48])
def test_gram_schmidt_exact_zero_delta(forms, M):
    els = assemble_full_basis([forms["delta"]], M, 12)
    rep = gram_schmidt_check(els, gram_matrix(forms["delta"], M))
    assert rep.exact and rep.size == sigma0(M)
    assert rep.max_offdiag == 0 and rep.max_norm_dev == 0 and rep.ok


@pytest.mark.parametrize("M", [11, 22, 44])
def test_gram_schmidt_exact_zero_11a(forms, M):
    els = assemble_full_basis([forms["11a"]], M, 2)
    rep = gram_schmidt_check(els, gram_matrix(forms["11a"], M))
    assert rep.exact and rep.max_offdiag == 0 and rep.max_norm_dev == 0


def test_gram_schmidt_detects_corruption(forms):
    els = assemble_full_basis([forms["delta"]], 2, 12)
    bad = OrthoBasisElement(
        els[1].form_id, els[1].level, els[1].weight, els[1].exponents, dict(els[1].coeffs), els[1].norm_sq + 1
    )
    rep = gram_schmidt_check([els[0], bad], gram_matrix(forms["delta"], 2))
    assert not rep.ok and rep.max_norm_dev == 1


def test_gram_schmidt_input_errors(forms):
    els = assemble_full_basis([forms["delta"]], 4, 12)
    with pytest.raises(ValueError):
        gram_schmidt_check(els, gram_matrix(forms["delta"], 2))  # V_4 has no Gram row
    with pytest.raises(ValueError):
        gram_schmidt_check(els, gram_matrix(forms["11a"], 44))  # wrong form


# -- orthonormalization -------------------------------------------------------


def test_orthonormalize_relative(forms):
    els = assemble_full_basis([forms["delta"]], 2, 12)
    unit = orthonormalize(els, mode="relative")
    assert unit[0].coeffs == {1: 1} and unit[0].norm_sq == 1  # norm 1 stays exact
    g1 = unit[1]
    with gmpy2.context(gmpy2.get_context(), precision=160):
        scale = gmpy2.sqrt(gmpy2.mpfr(15) / 16)
        assert abs(g1.coeffs[2] - 64 / scale) < 1e-30
    rep = gram_schmidt_check(unit, gram_matrix(forms["delta"], 2))
    assert not rep.exact and rep.ok
    assert float(rep.max_norm_dev) < 1e-30


def test_orthonormalize_exact_when_square(forms):
    # 120/121 is not a perfect square but 1/4096-scaled diagonals are:
    # build a fake element whose norm_sq is 9/16 and check exactness survives.
    el = OrthoBasisElement("delta", 1, 12, ((2, 0),), {1: Fraction(3, 2)}, Fraction(9, 16))
    (out,) = orthonormalize([el])
    assert out.coeffs == {1: 2} and out.norm_sq == 1
    assert isinstance(out.coeffs[1], Fraction)


def test_orthonormalize_absolute(forms):
    els = assemble_full_basis([forms["delta"]], 2, 12)
    norm_f = 1.0353620568043209e-06
    unit = orthonormalize(els, mode="absolute", norms={"delta": norm_f})
    # coefficients now apply to the raw translates: <u, u> = sum c_m c_n G(m,n) <f,f> = 1
    for el in unit:
        total = sum(
            cm * cn * gmpy2.mpfr(float(gram_entry(forms["delta"], m, n)), 128)
            for m, cm in el.coeffs.items()
            for n, cn in el.coeffs.items()
        )
        assert abs(total * norm_f - 1) < 1e-12


def test_orthonormalize_absolute_scalar_norm(forms):
    els = assemble_full_basis([forms["delta"]], 1, 12)
    (out,) = orthonormalize(els, mode="absolute", norms=2.0)
    with gmpy2.context(gmpy2.get_context(), precision=160):
        assert abs(out.coeffs[1] - 1 / gmpy2.sqrt(gmpy2.mpfr(2))) < 1e-25


def test_orthonormalize_errors(forms):
    els = assemble_full_basis([forms["delta"]], 2, 12)
    with pytest.raises(ValueError):
        orthonormalize(els, mode="euclidean")
    with pytest.raises(ValueError):
        orthonormalize(els, mode="absolute")
    with pytest.raises(ValueError):
        orthonormalize(els, mode="absolute", norms={"other": 1.0})
    with pytest.raises(ValueError):
        orthonormalize(els, mode="absolute", norms={"delta": 0.0})
    zero = OrthoBasisElement("delta", 1, 12, ((2, 0),), {1: 0}, Fraction(0))
    with pytest.raises(ValueError):
        orthonormalize([zero])


# -- inexact branch: odd weight, complex character ----------------------------


def test_numeric_basis_branch():
    i = complex(0, 1)
    chi = DirichletCharacter.from_table(5, [0, 1, i, -i, -1])
    # chi(2) = i forces lambda(2) = chi(2) conj(lambda(2)): equal real/imag parts
    lam2 = gmpy2.mpc(gmpy2.mpfr("0.5", 128), gmpy2.mpfr("0.5", 128), (128, 128))
    rec = NewformRecord("cplx", 5, 3, chi, {2: lam2})
    sys = EigenvalueSystem(rec)
    basis = prime_basis(sys, 2, 2)
    assert all(not isinstance(v, Fraction) for el in basis[1:] for v in el.coeffs.values())
    els = assemble_full_basis([rec], 20, 3, chi=chi)
    assert len(els) == sigma0(4)
    rep = gram_schmidt_check(els, gram_matrix(sys, 20))
    assert not rep.exact and rep.ok, (float(rep.max_offdiag), float(rep.max_norm_dev))
