"""Tests for truncated q-expansions: eta products, operators, evaluation.

Eta expansions are checked against a naive one-factor-at-a-time
convolution oracle; evaluation is checked against values computed
independently with mpmath's q-Pochhammer (frozen below at 40 digits).
"""

import math
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspbasis.qseries import (
    QSeries,
    TruncationInsufficientError,
    apply_U,
    apply_V,
    eta_product,
    evaluate,
    growth_constant,
    hecke_Tp,
)

def zpt(x, y, prec=140):
    """Complex point from decimal strings at full target precision.

    The two-component mpc constructor rounds to the ambient context
    precision unless the precision is passed explicitly.
    """
    return gmpy2.mpc(gmpy2.mpfr(x, prec), gmpy2.mpfr(y, prec), (prec, prec))


# Frozen oracles: q * qp(q)^24 and q * qp(q)^2 * qp(q^11)^2 at 50 dps.
DELTA_AT_I = gmpy2.mpfr("0.001785369850642151904343054960342262310581", 140)
DELTA_AT_GENERIC = zpt(
    "-0.0004960329283237786152169833504860503806462",
    "0.01352345491065020461478585374663227925685",
)
F11_AT_GENERIC = zpt(
    "0.06156794266720862365907356077419881471846",
    "0.03467641029780688025042733391183622582904",
)

TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
A11 = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2]


def naive_eta_factor_product(spec, limit):
    """Coefficients of prod_i prod_{n>=1} (1 - q^{s_i n})^{e_i} up to q^limit.

    Positive exponents only; multiplies one binomial factor at a time,
    completely independent of the pentagonal-number recursion.
    """
    coeffs = [0] * (limit + 1)
    coeffs[0] = 1
    for s, e in spec:
        for _ in range(e):
            for n in range(1, limit // s + 1):
                shift = s * n
                for j in range(limit, shift - 1, -1):
                    coeffs[j] -= coeffs[j - shift]
    return coeffs


def naive_eta_product(spec, truncation):
    """Absolute q-exponent dict for prod eta(s z)^e, naive convolution."""
    lead = sum(s * e for s, e in spec) // 24
    arr = naive_eta_factor_product(spec, truncation - lead)
    return {lead + j: c for j, c in enumerate(arr) if c}


def as_array(series, limit):
    out = [0] * (limit + 1)
    for n, v in series.items():
        if n <= limit:
            out[n] = v
    return out


def convolve(a, b, limit):
    out = [0] * (limit + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(0, limit + 1 - i):
            if b[j]:
                out[i + j] += x * b[j]
    return out


# -- eta products ------------------------------------------------------


def test_eta_delta_matches_naive_expansion():
    f = eta_product(((1, 24),), 60)
    assert dict(f.items()) == naive_eta_product(((1, 24),), 60)
    assert f.weight == 12 and f.level == 1


def test_eta_level11_matches_naive_expansion():
    f = eta_product(((1, 2), (11, 2)), 60)
    assert dict(f.items()) == naive_eta_product(((1, 2), (11, 2)), 60)
    assert f.weight == 2 and f.level == 11


def test_eta_known_leading_coefficients():
    f = eta_product(((1, 24),), 100)
    assert [f.coefficient(n) for n in range(1, len(TAU) + 1)] == TAU
    g = eta_product(((1, 2), (11, 2)), 100)
    assert [g.coefficient(n) for n in range(1, len(A11) + 1)] == A11


def test_eta_division_inverts_multiplication():
    # eta^48 / eta^24 must reproduce eta^24 exactly.
    assert eta_product(((1, 48), (1, -24)), 300).items() == eta_product(((1, 24),), 300).items()


def test_eta_division_against_naive_convolution():
    # h = eta(2z)^48 / eta(z)^24 checked by multiplying back: h * eta(z)^24 == eta(2z)^48.
    limit = 80
    h = eta_product(((2, 48), (1, -24)), limit)
    assert h.weight == 12 and h.level == 2 and h.support()[0] == 3
    eta24 = [0] * (limit + 1)
    for n, c in naive_eta_product(((1, 24),), limit).items():
        eta24[n] = c
    lhs = convolve(as_array(h, limit), eta24, limit)
    rhs = [0] * (limit + 1)
    for n, c in naive_eta_product(((2, 48),), limit).items():
        rhs[n] = c
    assert lhs == rhs


def test_eta_rejects_bad_specs():
    with pytest.raises(ValueError):
        eta_product(((1, 1),), 50)  # half-integral total weight
    with pytest.raises(ValueError):
        eta_product(((1, 2),), 50)  # leading power 2/24 not integral
    with pytest.raises(ValueError):
        eta_product(((0, 24),), 50)
    with pytest.raises(ValueError):
        eta_product(((1, 0), (1, 24)), 50)
    with pytest.raises(ValueError):
        eta_product(((48, 24),), 40)  # leading exponent 48 beyond truncation
    with pytest.raises(ValueError):
        eta_product(((1, -24),), 50)  # weight -12


def test_eta_level_is_lcm_of_scales():
    f = eta_product(((2, 4), (6, 4), (1, 4), (3, 4)), 50)
    assert f.level == 6 and f.weight == 8


# -- construction and validation ---------------------------------------


def test_qseries_rejects_constant_and_overflow_terms():
    with pytest.raises(ValueError):
        QSeries({0: 1}, 10, 12)
    with pytest.raises(ValueError):
        QSeries({11: 1}, 10, 12)
    with pytest.raises(ValueError):
        QSeries({1: 1}, 0, 12)
    with pytest.raises(ValueError):
        QSeries({1: 1}, 10, 0)
    with pytest.raises(ValueError):
        QSeries({1: 1}, 10, 12, level=0)


def test_qseries_inspection_helpers():
    f = QSeries({3: 5, 1: 2, 7: 0}, 10, 12)
    assert f.support() == [1, 3]
    assert f.items() == [(1, 2), (3, 5)]
    assert f.coefficient(7) == 0
    with pytest.raises(ValueError):
        f.coefficient(11)
    with pytest.raises(ValueError):
        f.coefficient(0)
    assert not f.is_zero and f.is_exact
    g = f.with_level(4)
    assert g.level == 4 and g.items() == f.items() and f.level == 1
    h = QSeries({1: gmpy2.mpfr("1.5")}, 10, 12)
    assert not h.is_exact
    z = QSeries({}, 10, 12)
    assert z.is_zero


def test_qseries_accepts_list_input():
    f = QSeries([1, -24, 252], 3, 12)
    assert f.items() == [(1, 1), (2, -24), (3, 252)]


# -- operator laws -----------------------------------------------------


@pytest.fixture(scope="module")
def delta_small():
    return eta_product(((1, 24),), 400)


@settings(max_examples=40, deadline=None)
@given(ell=st.integers(min_value=1, max_value=12))
def test_V_then_U_roundtrip(ell):
    f = eta_product(((1, 24),), 200)
    g = apply_U(apply_V(f, ell), ell)
    assert g.items() == f.items()
    assert g.truncation == f.truncation


@settings(max_examples=40, deadline=None)
@given(a=st.integers(min_value=1, max_value=6), b=st.integers(min_value=1, max_value=6))
def test_V_composition(a, b):
    f = eta_product(((1, 24),), 100)
    lhs = apply_V(apply_V(f, a), b)
    rhs = apply_V(f, a * b)
    assert lhs.items() == rhs.items()
    assert lhs.level == rhs.level == a * b
    assert lhs.truncation == rhs.truncation


@settings(max_examples=40, deadline=None)
@given(a=st.integers(min_value=1, max_value=5), b=st.integers(min_value=1, max_value=5))
def test_U_composition(a, b):
    f = eta_product(((1, 24),), 600)
    lhs = apply_U(apply_U(f, a), b)
    rhs = apply_U(f, a * b)
    assert lhs.items() == rhs.items()
    assert lhs.truncation == rhs.truncation


def test_V_shifts_support(delta_small):
    g = apply_V(delta_small, 3)
    assert g.level == 3 and g.truncation == 3 * delta_small.truncation
    assert all(n % 3 == 0 for n in g.support())
    assert g.coefficient(9) == delta_small.coefficient(3)
    assert g.coefficient(10) == 0


def test_operator_input_validation(delta_small):
    with pytest.raises(ValueError):
        apply_V(delta_small, 0)
    with pytest.raises(ValueError):
        apply_U(delta_small, 0)
    with pytest.raises(ValueError):
        apply_U(eta_product(((1, 24),), 3), 4)  # truncation collapses to zero
    assert apply_V(delta_small, 1) is delta_small
    assert apply_U(delta_small, 1) is delta_small


def test_hecke_T2_and_T3_eigenvalues_on_delta(delta_small):
    t2 = hecke_Tp(delta_small, 2)
    assert all(t2.coefficient(n) == -24 * delta_small.coefficient(n) for n in range(1, t2.truncation + 1))
    t3 = hecke_Tp(delta_small, 3)
    assert all(t3.coefficient(n) == 252 * delta_small.coefficient(n) for n in range(1, t3.truncation + 1))


def test_hecke_degenerates_to_U_at_bad_prime():
    f = eta_product(((1, 2), (11, 2)), 600)
    t11 = hecke_Tp(f, 11)
    u11 = apply_U(f, 11)
    assert t11.items() == u11.items()
    assert all(u11.coefficient(n) == f.coefficient(n) for n in range(1, u11.truncation + 1))


def test_hecke_input_validation(delta_small):
    with pytest.raises(ValueError):
        hecke_Tp(delta_small, 6)
    half = QSeries({1: 1}, 10, Fraction(1, 2))
    with pytest.raises(ValueError):
        hecke_Tp(half, 2)


def test_tau_prime_power_recursion(delta_small):
    # tau(p^2) = tau(p)^2 - p^11 at the good primes.
    for p in (2, 3, 5, 7, 11, 13):
        tp = delta_small.coefficient(p)
        assert delta_small.coefficient(p * p) == tp * tp - p**11


@settings(max_examples=60, deadline=None)
@given(m=st.integers(min_value=1, max_value=19), n=st.integers(min_value=1, max_value=19))
def test_tau_multiplicative(m, n):
    f = eta_product(((1, 24),), 400)
    if math.gcd(m, n) == 1:
        assert f.coefficient(m * n) == f.coefficient(m) * f.coefficient(n)


# -- certified evaluation ----------------------------------------------


def test_evaluate_delta_at_i_matches_oracle(delta_small):
    cert = evaluate(delta_small, gmpy2.mpc(0, 1), 1e-30, precision=140)
    assert cert.tail < 1e-30
    assert abs(cert.value.real - DELTA_AT_I) < 2e-31 + float(cert.tail)
    assert abs(cert.value.imag) < 2e-31 + float(cert.tail)


def test_evaluate_delta_generic_point_matches_oracle(delta_small):
    z = zpt("0.3", "0.7", 140)
    cert = evaluate(delta_small, z, 1e-30, precision=140)
    assert abs(cert.value - DELTA_AT_GENERIC) < 2e-31 + float(cert.tail)


def test_evaluate_level11_point_matches_oracle():
    f = eta_product(((1, 2), (11, 2)), 2000)
    z = zpt("0.1", "0.4", 140)
    cert = evaluate(f, z, 1e-30, precision=140)
    assert abs(cert.value - F11_AT_GENERIC) < 2e-31 + float(cert.tail)


def test_evaluate_translate_consistency(delta_small):
    # Dyadic coordinates keep 3*z exact regardless of context precision.
    z = zpt("0.25", "0.5625", 140)
    lhs = evaluate(apply_V(delta_small, 3), z, 1e-25, precision=140)
    rhs = evaluate(delta_small, 3 * z, 1e-25, precision=140)
    assert abs(lhs.value - rhs.value) < float(lhs.tail) + float(rhs.tail) + 1e-30


def test_evaluate_tail_honesty(delta_small):
    z = zpt("0.1", "0.8", 120)
    loose = evaluate(delta_small, z, 1e-6, precision=120)
    tight = evaluate(delta_small, z, 1e-28, precision=120)
    assert loose.tprime < tight.tprime
    assert tight.tail < loose.tail
    assert abs(loose.value - tight.value) <= float(loose.tail) + float(tight.tail)


def test_evaluate_reports_needed_truncation(delta_small):
    with pytest.raises(TruncationInsufficientError) as exc:
        evaluate(delta_small, zpt("0.0", "0.004"), 1e-12)
    assert exc.value.needed > exc.value.available == delta_small.truncation
    assert "truncation" in str(exc.value)


def test_evaluate_input_validation(delta_small):
    with pytest.raises(ValueError):
        evaluate(delta_small, gmpy2.mpc(0, -1), 1e-10)
    with pytest.raises(ValueError):
        evaluate(delta_small, gmpy2.mpc(0, 1), 0.0)
    with pytest.raises(ValueError):
        evaluate(delta_small, zpt("0.5", "0.0"), 1e-10)


def test_evaluate_zero_series():
    z = QSeries({}, 10, 12)
    cert = evaluate(z, gmpy2.mpc(0, 1), 1e-20)
    assert cert.value == 0 and cert.tail == 0 and cert.terms_used == 0


def test_evaluate_matches_naive_horner(delta_small):
    z = zpt("0.17", "0.6", 150)
    cert = evaluate(delta_small, z, 1e-32, precision=150)
    with gmpy2.context(gmpy2.get_context(), precision=150):
        q = gmpy2.exp(2j * gmpy2.const_pi() * z)
        naive = sum(v * q**n for n, v in delta_small.items() if n <= cert.tprime)
    assert abs(cert.value - naive) < 1e-40


def test_growth_constant_attains_deligne_bound():
    # |a(n)| <= sigma_0(n) n^{(k-1)/2} with equality at n = 1 for both forms.
    assert growth_constant(eta_product(((1, 24),), 2000)) == 1.0
    assert growth_constant(eta_product(((1, 2), (11, 2)), 2000)) == 1.0
    assert growth_constant(QSeries({}, 10, 12)) == 0.0
