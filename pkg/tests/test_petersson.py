"""Tests for numeric Petersson products against independent quadrature."""

import cmath
import math
import random
from fractions import Fraction

import gmpy2
import pytest
import scipy.integrate

from cuspbasis.gram import gram_entry
from cuspbasis.newforms import EigenvalueSystem
from cuspbasis.petersson import (
    GramNumericReport,
    PeterssonResult,
    QuadratureConfig,
    _BaseEvaluator,
    _reduce_point,
    petersson_product,
    petersson_product_translates,
    verify_gram_numeric,
    verify_trace_skp,
)
from cuspbasis.qseries import QSeries, TruncationInsufficientError

QUICK = QuadratureConfig(y_cutoff=6.0, nodes=10, cells_x=2, cells_y=3, tolerance=1e-5, precision=96)


# -- configuration guards ------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        {"y_cutoff": 1.5},
        {"nodes": 1},
        {"cells_x": 0},
        {"cells_y": 0},
        {"tolerance": 0.0},
        {"tolerance": -1e-9},
        {"precision": 32},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


# -- point reduction -----------------------------------------------------------


def test_reduce_point_returns_none_when_already_high():
    assert _reduce_point(complex(0.3, 2.0), 1) is None
    assert _reduce_point(complex(0.1, 0.5), 11) is None  # y >= 1/L


@pytest.mark.parametrize("L", [1, 2, 11])
def test_reduce_point_legality(L):
    rng = random.Random(1257 + L)
    improved = 0
    for _ in range(120):
        w = complex(rng.uniform(-2, 2), rng.uniform(1e-4, 0.4 / L))
        out = _reduce_point(w, L)
        if out is None:
            continue
        a, b, c, d = out
        assert a * d - b * c == 1
        assert c % L == 0 and c > 0
        assert math.gcd(c, d) == 1
        jac = c * w + d
        assert abs(jac) < 1.0  # imaginary part strictly improves
        improved += 1
    assert improved > 60  # low points essentially always reduce


# -- evaluator truncation budgeting ---------------------------------------------


def test_evaluator_truncation_monotone(records):
    ev = _BaseEvaluator(records["delta"].qexp, 96, 1e-25)
    t_low = ev.required_truncation(0.9)
    t_mid = ev.required_truncation(2.0)
    t_high = ev.required_truncation(6.0)
    assert t_low >= t_mid >= t_high >= 0
    assert t_low > t_high


def test_evaluator_truncation_exhaustion():
    stub = QSeries({1: 1}, 10, 12)
    ev = _BaseEvaluator(stub, 96, 1e-40)
    with pytest.raises(TruncationInsufficientError):
        ev.required_truncation(0.01)


def test_evaluator_rejects_half_integral():
    half = QSeries({1: 1}, 10, Fraction(1, 2))
    with pytest.raises(ValueError):
        _BaseEvaluator(half, 96, 1e-10)


# -- diagonal product against independent adaptive quadrature --------------------


def _naive_delta_coeffs(deg):
    poly = [0] * (deg + 1)
    poly[0] = 1
    for n in range(1, deg + 1):
        for _ in range(24):
            new = poly[:]
            for i in range(0, deg + 1 - n):
                new[i + n] -= poly[i]
            poly = new
    return poly  # a(n) = poly[n - 1]


@pytest.fixture(scope="module")
def delta_norm_oracle():
    """Petersson norm of the weight-12 level-1 form by scipy dblquad.

    The integrand uses naive convolution coefficients and Horner
    summation: no code shared with the library's evaluation path.
    """
    poly = _naive_delta_coeffs(80)

    def integrand(y, x):
        q = cmath.exp(2j * math.pi * complex(x, y))
        s = 0j
        for n in range(80, 0, -1):
            s = s * q + poly[n - 1]
        s *= q
        return abs(s) ** 2 * y**10

    val, err = scipy.integrate.dblquad(
        integrand, -0.5, 0.5, lambda x: math.sqrt(1 - x * x), 40.0, epsabs=1e-14, epsrel=1e-10
    )
    return val, err


def test_diagonal_product_matches_adaptive_oracle(records, delta_norm_oracle):
    cfg = QuadratureConfig(nodes=14, cells_x=3, cells_y=4, tolerance=1e-7, precision=128)
    res = petersson_product(records["delta"].qexp, records["delta"].qexp, 1, cfg)
    oracle, oracle_err = delta_norm_oracle
    assert isinstance(res, PeterssonResult)
    assert res.index == 1
    value = float(res.value.real)
    assert abs(float(res.value.imag)) < 1e-12 * value
    assert abs(value - oracle) < 1e-6 * oracle + oracle_err
    # the self-reported error bound is honest against the oracle
    assert abs(value - oracle) < 10 * float(res.error) + oracle_err + 1e-16


def test_node_doubling_stability(records):
    f = records["delta"].qexp
    lo = petersson_product(f, f, 1, QuadratureConfig(nodes=10, tolerance=1e-7, precision=128))
    hi = petersson_product(f, f, 1, QuadratureConfig(nodes=20, tolerance=1e-7, precision=128))
    rel = abs(lo.value - hi.value) / abs(hi.value)
    assert float(rel) < 1e-7


def test_reduction_and_raw_modes_agree(records):
    f = records["delta"].qexp
    red = petersson_product(f, f, 1, QUICK)
    raw_cfg = QuadratureConfig(
        y_cutoff=6.0, nodes=10, cells_x=2, cells_y=3, tolerance=1e-5, precision=96, use_reduction=False
    )
    raw = petersson_product(f, f, 1, raw_cfg)
    dev = abs(red.value - raw.value)
    assert float(dev) <= float(red.error + raw.error) + 1e-18
    assert float(dev) < 1e-8 * float(abs(red.value))


# -- translate pairings -----------------------------------------------------------


def test_translate_pairing_symmetry_and_ratio(records):
    f = records["delta"].qexp
    results = petersson_product_translates([(f, 1), (f, 2)], [(0, 0), (0, 1), (1, 0)], 2, QUICK)
    r00, r01, r10 = results[(0, 0)], results[(0, 1)], results[(1, 0)]
    assert r00.index == 3
    with gmpy2.context(gmpy2.get_context(), precision=96):
        assert abs(r01.value - r10.value.conjugate()) < 1e-30
        ratio = r01.value / r00.value.real
        assert abs(ratio - gmpy2.mpq(-1, 256)) < 1e-6


def test_zero_form_short_circuits(records):
    f = records["delta"].qexp
    zero = QSeries({}, 100, 12)
    res = petersson_product(f, zero, 1, QUICK)
    assert res.value == 0 and res.error == 0


def test_pairing_input_validation(records):
    delta, f11 = records["delta"].qexp, records["11a"].qexp
    with pytest.raises(ValueError, match="weights"):
        petersson_product(delta, f11, 11, QUICK)
    with pytest.raises(ValueError, match="divide"):
        petersson_product(f11, f11, 12, QUICK)
    with pytest.raises(ValueError, match="positive"):
        petersson_product_translates([(delta, 0)], [(0, 0)], 1, QUICK)
    with pytest.raises(ValueError, match="no forms"):
        petersson_product_translates([], [], 1, QUICK)
    tight = QuadratureConfig(nodes=10, tolerance=1e-5, precision=96, max_index=2)
    with pytest.raises(ValueError, match="exceeds"):
        petersson_product(delta, delta, 6, tight)
    half = QSeries({1: 1}, 10, Fraction(1, 2))
    with pytest.raises(ValueError, match="weight"):
        petersson_product(half, half, 4, QUICK)


# -- closed-form cross-checks ------------------------------------------------------


def test_verify_gram_numeric_level2(records):
    rec = records["delta"]
    rep = verify_gram_numeric(rec, 2, [(1, 2), (2, 1)], QUICK, rel_tolerance=1e-3)
    assert isinstance(rep, GramNumericReport)
    assert rep.ok and rep.level == 2 and rep.form_id == rec.id
    assert rep.max_rel_deviation < 1e-3
    sys = EigenvalueSystem(rec)
    for m, n, ratio, exact, rel, row_err, passed in rep.rows:
        assert passed
        assert exact == gram_entry(sys, m, n)
    # the (2, 1) row is the conjugate entry, equal here since all data is real
    assert rep.rows[0][3] == Fraction(-1, 256)
    assert rep.rows[1][3] == Fraction(-1, 256)


def test_verify_gram_numeric_guards(records):
    from cuspbasis.arith import DirichletCharacter
    from cuspbasis.newforms import NewformRecord

    rec = records["11a"]
    with pytest.raises(ValueError, match="fit inside"):
        verify_gram_numeric(rec, 11, [(1, 2)], QUICK)
    bare = NewformRecord("bare", 11, 2, DirichletCharacter.trivial(11), {2: -2})
    with pytest.raises(ValueError, match="q-expansion"):
        verify_gram_numeric(bare, 22, [(1, 2)], QUICK)


def test_verify_trace_skp_adjointness(records):
    f = records["delta"].qexp
    rep = verify_trace_skp(f, f, 1, 2, QUICK, rel_tolerance=1e-3, g_translate=2)
    assert rep.ok
    assert float(rep.deviation) <= 1e-3 * float(abs(rep.lhs)) + float(rep.lhs_error) + float(rep.rhs_error)


def test_verify_trace_skp_guards(records):
    delta, f11 = records["delta"].qexp, records["11a"].qexp
    with pytest.raises(ValueError, match="divide"):
        verify_trace_skp(delta, delta, 2, 3, QUICK)
    with pytest.raises(ValueError, match="weights"):
        verify_trace_skp(f11, delta, 1, 2, QUICK)
    with pytest.raises(ValueError, match="level N"):
        verify_trace_skp(f11, f11, 2, 22, QUICK)
