import pytest

from cuspbasis.newforms import embedded_records
from cuspbasis.petersson import QuadratureConfig, petersson_product


@pytest.fixture(scope="session")
def records():
    """Embedded forms with enough coefficients for every numeric test."""
    return {r.id: r for r in embedded_records(truncation=8000)}


@pytest.fixture(scope="session")
def delta(records):
    return records["delta"]


@pytest.fixture(scope="session")
def f11(records):
    return records["11a"]


@pytest.fixture(scope="session")
def quad_cfg():
    return QuadratureConfig(tolerance=1e-8)


@pytest.fixture(scope="session")
def norms(records, quad_cfg):
    """Petersson norms of the embedded forms, computed once by quadrature."""
    out = {}
    for rec in records.values():
        res = petersson_product(rec.qexp, rec.qexp, rec.level, quad_cfg)
        out[rec.id] = res.value.real
    return out


@pytest.fixture(scope="session")
def records_with_norms(records, norms):
    return {rid: rec.with_norm(norms[rid], "numeric") for rid, rec in records.items()}
