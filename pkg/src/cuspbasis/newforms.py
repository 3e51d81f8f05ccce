"""Newform records: ingestion, validation, eigenvalue systems, translates.

A NewformRecord holds the arithmetic data of a primitive cusp form
(normalized Hecke eigenform with a(1) = 1): level, weight, nebentypus
character, Hecke eigenvalues at primes, and optionally a truncated
q-expansion plus a numerically computed Petersson norm.

The eigenvalue system extends lambda(1, p) multiplicatively to all
desk-scale n by the double-coset recursions

    lambda(1, p^2) = lambda(1, p)^2 - (p+1) p^{k-2} chi(p)
    lambda(1, p^j) = lambda(1, p) lambda(1, p^{j-1})
                     - p^{k-1} chi(p) lambda(1, p^{j-2})      (j >= 3)
    lambda(1, p^j) = lambda(1, p)^j                           (p | N)

with chi the character induced to the form's level.  Note lambda(1, n)
differs from the classical coefficient a(n) at non-squarefree n; the
Moebius bridge lambda(1, n) = sum_{d^2 | n} mu(d) d^{k-2} chi(d)
a(n/d^2) is provided for cross-checks.
"""

from __future__ import annotations

import io
import json
import math
import threading
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import gmpy2

from . import numeric
from .arith import DirichletCharacter, RootOfUnity, divisors, factor, induce_character, is_prime, mobius
from .qseries import QSeries, eta_product, growth_constant, hecke_Tp

__all__ = [
    "NewformRecord",
    "EigenvalueSystem",
    "ValidationReport",
    "TranslateBasis",
    "ingest",
    "serialize_records",
    "embedded_records",
    "embedded_dataset_bytes",
    "validate_record",
    "lambda_moebius",
    "translates_basis",
]


@dataclass(frozen=True, eq=False)
class NewformRecord:
    """Arithmetic data of one primitive form, immutable once built."""

    id: str
    level: int
    weight: int
    character: DirichletCharacter
    eigenvalues: dict
    qexp: QSeries | None = None
    petersson_norm: float | None = None
    norm_provenance: str | None = None

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if self.weight < 1:
            raise ValueError("weight must be positive")
        if self.level % self.character.modulus != 0:
            raise ValueError("character modulus must divide the level")
        for p in self.eigenvalues:
            if not is_prime(p):
                raise ValueError(f"eigenvalue key {p} is not prime")
        if self.petersson_norm is not None and not self.petersson_norm > 0:
            raise ValueError("petersson_norm must be positive")

    @property
    def is_exact(self) -> bool:
        return self.character.is_real and all(numeric.is_exact(v) for v in self.eigenvalues.values())

    def with_norm(self, value: float, provenance: str = "numeric") -> "NewformRecord":
        if provenance not in ("numeric", "external"):
            raise ValueError("norm provenance must be 'numeric' or 'external'")
        return replace(self, petersson_norm=float(value), norm_provenance=provenance)

    def eigenvalue(self, p: int):
        if p not in self.eigenvalues:
            raise KeyError(f"record {self.id!r} has no eigenvalue at prime {p}")
        return self.eigenvalues[p]


class EigenvalueSystem:
    """Multiplicative lambda(1, n) built from stored prime eigenvalues.

    Memoized and internally synchronized; exact (Fraction) arithmetic
    whenever the record's eigenvalues are rational and the character is
    real, complex mpc arithmetic otherwise.
    """

    def __init__(self, record: NewformRecord, precision: int = numeric.DEFAULT_PRECISION):
        self.record = record
        self.precision = precision
        self.chi = induce_character(record.character, record.level)
        self.exact = record.is_exact
        self._cache: dict[int, object] = {1: Fraction(1) if self.exact else gmpy2.mpc(1)}
        self._lock = threading.Lock()

    def _coerce(self, v):
        if self.exact:
            return Fraction(v) if isinstance(v, int) else v
        return numeric.to_mpc(v, self.precision)

    def _chi_val(self, p: int):
        v = self.chi.value(p)
        if isinstance(v, RootOfUnity):
            return v.to_mpc(self.precision)
        return v

    def prime_power(self, p: int, j: int):
        """lambda(1, p^j) by the double-coset recursion.

        Runs under a context at self.precision: gmpy2 rounds results to
        the context precision, not the operand precision.
        """
        with numeric.context(self.precision):
            return self._prime_power(p, j)

    def _prime_power(self, p: int, j: int):
        if j == 0:
            return self._cache[1]
        lam = self._coerce(self.record.eigenvalue(p))
        if j == 1:
            return lam
        k = self.record.weight
        if self.record.level % p == 0:
            return lam**j
        chi_p = self._chi_val(p)
        if j == 2:
            return lam * lam - (p + 1) * p ** (k - 2) * chi_p
        return lam * self._prime_power(p, j - 1) - p ** (k - 1) * chi_p * self._prime_power(p, j - 2)

    def value(self, n: int):
        """lambda(1, n), multiplicative across prime powers."""
        if n < 1:
            raise ValueError("lambda(1, n) requires n >= 1")
        with self._lock, numeric.context(self.precision):
            if n in self._cache:
                return self._cache[n]
            out = self._cache[1]
            for p, e in factor(n):
                key = p**e
                if key not in self._cache:
                    self._cache[key] = self._prime_power(p, e)
                out = out * self._cache[key]
            self._cache[n] = out
            return out

    def __call__(self, n: int):
        return self.value(n)


def lambda_moebius(record: NewformRecord, n: int):
    """lambda(1, n) from expansion coefficients via the Moebius bridge.

    Independent of the recursion; requires the q-expansion through n.
    """
    if record.qexp is None:
        raise ValueError(f"record {record.id!r} has no q-expansion")
    k = record.weight
    chi = induce_character(record.character, record.level)
    total = Fraction(0) if record.is_exact else gmpy2.mpc(0)
    for d in range(1, math.isqrt(n) + 1):
        if n % (d * d):
            continue
        mu = mobius(d)
        if mu == 0:
            continue
        c = chi.value(d)
        if c == 0:
            continue
        val = mu * d ** (k - 2) * record.qexp.coefficient(n // (d * d))
        if isinstance(c, RootOfUnity):
            val = numeric.to_mpc(val) * c.to_mpc()
        else:
            val = c * val
        total = total + val
    return total


# -- embedded dataset ---------------------------------------------------

_EMBEDDED_SPECS = (
    ("delta", ((1, 24),), 1, 12),
    ("11a", ((1, 2), (11, 2)), 11, 2),
)


@lru_cache(maxsize=4)
def embedded_records(truncation: int = 10000) -> tuple[NewformRecord, ...]:
    """The two compiled-in primitive forms, built from exact eta products.

    Eigenvalues at every prime up to the truncation are read off the
    expansion (a(p) = lambda(1, p) for a normalized eigenform).
    """
    out = []
    for name, spec, level, weight in _EMBEDDED_SPECS:
        f = eta_product(spec, truncation)
        assert f.level == level and f.weight == weight
        eigen = {}
        p = 2
        while p <= truncation:
            if is_prime(p):
                eigen[p] = f.coefficient(p)
            p += 1
        rec = NewformRecord(
            id=name,
            level=level,
            weight=weight,
            character=DirichletCharacter.trivial(1),
            eigenvalues=eigen,
            qexp=f,
        )
        out.append(rec)
    return tuple(out)


# -- serialization ------------------------------------------------------


def _value_to_json(v):
    if isinstance(v, (int, Fraction)):
        return str(v)
    if isinstance(v, gmpy2.mpc):
        return [numeric._sci(v.real, 38), numeric._sci(v.imag, 38)]
    if isinstance(v, (float, gmpy2.mpfr)):
        return [numeric._sci(gmpy2.mpfr(v), 38), "0"]
    raise TypeError(f"cannot serialize eigenvalue {v!r}")


def _value_from_json(v):
    if isinstance(v, str):
        return _parse_rational(v)
    if isinstance(v, (int, float)):
        return _parse_rational(str(v)) if isinstance(v, int) else gmpy2.mpc(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        re, im = (gmpy2.mpfr(str(x), 128) for x in v)
        if im == 0 and re == int(re):
            return int(re)
        return gmpy2.mpc(re, im, precision=(128, 128))
    raise ValueError(f"malformed eigenvalue entry {v!r}")


def _parse_rational(s: str) -> Fraction | int:
    frac = Fraction(s)
    return int(frac) if frac.denominator == 1 else frac


def _character_to_json(chi: DirichletCharacter):
    out = {"kind": chi.kind, "modulus": chi.modulus}
    if chi.kind == "kronecker":
        out["d"] = chi.d
    if chi.kind == "table":
        vals = []
        for v in chi.values():
            if isinstance(v, RootOfUnity):
                z = v.to_complex()
                vals.append([z.real, z.imag])
            else:
                vals.append([float(v), 0.0])
        out["values"] = vals
    return out


def _character_from_json(obj) -> DirichletCharacter:
    if not isinstance(obj, dict) or "kind" not in obj or "modulus" not in obj:
        raise ValueError("character must be an object with 'kind' and 'modulus'")
    kind = obj["kind"]
    modulus = int(obj["modulus"])
    if kind == "trivial":
        return DirichletCharacter.trivial(modulus)
    if kind == "kronecker":
        if "d" not in obj:
            raise ValueError("kronecker character needs 'd'")
        return DirichletCharacter.kronecker(int(obj["d"]), modulus)
    if kind == "table":
        if "values" not in obj:
            raise ValueError("table character needs 'values'")
        vals = [complex(re, im) for re, im in obj["values"]]
        return DirichletCharacter.from_table(modulus, vals)
    raise ValueError(f"unknown character kind {kind!r}")


def serialize_records(records) -> bytes:
    """Canonical JSON for a record list; inverse of ingest()."""
    out = []
    for rec in records:
        entry = {
            "id": rec.id,
            "level": rec.level,
            "weight": rec.weight,
            "character": _character_to_json(rec.character),
            "eigenvalues": {str(p): _value_to_json(v) for p, v in sorted(rec.eigenvalues.items())},
        }
        if rec.qexp is not None:
            entry["qexp"] = {
                "truncation": rec.qexp.truncation,
                "coeffs": [str(rec.qexp.coefficient(n)) for n in range(1, rec.qexp.truncation + 1)],
            }
        if rec.petersson_norm is not None:
            entry["petersson_norm"] = {"value": rec.petersson_norm, "provenance": rec.norm_provenance}
        out.append(entry)
    return json.dumps(out, indent=1, sort_keys=True).encode()


@lru_cache(maxsize=2)
def embedded_dataset_bytes(truncation: int = 10000) -> bytes:
    return serialize_records(embedded_records(truncation))


def _require(cond, msg):
    if not cond:
        raise ValueError(f"newform dataset: {msg}")


def ingest(source) -> list[NewformRecord]:
    """Parse a JSON newform dataset into validated records.

    source may be a path, bytes, a file-like object, or an already
    parsed list of dicts.  Schema errors raise ValueError with the
    offending field named; duplicate ids are rejected.
    """
    if isinstance(source, (list, tuple)):
        data = source
    else:
        if isinstance(source, bytes):
            raw = source
        elif isinstance(source, io.IOBase) or hasattr(source, "read"):
            raw = source.read()
        else:
            with open(source, "rb") as fh:
                raw = fh.read()
        data = json.loads(raw)
    _require(isinstance(data, list), "top level must be a list of records")
    records = []
    seen = set()
    for i, entry in enumerate(data):
        where = f"record #{i}"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        for key in ("id", "level", "weight", "character", "eigenvalues"):
            _require(key in entry, f"{where}: missing field {key!r}")
        rid = entry["id"]
        _require(isinstance(rid, str) and rid, f"{where}: id must be a nonempty string")
        _require(rid not in seen, f"duplicate record id {rid!r}")
        seen.add(rid)
        level = entry["level"]
        _require(isinstance(level, int) and level >= 1, f"{rid}: level must be a positive integer")
        weight = entry["weight"]
        _require(isinstance(weight, int) and weight >= 1, f"{rid}: weight must be a positive integer")
        chi = _character_from_json(entry["character"])
        _require(level % chi.modulus == 0, f"{rid}: character modulus {chi.modulus} does not divide level {level}")
        _require(isinstance(entry["eigenvalues"], dict), f"{rid}: eigenvalues must be an object")
        eigen = {}
        for key, val in entry["eigenvalues"].items():
            p = int(key)
            _require(is_prime(p), f"{rid}: eigenvalue key {key} is not prime")
            eigen[p] = _value_from_json(val)
        qexp = None
        if "qexp" in entry and entry["qexp"] is not None:
            q = entry["qexp"]
            _require(isinstance(q, dict) and "truncation" in q and "coeffs" in q, f"{rid}: malformed qexp")
            T = int(q["truncation"])
            coeffs = q["coeffs"]
            _require(len(coeffs) == T, f"{rid}: qexp lists {len(coeffs)} coefficients for truncation {T}")
            parsed = [_parse_rational(c) if isinstance(c, str) else c for c in coeffs]
            qexp = QSeries({n: v for n, v in enumerate(parsed, start=1) if v != 0}, T, weight, level, chi)
        norm = None
        prov = None
        if "petersson_norm" in entry and entry["petersson_norm"] is not None:
            pn = entry["petersson_norm"]
            _require(isinstance(pn, dict) and "value" in pn, f"{rid}: malformed petersson_norm")
            norm = float(pn["value"])
            _require(norm > 0, f"{rid}: petersson_norm must be positive")
            prov = pn.get("provenance", "external")
            _require(prov in ("numeric", "external"), f"{rid}: bad norm provenance {prov!r}")
        records.append(
            NewformRecord(rid, level, weight, chi, eigen, qexp=qexp, petersson_norm=norm, norm_provenance=prov)
        )
    return records


# -- validation ---------------------------------------------------------


@dataclass
class ValidationReport:
    record_id: str
    issues: list

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_record(record: NewformRecord, hecke_primes=None) -> ValidationReport:
    """Internal-consistency checks on one record.

    Verified: character conductor divides the level, eigenvalue size
    bounds (Deligne at good primes, p^{(k-1)/2} at bad ones), and when
    a q-expansion is stored: a(1) = 1, the measured growth constant is
    <= 1 + 1e-9, T(p) f = lambda(1, p) f through the available
    truncation, and chi(p) conj(lambda) = lambda at good primes.
    """
    issues = []
    N, k = record.level, record.weight
    chi = induce_character(record.character, N)
    if N % record.character.conductor() != 0:
        issues.append("character conductor does not divide the level")
    for p, lam in sorted(record.eigenvalues.items()):
        mag = abs(complex(lam)) if isinstance(lam, gmpy2.mpc) else abs(float(lam))
        bound = (2.0 if N % p else 1.0) * p ** ((k - 1) / 2)
        if mag > bound * (1 + 1e-6):
            issues.append(f"eigenvalue at p={p} has |lambda| = {mag:.6g} > {bound:.6g}")
        if N % p != 0:
            cv = chi.value(p)
            lhs = (cv.to_mpc(96) if isinstance(cv, RootOfUnity) else cv) * numeric.conjugate(lam)
            diff = lhs - lam
            bad = diff != 0 if numeric.is_exact(diff) else abs(complex(diff)) > 1e-20 * max(1.0, abs(complex(lam)))
            if bad:
                issues.append(f"chi(p) conj(lambda) != lambda at p={p}")
    f = record.qexp
    if f is not None:
        if f.coefficient(1) != 1:
            issues.append(f"a(1) = {f.coefficient(1)!r}, expected 1 (normalized eigenform)")
        C = growth_constant(f)
        if C > 1 + 1e-9:
            issues.append(f"measured growth constant {C:.12g} exceeds 1 + 1e-9")
        primes = sorted(record.eigenvalues) if hecke_primes is None else sorted(hecke_primes)
        for p in primes:
            if f.truncation // p < 1:
                continue
            if p not in record.eigenvalues:
                issues.append(f"no stored eigenvalue at p={p} for Hecke consistency check")
                continue
            lam = record.eigenvalues[p]
            g = hecke_Tp(f, p, k, chi)
            top = f.truncation // p
            for n in range(1, top + 1):
                want = lam * f.coefficient(n)
                got = g.coefficient(n)
                if numeric.is_exact(want) and numeric.is_exact(got):
                    if want != got:
                        issues.append(f"T({p}) f != lambda(1,{p}) f first at n={n}")
                        break
                elif abs(complex(got - want)) > 1e-18 * max(1.0, abs(complex(want))):
                    issues.append(f"T({p}) f != lambda(1,{p}) f first at n={n} (numeric)")
                    break
    return ValidationReport(record.id, issues)


# -- translates ---------------------------------------------------------


@dataclass
class TranslateBasis:
    """Oldform translate inventory for S_k(Gamma_0(M), chi)."""

    level: int
    weight: int
    pairs: list  # (record, ell) with ell | M / record.level
    warnings: list

    def __len__(self):
        return len(self.pairs)


def translates_basis(records, M: int, k: int, chi: DirichletCharacter | None = None) -> TranslateBasis:
    """All translates f|V_ell spanning the (old+new) space at level M.

    For each supplied record of weight k, level N | M, and character
    inducing the same primitive character as chi, every divisor
    ell | M/N contributes one translate.  Ordered by (level, id, ell).
    Divisor levels with no record at all are listed as warnings: the
    inventory (and hence any dimension inferred from it) is only as
    complete as the supplied records.
    """
    if chi is None:
        chi = DirichletCharacter.trivial(1)
    if M % chi.modulus != 0:
        raise ValueError("character modulus must divide M")
    chosen = []
    covered_levels = set()
    for rec in sorted(records, key=lambda r: (r.level, r.id)):
        if rec.weight != k or M % rec.level != 0:
            continue
        if rec.level % chi.conductor() != 0:
            continue
        if not induce_character(rec.character, rec.level).same_primitive_core(chi):
            continue
        covered_levels.add(rec.level)
        for ell in divisors(M // rec.level):
            chosen.append((rec, ell))
    warnings = []
    for N in divisors(M):
        if N % chi.conductor() == 0 and N not in covered_levels:
            warnings.append(f"no record of level {N} supplied; inventory may undercount the space")
    return TranslateBasis(M, k, chosen, warnings)
