"""Command-line surface: ingestion, bases, products, bounds, verification.

Outputs are deterministic: JSON with sorted keys, numeric leaves
rendered through numeric.format_value (exact values as strings, reals
in fixed scientific notation), and test points drawn from a seeded
generator.  Exit status is 0 only when every requested check passes.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import numeric
from .arith import DirichletCharacter
from .bounds import F_bound, empirical_check, hi_bound_report
from .gram import gram_entry, gram_matrix
from .halfint import predicted_product_U, predicted_product_V
from .modgroup import verify_trace_hecke
from .newforms import EigenvalueSystem, embedded_records, ingest, validate_record
from .orthobasis import assemble_full_basis, gram_schmidt_check, orthonormalize
from .petersson import (
    QuadratureConfig,
    petersson_product,
    petersson_product_translates,
    verify_gram_numeric,
    verify_trace_skp,
)

__all__ = ["main", "RunConfig"]

DEFAULT_SEED = 1257


@dataclass(frozen=True)
class RunConfig:
    """Resolved global options for one invocation."""

    precision: int = 128
    truncation: int = 10000
    seed: int = DEFAULT_SEED
    fmt: str = "json"
    output: str | None = None
    dataset: str | None = None
    tolerance: float = 1e-6
    nodes: int = 18
    use_reduction: bool = True

    def __post_init__(self):
        if self.precision < 53:
            raise ValueError("precision must be at least 53 bits")
        if self.fmt not in ("json", "csv", "pretty"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def quadrature(self, tolerance: float | None = None) -> QuadratureConfig:
        return QuadratureConfig(
            tolerance=tolerance if tolerance is not None else self.tolerance,
            nodes=self.nodes,
            precision=self.precision,
            use_reduction=self.use_reduction,
        )


def _run_config(args) -> RunConfig:
    return RunConfig(
        precision=args.precision,
        truncation=args.truncation,
        seed=args.seed,
        fmt=args.format,
        output=args.output,
        dataset=getattr(args, "dataset", None),
        tolerance=getattr(args, "tolerance", 1e-6),
        nodes=getattr(args, "nodes", 18),
        use_reduction=not getattr(args, "no_reduction", False),
    )


def _records(cfg: RunConfig):
    if cfg.dataset:
        with open(cfg.dataset, "rb") as fh:
            return ingest(fh.read())
    return list(embedded_records(truncation=cfg.truncation))


def _record(cfg: RunConfig, form_id: str):
    for rec in _records(cfg):
        if rec.id == form_id:
            return rec
    raise ValueError(f"no record named {form_id!r}; available: {[r.id for r in _records(cfg)]}")


def _emit(payload: dict, cfg: RunConfig) -> None:
    if cfg.fmt == "csv":
        text = payload.get("_csv")
        if text is None:
            raise ValueError("csv output is only available for tabular commands (gram)")
    else:
        payload = {k: v for k, v in payload.items() if k != "_csv"}
        if cfg.fmt == "pretty":
            text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        else:
            text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _number(text: str):
    try:
        f = Fraction(text)
        return int(f) if f.denominator == 1 else f
    except ValueError:
        return float(text)


# -- subcommands -----------------------------------------------------


def cmd_ingest(args) -> int:
    cfg = _run_config(args)
    with open(args.input, "rb") as fh:
        records = ingest(fh.read())
    rows = []
    all_ok = True
    for rec in records:
        row = {
            "id": rec.id,
            "level": rec.level,
            "weight": rec.weight,
            "eigenvalue_primes": len(rec.eigenvalues),
            "has_qexp": rec.qexp is not None,
            "petersson_norm": numeric.format_value(rec.petersson_norm) if rec.petersson_norm else None,
        }
        if args.validate:
            rep = validate_record(rec)
            row["validation"] = {"ok": rep.ok, "issues": rep.issues}
            all_ok = all_ok and rep.ok
        rows.append(row)
    _emit({"records": rows, "ok": all_ok}, cfg)
    return 0 if all_ok else 1


def cmd_basis(args) -> int:
    cfg = _run_config(args)
    records = _records(cfg)
    chi = DirichletCharacter.trivial(1)
    elements = assemble_full_basis(records, args.level, args.weight, chi)
    if not elements:
        raise ValueError(f"no records span level {args.level}, weight {args.weight}")
    if args.mode == "absolute":
        norms = {}
        for rec in records:
            if rec.petersson_norm is None and any(el.form_id == rec.id for el in elements):
                res = petersson_product(rec.qexp, rec.qexp, rec.level, cfg.quadrature())
                norms[rec.id] = res.value.real
            elif rec.petersson_norm is not None:
                norms[rec.id] = rec.petersson_norm
        out_elements = orthonormalize(elements, mode="absolute", norms=norms, precision=cfg.precision)
    else:
        out_elements = elements
    by_form: dict[str, list] = {}
    for el in elements:
        by_form.setdefault(el.form_id, []).append(el)
    checks = []
    grams = []
    all_ok = True
    for fid, group in sorted(by_form.items()):
        rec = next(r for r in records if r.id == fid)
        gm = gram_matrix(rec, args.level)
        rep = gram_schmidt_check(group, gm)
        checks.append(
            {
                "form": fid,
                "ok": rep.ok,
                "max_offdiag": numeric.format_value(rep.max_offdiag),
                "max_norm_dev": numeric.format_value(rep.max_norm_dev),
                "exact": rep.exact,
            }
        )
        grams.append(gm.to_json())
        all_ok = all_ok and rep.ok
    payload = {
        "level": args.level,
        "weight": args.weight,
        "mode": args.mode,
        "dimension": len(out_elements),
        "elements": [
            {
                "form": el.form_id,
                "exponents": [list(e) for e in el.exponents],
                "coefficients": {str(ell): numeric.format_value(c) for ell, c in sorted(el.coeffs.items())},
                "norm_sq": numeric.format_value(el.norm_sq),
            }
            for el in out_elements
        ],
        "gram_matrices": grams,
        "checks": checks,
        "ok": all_ok,
    }
    _emit(payload, cfg)
    return 0 if all_ok else 1


def cmd_gram(args) -> int:
    cfg = _run_config(args)
    rec = _record(cfg, args.form)
    gm = gram_matrix(rec, args.level)
    payload = gm.to_json()
    payload["_csv"] = gm.to_csv()
    _emit(payload, cfg)
    return 0


def cmd_petersson(args) -> int:
    cfg = _run_config(args)
    rec = _record(cfg, args.form)
    qcfg = cfg.quadrature()
    res = petersson_product_translates([(rec.qexp, args.m), (rec.qexp, args.n)], [(0, 1)], args.level, qcfg)[(0, 1)]
    exact = gram_entry(EigenvalueSystem(rec, precision=cfg.precision), args.m, args.n)
    base = petersson_product_translates([(rec.qexp, 1)], [(0, 0)], args.level, qcfg)[(0, 0)]
    ratio = res.value / base.value.real
    exact_c = numeric.to_mpc(exact, cfg.precision)
    deviation = abs(ratio - exact_c)
    payload = {
        "form": rec.id,
        "level": args.level,
        "m": args.m,
        "n": args.n,
        "value": numeric.format_value(res.value),
        "error": numeric.format_value(res.error),
        "index": res.index,
        "y_cutoff": res.y_cutoff,
        "ratio_to_norm": numeric.format_value(ratio),
        "closed_form": numeric.format_value(exact),
        "ratio_deviation": numeric.format_value(deviation),
    }
    ok = True
    if args.check:
        scale = max(abs(exact_c), numeric.to_mpfr(1e-30, cfg.precision))
        ok = bool(deviation / scale < args.rel_tolerance)
        payload["rel_tolerance"] = args.rel_tolerance
        payload["ok"] = ok
    _emit(payload, cfg)
    return 0 if ok else 1


def cmd_bound(args) -> int:
    cfg = _run_config(args)
    if (args.norm is None) != (args.dim is None):
        raise ValueError("--norm and --dim must be supplied together")
    if args.norm is not None:
        rep = F_bound(args.n, args.weight, args.level, _number(args.norm), args.dim, args.coprime, cfg.precision)
    else:
        rep = hi_bound_report(args.n, args.weight, args.level, args.coprime, cfg.precision)
    _emit(rep.to_json(), cfg)
    return 0


def cmd_halfint(args) -> int:
    cfg = _run_config(args)
    lam = _number(args.lam)
    if args.op == "V":
        if args.kappa is None:
            raise ValueError("--kappa is required for the V-product")
        pred = predicted_product_V(args.p, args.kappa, lam, level=args.level4n)
    else:
        pred = predicted_product_U(args.p, lam, level=args.level4n)
    _emit(pred.to_json(), cfg)
    return 0


def _seeded_points(seed: int, count: int = 5):
    rng = random.Random(seed)
    return [complex(rng.uniform(-0.45, 0.45), rng.uniform(0.85, 2.0)) for _ in range(count)]


def _suite_trace_hecke(cfg: RunConfig):
    records = {r.id: r for r in _records(cfg)}
    cases = [("delta", 2), ("delta", 3), ("delta", 4), ("11a", 11)]
    rows = []
    ok = True
    for fid, d in cases:
        points = _seeded_points(cfg.seed + d)
        rep = verify_trace_hecke(records[fid], d, points, tolerance=1e-8, precision=cfg.precision)
        rows.append(
            {
                "form": fid,
                "d": d,
                "points": len(points),
                "max_deviation": rep.max_deviation,
                "ok": rep.ok,
            }
        )
        ok = ok and rep.ok
    return ok, {"suite": "trace-hecke", "cases": rows, "ok": ok}


def _suite_trace_skp(cfg: RunConfig):
    records = {r.id: r for r in _records(cfg)}
    cases = [("delta", 1, 2, 2), ("delta", 1, 3, 3), ("11a", 11, 22, 2)]
    rows = []
    ok = True
    for fid, N, M, d in cases:
        f = records[fid].qexp
        rep = verify_trace_skp(f, f, N, M, cfg.quadrature(), rel_tolerance=1e-3, g_translate=d)
        rows.append(
            {
                "form": fid,
                "N": N,
                "M": M,
                "translate": d,
                "lhs": numeric.format_value(rep.lhs),
                "rhs": numeric.format_value(rep.rhs),
                "deviation": numeric.format_value(rep.deviation),
                "ok": rep.ok,
            }
        )
        ok = ok and rep.ok
    return ok, {"suite": "trace-skp", "cases": rows, "ok": ok}


def _suite_gram_numeric(cfg: RunConfig):
    records = {r.id: r for r in _records(cfg)}
    cases = [
        ("delta", 2, [(1, 2), (2, 2)]),
        ("delta", 3, [(1, 3)]),
        ("delta", 6, [(1, 2), (2, 2), (1, 3), (2, 3)]),
        ("11a", 22, [(1, 2)]),
    ]
    rows = []
    ok = True
    for fid, M, pairs in cases:
        rep = verify_gram_numeric(records[fid], M, pairs, cfg.quadrature(), rel_tolerance=1e-3)
        for m, n, ratio, exact, rel, _err, passed in rep.rows:
            rows.append(
                {
                    "form": fid,
                    "level": M,
                    "m": m,
                    "n": n,
                    "numeric": numeric.format_value(ratio),
                    "closed_form": numeric.format_value(exact),
                    "rel_deviation": float(rel),
                    "ok": passed,
                }
            )
        ok = ok and rep.ok
    return ok, {"suite": "gram-numeric", "cases": rows, "ok": ok}


def _suite_bounds_empirical(cfg: RunConfig):
    records = _records(cfg)
    with_norms = []
    for rec in records:
        if rec.petersson_norm is None:
            res = petersson_product(rec.qexp, rec.qexp, rec.level, cfg.quadrature(1e-7))
            rec = rec.with_norm(res.value.real, "numeric")
        with_norms.append(rec)
    cases = [(1, 12), (2, 12), (11, 2)]
    rows = []
    ok = True
    for M, k in cases:
        rep = empirical_check(with_norms, M, k, n_max=1000, precision=cfg.precision)
        rows.append(
            {
                "level": M,
                "weight": k,
                "dim": rep.dim,
                "n_max": rep.n_max,
                "max_ratio": max(float(r[4]) for r in rep.rows),
                "violations": sum(len(r[3]) for r in rep.rows),
                "max_hecke_dev": max((float(d) for r in rep.rows for d in r[5].values()), default=0.0),
                "ok": rep.ok,
            }
        )
        ok = ok and rep.ok
    return ok, {"suite": "bounds-empirical", "cases": rows, "ok": ok}


_SUITES = {
    "trace-hecke": _suite_trace_hecke,
    "trace-skp": _suite_trace_skp,
    "gram-numeric": _suite_gram_numeric,
    "bounds-empirical": _suite_bounds_empirical,
}


def cmd_verify(args) -> int:
    cfg = _run_config(args)
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    reports = []
    ok = True
    for name in names:
        sub_ok, payload = _SUITES[name](cfg)
        reports.append(payload)
        ok = ok and sub_ok
    _emit({"suites": reports, "ok": ok}, cfg)
    return 0 if ok else 1


# -- parser ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspbasis",
        description="Orthogonal bases of cusp-form spaces from newform eigenvalue data, "
        "with independent numeric verification and explicit coefficient bounds.",
    )
    env_prec = os.environ.get("CUSPBASIS_PRECISION")
    parser.add_argument("--precision", type=int, default=int(env_prec) if env_prec else 128, help="working precision in bits (env CUSPBASIS_PRECISION)")
    parser.add_argument("--truncation", type=int, default=10000, help="q-expansion truncation for embedded forms")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for generated test points")
    parser.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    parser.add_argument("--output", help="write the report to this path instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a newform dataset")
    p.add_argument("--input", required=True, help="JSON dataset path")
    p.add_argument("--validate", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("basis", help="construct the orthogonal/orthonormal basis")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--mode", choices=("relative", "absolute"), default="relative")
    p.add_argument("--dataset", help="JSON dataset path (embedded forms if omitted)")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("gram", help="closed-form Gram matrix of the translate basis")
    p.add_argument("--form", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("petersson", help="numeric Petersson product of two translates")
    p.add_argument("--form", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--nodes", type=int, default=18)
    p.add_argument("--no-reduction", action="store_true", help="evaluate expansions without point reduction")
    p.add_argument("--check", action="store_true", help="compare against the closed form and gate the exit status")
    p.add_argument("--rel-tolerance", type=float, default=1e-3)
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_petersson)

    p = sub.add_parser("bound", help="explicit Fourier-coefficient bound")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coprime", action="store_true")
    p.add_argument("--norm", help="<F,F> for the general-form bound")
    p.add_argument("--dim", type=int, help="dim S_k(Gamma_0(M), chi)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("halfint", help="half-integral-weight predicted products")
    hsub = p.add_subparsers(dest="halfint_command", required=True)
    hp = hsub.add_parser("predict")
    hp.add_argument("--p", type=int, required=True)
    hp.add_argument("--kappa", type=int)
    hp.add_argument("--lambda", dest="lam", required=True, help="eigenvalue lambda_p (rational or float)")
    hp.add_argument("--op", choices=("V", "U"), default="V")
    hp.add_argument("--level4n", type=int, help="optional level 4N for the p-coprimality check")
    hp.set_defaults(func=cmd_halfint)

    p = sub.add_parser("verify", help="run a verification suite on the embedded forms")
    p.add_argument("--suite", choices=(*_SUITES, "all"), required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--nodes", type=int, default=18)
    p.add_argument("--no-reduction", action="store_true")
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
