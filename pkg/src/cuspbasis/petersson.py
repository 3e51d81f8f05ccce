"""Numeric Petersson products over coset-decomposed fundamental domains.

The normalized product of two cusp forms of weight k on Gamma_0(M) is

    <f, g> = (1/index) int_{Gamma_0(M) \\ H} f(z) conj(g(z)) y^{k-2} dx dy,

computed here as a sum over coset representatives gamma of
Gamma_0(M) \\ SL_2(Z) of integrals over the standard fundamental domain
F_1 = {|x| <= 1/2, |z| >= 1}: the integrand at a node z is
f(w) conj(g(w)) y^{k-2} |cz + d|^{-2k} with w = gamma z.

Quadrature: tensor Gauss-Legendre on the arc region (x outer, y from
sqrt(1 - x^2) to 1 inner) plus geometric y-cells on the strip
[1, Y]; Y starts at the configured cutoff and grows until a width-aware
tail heuristic meets the error budget (cosets near wide cusps decay
only like e^{-4 pi y / width}).

Every evaluation of a form at a transformed point w is first *reduced*:
a matrix in Gamma_0(level) with maximal Im(delta w) is found by lattice
reduction of {level * w, 1}, so the q-expansion is always summed at a
point of large imaginary part.  This keeps truncation needs at the
levels the expansions actually carry and avoids the cancellation that
raw summation at Im ~ 1/(c^2 y) would hit.  Raw mode is available for
cross-checks (use_reduction=False).

The reported error is a refinement delta (full vs half node count) plus
the accumulated evaluation certificates plus the tail heuristic; the
value itself carries no hidden fudge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import numeric
from .arith import RootOfUnity, induce_character
from .gram import gram_entry
from .modgroup import UnimodularMatrix, coset_reps
from .newforms import EigenvalueSystem, NewformRecord
from .qseries import QSeries, TruncationInsufficientError, _tail_bound, apply_V, growth_constant

__all__ = [
    "QuadratureConfig",
    "PeterssonResult",
    "petersson_product",
    "verify_gram_numeric",
    "GramNumericReport",
    "verify_trace_skp",
    "TraceSkpReport",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Parameters of the Petersson quadrature.

    tolerance is relative to the natural scale of the diagonal product;
    y_cutoff is a floor, raised automatically when wide cusps demand it.
    """

    y_cutoff: float = 6.0
    nodes: int = 18
    cells_x: int = 3
    cells_y: int = 4
    tolerance: float = 1e-6
    precision: int = 128
    use_reduction: bool = True
    max_index: int = 200

    def __post_init__(self):
        if not self.y_cutoff >= 2:
            raise ValueError("y_cutoff must be >= 2")
        if self.nodes < 2:
            raise ValueError("need at least 2 nodes per cell")
        if self.cells_x < 1 or self.cells_y < 1:
            raise ValueError("cell counts must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.precision < 53:
            raise ValueError("precision below 53 bits is not supported")


@dataclass(frozen=True)
class PeterssonResult:
    """A computed product with its a-posteriori error estimate."""

    value: object
    error: object
    index: int
    y_cutoff: float
    nodes: int


def _reduce_point(wc: complex, L: int):
    """Bottom rows of a Gamma_0(L) matrix maximizing Im(gamma w), or None.

    Gauss lattice reduction of {L w, 1} with integer coordinate
    tracking; candidates are scanned for a legal bottom row (c, d) with
    c = 0 mod L, gcd(c, d) = 1, |c w + d| < 1.  Float arithmetic is
    fine here: any legal candidate is valid, optimality only costs
    terms.
    """
    y = wc.imag
    if y * L * L * 0.999 >= L:  # Im can only improve when y < 1/L
        return None
    v1 = (L, 0, L * wc)  # (c, d, c*w + d)
    v2 = (0, 1, complex(1.0, 0.0))

    def n2(v):
        return v[2].real * v[2].real + v[2].imag * v[2].imag

    if n2(v1) < n2(v2):
        v1, v2 = v2, v1
    for _ in range(64):
        mu = round((v1[2].real * v2[2].real + v1[2].imag * v2[2].imag) / n2(v2))
        if mu:
            v1 = (v1[0] - mu * v2[0], v1[1] - mu * v2[1], v1[2] - mu * v2[2])
        if n2(v1) >= n2(v2) * (1 - 1e-12):
            break
        v1, v2 = v2, v1
    best = None
    for al in (0, 1, -1, 2, -2):
        for be in (0, 1, -1, 2, -2):
            c = al * v2[0] + be * v1[0]
            d = al * v2[1] + be * v1[1]
            if c == 0:
                continue
            if math.gcd(c, d) != 1:
                continue
            val = al * v2[2] + be * v1[2]
            m2 = val.real * val.real + val.imag * val.imag
            if m2 < 1e-40:
                continue
            if best is None or m2 < best[0]:
                best = (m2, c, d)
    if best is None or best[0] >= 0.999:
        return None
    _, c, d = best
    if c < 0:
        c, d = -c, -d
    # a d - b c = 1
    g, x, yy = _ext_gcd(d, c)
    return (x, -yy, c, d)


def _ext_gcd(x: int, y: int):
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


class _BaseEvaluator:
    """Reduced, certified evaluation of one base expansion.

    Truncation points T'(y) are solved once per quarter-octave bucket of
    the (post-reduction) imaginary part and reused across the grid.
    """

    def __init__(self, series: QSeries, precision: int, eps: float, use_reduction: bool = True):
        if series.weight.denominator != 1:
            raise ValueError("numeric Petersson products need integral weight")
        self.f = series
        self.k = int(series.weight)
        self.N = series.level
        self.prec = precision
        self.eps = eps
        self.use_reduction = use_reduction
        self.C = growth_constant(series)
        self.chi = induce_character(series.character, self.N)
        self.stride, self.kernel = series._packed(precision)
        self.two_pi_i = 2j * gmpy2.const_pi(precision)
        self._buckets: dict[int, tuple[int, object]] = {}
        self._chi_conj: dict[int, object] = {}

    def _bucket(self, y: float):
        key = math.floor(math.log2(y) * 8.0)
        hit = self._buckets.get(key)
        if hit is None:
            ylo = 2.0 ** (key / 8.0)
            hit = self._solve(ylo)
            self._buckets[key] = hit
        return hit

    def _solve(self, y: float):
        if self.C == 0.0:
            return 0, gmpy2.mpfr(0)
        T = self.f.truncation
        hi = 4
        while not _tail_bound(self.C, self.k, y, hi, self.prec) < self.eps:
            hi *= 2
            if hi > 64 * T:
                raise TruncationInsufficientError(hi, T, f"height {y:.4g}")
        lo = hi // 2 if hi > 4 else 0
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if _tail_bound(self.C, self.k, y, mid, self.prec) < self.eps:
                hi = mid
            else:
                lo = mid
        if hi > T:
            raise TruncationInsufficientError(hi, T, f"height {y:.4g}")
        return hi, _tail_bound(self.C, self.k, y, hi, self.prec)

    def required_truncation(self, y: float) -> int:
        return self._bucket(y)[0]

    def _chi_conj_at(self, d: int):
        v = self._chi_conj.get(d)
        if v is None:
            cv = self.chi.value(d)
            if cv == 0:
                raise ArithmeticError("reduction matrix not coprime to the level")
            v = cv.conjugate().to_mpc(self.prec) if isinstance(cv, RootOfUnity) else cv
            self._chi_conj[d] = v
        return v

    def _raw(self, u, tprime: int):
        if self.kernel is None:
            return gmpy2.mpc(0)
        jmax = tprime // self.stride
        if jmax == 0:
            return gmpy2.mpc(0)
        q = gmpy2.exp(self.two_pi_i * u)
        if self.stride > 1:
            q = q**self.stride
        return self.kernel.eval(q, jmax)

    def value_at(self, u):
        """(value, absolute error bound) at a point of the upper half-plane."""
        delta = _reduce_point(complex(u), self.N) if self.use_reduction else None
        if delta is None:
            t, bound = self._bucket(float(u.imag))
            return self._raw(u, t), bound
        a, b, c, d = delta
        jac = c * u + d
        u2 = (a * u + b) / jac
        t, bound = self._bucket(float(u2.imag))
        raw = self._raw(u2, t)
        fac = self._chi_conj_at(d) * jac ** (-self.k)
        return raw * fac, bound * abs(jac) ** (-self.k)


def _cusp_width(c: int, M: int) -> int:
    return M // math.gcd(c * c, M)


def _pair_scale(C2: float, k: int, Y: float, width: int, precision: int):
    """Heuristic bound for the strip integral above Y at one coset.

    Coefficients of the slashed form are modeled as
    C sigma_0(n) n^{(k-1)/2} width^{-k/2} with decay e^{-2 pi n y/width}.
    """
    with numeric.context(precision):
        total = gmpy2.mpfr(0)
        four_pi = 4 * gmpy2.const_pi()
        for n in range(1, 61):
            x = four_pi * n * Y / width
            g = numeric.upper_gamma(k - 1, x, precision)
            total += (n + 1) ** 2 * Fraction(n) ** (k - 1) * g / (four_pi * n) ** (k - 1)
        return total * C2 / width


def _grid(cfg: QuadratureConfig, Y: float, nodes: int, precision: int):
    """Quadrature nodes (x, y, weight) covering F_1 cut at y = Y."""
    gl_nodes, gl_weights = numeric.gauss_legendre(nodes, precision)
    out = []
    with numeric.context(precision):
        one = gmpy2.mpfr(1)
        xs = []
        for cx in range(cfg.cells_x):
            lo = gmpy2.mpfr(-0.5) + gmpy2.mpfr(cx) / cfg.cells_x
            hi = gmpy2.mpfr(-0.5) + gmpy2.mpfr(cx + 1) / cfg.cells_x
            mid, half = (lo + hi) / 2, (hi - lo) / 2
            for t, wt in zip(gl_nodes, gl_weights):
                xs.append((mid + half * t, half * wt))
        # arc region: y from sqrt(1 - x^2) up to 1
        for x, wx in xs:
            ylo = gmpy2.sqrt(one - x * x)
            mid, half = (ylo + one) / 2, (one - ylo) / 2
            for t, wt in zip(gl_nodes, gl_weights):
                out.append((x, mid + half * t, wx * half * wt))
        # strip region: geometric cells from 1 to Y
        ncells = max(cfg.cells_y, math.ceil(math.log(Y) / math.log(1.8)))
        ratio = Y ** (1.0 / ncells)
        bounds = [gmpy2.mpfr(1)] + [gmpy2.mpfr(ratio**i) for i in range(1, ncells)] + [gmpy2.mpfr(Y)]
        for cy in range(ncells):
            lo, hi = bounds[cy], bounds[cy + 1]
            mid, half = (lo + hi) / 2, (hi - lo) / 2
            for t, wt in zip(gl_nodes, gl_weights):
                y = mid + half * t
                wy = half * wt
                for x, wx in xs:
                    out.append((x, y, wx * wy))
    return out


def _pairing_many(translates, pairs, M: int, cfg: QuadratureConfig):
    """Shared-grid Petersson products of translate pairs at level M.

    translates: list of (base QSeries, multiplier m) meaning f|V_m;
    pairs: list of (i, j) index pairs into that list.  Returns
    {pair: PeterssonResult}.
    """
    if not translates:
        raise ValueError("no forms supplied")
    k = translates[0][0].weight
    for base, mult in translates:
        if base.weight != k:
            raise ValueError("nonmatching weights in Petersson pairing")
        if mult < 1:
            raise ValueError("translate multipliers must be positive")
        if M % (base.level * mult) != 0:
            raise ValueError(f"translate level {base.level * mult} does not divide ambient level {M}")
    if k.denominator != 1:
        raise ValueError("numeric Petersson products need integral weight")
    k = int(k)
    system = coset_reps(1, M)
    index = system.index
    if index > cfg.max_index:
        raise ValueError(f"index {index} exceeds configured bound {cfg.max_index}")
    prec = cfg.precision

    zero_results = {}
    for i, j in pairs:
        if translates[i][0].is_zero or translates[j][0].is_zero:
            zero_results[(i, j)] = PeterssonResult(gmpy2.mpc(0), gmpy2.mpfr(0), index, cfg.y_cutoff, cfg.nodes)
    live_pairs = [p for p in pairs if p not in zero_results]
    if not live_pairs:
        return zero_results

    with numeric.context(prec):
        C_max = max(max(growth_constant(b) for b, _ in translates), 1e-30)
        scale = _pair_scale(C_max * C_max, k, 1.0, max(_cusp_width(r.c, M) for r in system.reps), prec)
        scale = max(scale, gmpy2.mpfr(1e-300))

        # raise Y until the wide-cusp tail clears the budget
        Y = cfg.y_cutoff
        budget = gmpy2.mpfr(cfg.tolerance) * scale / 4
        for _ in range(40):
            tail = gmpy2.mpfr(0)
            for rep in system.reps:
                tail += _pair_scale(C_max * C_max, k, Y, _cusp_width(rep.c, M), prec)
            if tail < budget or not cfg.use_reduction:
                break
            Y *= 1.4
        else:
            raise ValueError("tail estimate does not converge; cutoff growth capped")

        eps_node = float(gmpy2.mpfr(cfg.tolerance) * scale) * 1e-5
        evals = {}
        for base, _ in translates:
            if id(base) not in evals and not base.is_zero:
                evals[id(base)] = _BaseEvaluator(base, prec, eps_node, cfg.use_reduction)

        # truncation prescan at box corners, named per coset
        corners = [complex(x, y) for x in (-0.5, 0.0, 0.5) for y in (0.87, 1.0, float(Y))]
        for rep in system.reps:
            for base, mult in translates:
                if base.is_zero:
                    continue
                ev = evals[id(base)]
                for zc in corners:
                    den = rep.c * zc + rep.d
                    wc = (rep.a * zc + rep.b) / den
                    uc = mult * wc
                    red = _reduce_point(uc, base.level) if cfg.use_reduction else None
                    if red is None:
                        y2 = uc.imag
                    else:
                        ra, rb, rc, rd = red
                        y2 = uc.imag / abs(rc * uc + rd) ** 2
                    try:
                        ev.required_truncation(y2)
                    except TruncationInsufficientError as exc:
                        raise TruncationInsufficientError(
                            exc.needed,
                            exc.available,
                            f"coset bottom row {rep.bottom}, post-reduction height {y2:.4g}",
                        ) from None

        def sweep(nodes_per_cell: int, with_certs: bool):
            grid = _grid(cfg, float(Y), nodes_per_cell, prec)
            acc = {p: gmpy2.mpc(0) for p in live_pairs}
            cert = {p: gmpy2.mpfr(0) for p in live_pairs} if with_certs else None
            for x, y, wt in grid:
                z = gmpy2.mpc(x, y)
                yk = y ** (k - 2)
                for rep in system.reps:
                    jac = rep.c * z + rep.d
                    w = (rep.a * z + rep.b) / jac
                    pref = wt * yk * abs(jac) ** (-2 * k)
                    vals = []
                    errs = []
                    for base, mult in translates:
                        if base.is_zero:
                            vals.append(gmpy2.mpc(0))
                            errs.append(gmpy2.mpfr(0))
                            continue
                        u = mult * w if mult > 1 else w
                        v, e = evals[id(base)].value_at(u)
                        vals.append(v)
                        errs.append(e)
                    for p in live_pairs:
                        i, j = p
                        acc[p] += pref * vals[i] * numeric.conjugate(vals[j])
                        if with_certs:
                            ai, aj = abs(vals[i]), abs(vals[j])
                            cert[p] += pref * (ai * errs[j] + aj * errs[i] + errs[i] * errs[j])
            return acc, cert, len(grid)

        acc_full, certs, ngrid = sweep(cfg.nodes, True)
        acc_half, _, _ = sweep(max(3, cfg.nodes // 2), False)

        tail = gmpy2.mpfr(0)
        for rep in system.reps:
            tail += _pair_scale(C_max * C_max, k, float(Y), _cusp_width(rep.c, M), prec)

        results = dict(zero_results)
        for p in live_pairs:
            value = acc_full[p] / index
            delta = abs(acc_full[p] - acc_half[p]) / index
            err = delta + (certs[p] + tail) / index
            results[p] = PeterssonResult(value, err, index, float(Y), ngrid)
        return results


def petersson_product(f: QSeries, g: QSeries, M: int, cfg: QuadratureConfig | None = None) -> PeterssonResult:
    """Normalized Petersson product <f, g> at level M by quadrature.

    Both forms must have the same integral weight and levels dividing
    M.  A zero form short-circuits to an exact 0.  The result's error
    field combines refinement delta, evaluation certificates, and the
    cutoff tail heuristic.

    When a form is a known translate h|V_m, prefer
    petersson_product_translates: reducing the base at its own (small)
    level needs far fewer stored coefficients near wide cusps.
    """
    cfg = cfg or QuadratureConfig()
    if f.weight != g.weight:
        raise ValueError(f"nonmatching weights {f.weight} and {g.weight}")
    results = _pairing_many([(f, 1), (g, 1)], [(0, 1)], M, cfg)
    return results[(0, 1)]


def petersson_product_translates(translates, pairs, M: int, cfg: QuadratureConfig | None = None):
    """Products <f_i|V_{m_i}, f_j|V_{m_j}> at level M on one shared grid.

    translates is a list of (base, multiplier) pairs and pairs a list of
    index pairs (i, j) into it; returns {(i, j): PeterssonResult}.
    """
    cfg = cfg or QuadratureConfig()
    return _pairing_many(list(translates), list(pairs), M, cfg)


@dataclass
class GramNumericReport:
    """Quadrature ratios against the closed-form Gram entries."""

    form_id: str
    level: int
    rows: list  # (m, n, numeric ratio, exact value, |rel dev|, row error est, passed)
    tolerance: float

    @property
    def max_rel_deviation(self) -> float:
        return max((float(r[4]) for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return all(r[6] for r in self.rows)


def verify_gram_numeric(
    record: NewformRecord,
    M: int,
    pairs,
    cfg: QuadratureConfig | None = None,
    rel_tolerance: float = 1e-3,
) -> GramNumericReport:
    """Check <f|V_m, f|V_n> / <f, f> against the closed form at level M.

    All requested translate pairs ride one shared quadrature grid, and
    the normalizing <f, f> is integrated on the same grid.
    """
    if record.qexp is None:
        raise ValueError(f"record {record.id!r} has no q-expansion")
    cfg = cfg or QuadratureConfig(tolerance=min(1e-6, rel_tolerance * 1e-2))
    f = record.qexp
    sys = EigenvalueSystem(record)
    mults = sorted({1} | {m for m, n in pairs} | {n for m, n in pairs})
    for m in mults:
        if M % (record.level * m) != 0:
            raise ValueError(f"translate V_{m} of level {record.level * m} does not fit inside level {M}")
    translates = [(f, m) for m in mults]
    pos = {m: i for i, m in enumerate(mults)}
    want = [(pos[min(m, n)], pos[max(m, n)]) if pos[m] > pos[n] else (pos[m], pos[n]) for m, n in pairs]
    ask = sorted(set(want) | {(0, 0)})
    results = _pairing_many(translates, ask, M, cfg)
    base = results[(0, 0)]
    rows = []
    for (m, n), key in zip(pairs, want):
        swapped = pos[m] > pos[n]
        res = results[key]
        num = numeric.conjugate(res.value) if swapped else res.value
        ratio = num / base.value.real
        exact = gram_entry(sys, m, n)
        exact_c = numeric.to_mpc(exact, cfg.precision)
        dev = abs(ratio - exact_c)
        scale = max(abs(exact_c), gmpy2.mpfr(1e-30))
        rel = dev / scale
        row_err = (res.error + abs(ratio) * base.error) / abs(base.value)
        rows.append((m, n, ratio, exact, rel, row_err, bool(rel < rel_tolerance)))
    return GramNumericReport(record.id, M, rows, rel_tolerance)


@dataclass
class TraceSkpReport:
    """Adjointness of inclusion and trace under the Petersson pairing."""

    lhs: object
    rhs: object
    lhs_error: object
    rhs_error: object
    tolerance: float

    @property
    def deviation(self):
        return abs(self.lhs - self.rhs)

    @property
    def ok(self) -> bool:
        scale = max(abs(self.lhs), abs(self.rhs), float(self.lhs_error) + float(self.rhs_error) + 1e-300)
        return float(self.deviation) <= self.tolerance * float(scale) + float(self.lhs_error) + float(self.rhs_error)


def verify_trace_skp(
    f: QSeries,
    g: QSeries,
    N: int,
    M: int,
    cfg: QuadratureConfig | None = None,
    rel_tolerance: float = 1e-3,
    g_translate: int = 1,
) -> TraceSkpReport:
    """Check <f, g|V_{g_translate}>_M = <f, tr_N^M (g|V_{g_translate})>_N.

    The left side is an ordinary level-M pairing.  On the right the
    trace is expanded pointwise inside the level-N integrand: at each
    node the coset average over Gamma_0(M) \\ Gamma_0(N) is taken with
    the same reduced evaluations used everywhere else.  Passing the
    translate as (g, g_translate) rather than a premultiplied expansion
    lets every evaluation reduce at g's own level.
    """
    cfg = cfg or QuadratureConfig(tolerance=min(1e-6, rel_tolerance * 1e-2))
    if M % N != 0:
        raise ValueError("N must divide M")
    if f.weight != g.weight or f.weight.denominator != 1:
        raise ValueError("equal integral weights required")
    if M % f.level != 0 or M % (g.level * g_translate) != 0:
        raise ValueError("form levels must divide M")
    if N % f.level != 0:
        raise ValueError("f must live at level N for the right side")
    k = int(f.weight)
    lhs_res = _pairing_many([(f, 1), (g, g_translate)], [(0, 1)], M, cfg)[(0, 1)]

    prec = cfg.precision
    with numeric.context(prec):
        if N % g.character.conductor() != 0:
            raise ValueError("the character of g must be definable mod N for the trace to exist")
        chi_N = induce_character(g.character, N)
        inner = coset_reps(N, M)
        outer = coset_reps(1, N)
        if outer.index > cfg.max_index:
            raise ValueError("index exceeds configured bound")
        scaleC = max(growth_constant(f), growth_constant(g), 1e-30)
        eps_node = float(gmpy2.mpfr(cfg.tolerance) * _pair_scale(scaleC**2, k, 1.0, M, prec)) * 1e-5
        ev_f = _BaseEvaluator(f, prec, eps_node, cfg.use_reduction)
        ev_g = _BaseEvaluator(g, prec, eps_node, cfg.use_reduction)

        Y = lhs_res.y_cutoff
        grid = _grid(cfg, Y, cfg.nodes, prec)
        total = gmpy2.mpc(0)
        cert = gmpy2.mpfr(0)
        twists = []
        for alpha in inner.reps:
            cv = chi_N.value(alpha.d)
            twists.append(cv.conjugate().to_mpc(prec) if isinstance(cv, RootOfUnity) else gmpy2.mpfr(cv))
        for x, y, wt in grid:
            z = gmpy2.mpc(x, y)
            yk = y ** (k - 2)
            for rep in outer.reps:
                jac = rep.c * z + rep.d
                w = (rep.a * z + rep.b) / jac
                pref = wt * yk * abs(jac) ** (-2 * k)
                vf, ef = ev_f.value_at(w)
                tr = gmpy2.mpc(0)
                etr = gmpy2.mpfr(0)
                for alpha, twist in zip(inner.reps, twists):
                    jac2 = alpha.c * w + alpha.d
                    p = (alpha.a * w + alpha.b) / jac2
                    vg, eg = ev_g.value_at(g_translate * p if g_translate > 1 else p)
                    sc = abs(jac2) ** (-k)
                    tr += twist * vg * jac2 ** (-k)
                    etr += eg * sc
                tr /= inner.index
                etr /= inner.index
                total += pref * vf * numeric.conjugate(tr)
                cert += pref * (abs(vf) * etr + abs(tr) * ef + ef * etr)
        tail = gmpy2.mpfr(0)
        for rep in outer.reps:
            tail += _pair_scale(scaleC**2, k, float(Y), _cusp_width(rep.c, N), prec)
        rhs = total / outer.index
        rhs_err = (cert + tail) / outer.index
    return TraceSkpReport(lhs_res.value, rhs, lhs_res.error, rhs_err, rel_tolerance)
