"""Batch cross-checks of dimension formulas and decompositions against exact ranks.

Each suite enumerates parameter cells and produces one or more CheckResults
per cell.  Sub-checks of a cell carry a dotted suffix on the suite name
(``LEMMA6_UVW.U``).  Results are deterministic given the seed: every cell
draws from its own generator seeded by (seed, suite, cell).
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Callable

from .exterior_poly import FormSpace, PolyForm
from .gmt import (
    GradeRange,
    HodgeTuple,
    NotClosed,
    NotCoclosed,
    c_formula,
    lift_hodge_tuple,
    mt_dim_formula,
    mt_space,
    phi,
    phi_apply,
    phi_split,
    poincare_primitive_d,
    poincare_primitive_dstar,
)
from .linalg import (
    DimensionCapExceeded,
    Subspace,
    contains,
    dimension_cap,
    image,
    intersect,
    kernel,
    sum_all,
)
from .operators import (
    block_d_matrix,
    compose,
    d,
    d_on,
    dstar,
    dstar_on,
    euler_contraction_on,
    laplacian_matrix,
    scalar_laplacian_matrix,
    star_on,
)
from .randomforms import random_element, random_form, seeded
from .spaces import (
    StratificationError,
    fisher_strata,
    form_space_dim,
    harmonic_kernel,
    hodge_dim_formula,
    hodge_space,
    kernel_intersection_identities,
    kernel_stratification,
    quotient_w_dim,
    scalar_harmonic_dim,
    strata_predicted_dims,
    uvw_decomposition,
    uvw_predicted_dims,
)

CSV_FIELDS = ["check_id", "m", "k", "s", "r", "p", "q", "j", "computed", "expected", "status"]
CELL_KEYS = ("m", "k", "s", "r", "p", "q", "j")
THREADS_ENV = "HODGEPOLY_THREADS"


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    cell: dict
    computed: int | bool | None
    expected: int | bool | None
    status: str

    def row(self) -> dict:
        out = {"check_id": self.check_id}
        for key in CELL_KEYS:
            out[key] = self.cell.get(key, "")
        out["computed"] = _fmt(self.computed)
        out["expected"] = _fmt(self.expected)
        out["status"] = self.status
        return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def check(check_id: str, cell: dict, computed, expected) -> CheckResult:
    return CheckResult(check_id, dict(cell), computed, expected, "pass" if computed == expected else "fail")


@dataclass
class Report:
    results: list[CheckResult]
    config: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "skip": 0}
        for r in self.results:
            counts[r.status] += 1
        counts["total"] = len(self.results)
        return counts

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in self.results:
            writer.writerow(r.row())
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "summary": self.summary,
            "results": [
                {
                    "check_id": r.check_id,
                    **{key: r.cell[key] for key in CELL_KEYS if key in r.cell},
                    "computed": r.computed,
                    "expected": r.expected,
                    "status": r.status,
                }
                for r in self.results
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# cell generators


def _single_grade_cells(m_range, k_range):
    return [
        {"m": m, "k": k, "s": s}
        for m in m_range
        for k in k_range
        for s in range(m + 1)
    ]


def grade_ranges(m: int) -> list[GradeRange]:
    return [
        GradeRange(r, p, q)
        for r in range(m + 1)
        for q in range((m - r) // 2 + 1)
        for p in range(q + 1)
    ]


def _range_cells(m_range, k_range):
    return [
        {"m": m, "k": k, "r": g.r, "p": g.p, "q": g.q}
        for m in m_range
        for k in k_range
        for g in grade_ranges(m)
    ]


def _multi_grade_cells(m_range, k_range):
    return [c for c in _range_cells(m_range, k_range) if c["q"] > c["p"]]


def _monogenic_cells(m_range, k_range):
    return [{"m": m, "k": k, "r": 0, "p": 0, "q": m // 2} for m in m_range for k in k_range]


def _rng_of(cell) -> GradeRange:
    return GradeRange(cell["r"], cell["p"], cell["q"])


# ---------------------------------------------------------------------------
# suite bodies


def _hodge_dim(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    return [check("HODGE_DIM", cell, hodge_space(m, k, s).dim, hodge_dim_formula(k, m, s))]


def _mt_dim(cell, ctx):
    m, k = cell["m"], cell["k"]
    rng = _rng_of(cell)
    return [check("MT_DIM", cell, mt_space(m, k, rng).dim, mt_dim_formula(k, m, rng))]


def _monogenic(cell, ctx):
    m, k = cell["m"], cell["k"]
    return [check("MONOGENIC_DIM", cell, mt_space(m, k, _rng_of(cell)).dim, c_formula(k, m))]


def _harmonic_split(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    dec = uvw_decomposition(m, k, s)
    predicted = uvw_predicted_dims(m, k, s)
    ker = harmonic_kernel(m, k, s)
    out = [check("LEMMA6_UVW", cell, ker.dim, sum(predicted))]
    for name, got, want in zip("HUVW", dec.dims, predicted):
        out.append(check(f"LEMMA6_UVW.{name}", cell, got, want))
    total = sum_all(ker.ambient, [dec.h, dec.u, dec.v, dec.w])
    out.append(check("LEMMA6_UVW.DIRECT", cell, total.dim, sum(dec.dims)))
    out.append(check("LEMMA6_UVW.SPAN", cell, total == ker, True))
    out.append(check("LEMMA6_UVW.SCALAR", cell, ker.dim, comb(m, s) * scalar_harmonic_dim(k, m)))
    out.append(check("LEMMA6_UVW.W_QUOTIENT", cell, quotient_w_dim(m, k, s), dec.w.dim))
    return out


def _kernel_intersections(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    ident = kernel_intersection_identities(m, k, s)
    return [
        check("THM7_SUBSPACES.CLOSED", cell, ident["closed"], True),
        check("THM7_SUBSPACES.COCLOSED", cell, ident["coclosed"], True),
        check("THM7_SUBSPACES.BOTH", cell, ident["both"], True),
    ]


def _kernel_strata(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    try:
        st = kernel_stratification(m, k, s)
    except StratificationError:
        return [check("LEMMA8_STRATA", cell, False, True)]
    out = [check("LEMMA8_STRATA", cell, True, True)]
    pieces_d = st.h.dim + sum(u.dim for u in st.us) + sum(x.dim for x in st.xs)
    pieces_ds = st.h.dim + sum(v.dim for v in st.vs) + sum(y.dim for y in st.ys)
    out.append(check("LEMMA8_STRATA.KER_D", cell, pieces_d, st.ker_d.dim))
    out.append(check("LEMMA8_STRATA.KER_DSTAR", cell, pieces_ds, st.ker_dstar.dim))
    for j, (x, y) in enumerate(zip(st.xs, st.ys)):
        jcell = {**cell, "j": j}
        want_x, want_y = strata_predicted_dims(m, k, s, j)
        out.append(check("LEMMA8_STRATA.X", jcell, x.dim, want_x))
        out.append(check("LEMMA8_STRATA.Y", jcell, y.dim, want_y))
    return out


def _fisher(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    strata = fisher_strata(m, k, s)
    total = form_space_dim(m, k, s)
    ambient = FormSpace(m, k, (s,))
    return [
        check("FISHER", cell, sum(st.dim for st in strata), total),
        check("FISHER.FULL_RANK", cell, sum_all(ambient, strata).dim, total),
    ]


def _split_phi(cell, ctx):
    m, k = cell["m"], cell["k"]
    rng = _rng_of(cell)
    op = phi(m, k, rng)
    mt = op.source_basis
    ker_dim = kernel(op).dim
    im = image(op)
    out = [
        check("THM2_SPLIT.KER", cell, ker_dim, sum(hodge_dim_formula(k, m, g) for g in rng.grades)),
        check("THM2_SPLIT.IM", cell, im.dim, sum(hodge_dim_formula(k - 1, m, g) for g in rng.odd_grades)),
        check("THM2_SPLIT.RANK_NULLITY", cell, ker_dim + im.dim, mt.dim),
    ]
    # Ker Phi inside the ambient equals the sum of the Hodge spaces of each grade
    bd = block_d_matrix(m, k, rng.r, rng.p, rng.q)
    ker_in_ambient = intersect(mt, kernel(bd))
    hodge_sum = Subspace.span(
        mt.ambient,
        [f.to_vector(mt.ambient) for g in rng.grades for f in hodge_space(m, k, g).forms()],
    )
    out.append(check("THM2_SPLIT.KER_SPACE", cell, ker_in_ambient == hodge_sum, True))
    gen = seeded(ctx["seed"], "THM2_SPLIT", *cell.values())
    good = 0
    for _ in range(ctx["samples"]):
        f = random_element(gen, mt)
        kernel_part, image_part = phi_split(f, rng)
        total = lift_hodge_tuple(image_part)
        for comp in kernel_part:
            total = total + comp
        ok = total == f and all(
            d(c).is_zero() and dstar(c).is_zero() for c in kernel_part
        )
        good += ok
    out.append(check("THM2_SPLIT.REASSEMBLE", cell, good, ctx["samples"]))
    return out


def _random_hodge_tuple(gen, m, k, rng: GradeRange) -> HodgeTuple:
    comps = tuple(random_element(gen, hodge_space(m, k - 1, g)) if k >= 1 else PolyForm.zero(m, k - 1)
                  for g in rng.odd_grades)
    return HodgeTuple(m, k, rng, comps)


def _lift(cell, ctx):
    m, k = cell["m"], cell["k"]
    rng = _rng_of(cell)
    mt = mt_space(m, k, rng)
    gen = seeded(ctx["seed"], "LIFT_ROUNDTRIP", *cell.values())
    good = 0
    for _ in range(ctx["samples"]):
        t = _random_hodge_tuple(gen, m, k, rng)
        lifted = lift_hodge_tuple(t)
        good += contains(mt, lifted) and phi_apply(lifted, m, k, rng) == t
    return [check("LIFT_ROUNDTRIP", cell, good, ctx["samples"])]


def _closed_counterexample(gen, space: FormSpace, op_on) -> PolyForm | None:
    """A random single term whose image under the operator is nonzero."""
    op = op_on(space)
    candidates = [j for j, col in enumerate(op.columns) if col]
    if not candidates:
        return None
    j = gen.choice(candidates)
    c = 0
    while not c:
        c = gen.randint(-9, 9)
    return PolyForm.from_vector(space, {j: c})


def _poincare(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    n = ctx["samples"]
    gen = seeded(ctx["seed"], "POINCARE", *cell.values())
    space = FormSpace(m, k, (s,))
    out = []
    if s > 0:
        below = FormSpace(m, k + 1, (s - 1,))
        good = raised = tried = 0
        for _ in range(n):
            f = d(random_form(gen, below)).with_grades((s,))
            q = poincare_primitive_d(f)
            good += d(q) == f and dstar(q).is_zero()
            e = _closed_counterexample(gen, space, d_on)
            if e is not None:
                tried += 1
                try:
                    poincare_primitive_d(f + e)
                except NotClosed:
                    raised += 1
        out.append(check("POINCARE.D", cell, good, n))
        if tried:
            out.append(check("POINCARE.NOT_CLOSED", cell, raised, tried))
    if s < m:
        above = FormSpace(m, k + 1, (s + 1,))
        good = raised = tried = 0
        for _ in range(n):
            f = dstar(random_form(gen, above)).with_grades((s,))
            q = poincare_primitive_dstar(f)
            good += dstar(q) == f and d(q).is_zero()
            e = _closed_counterexample(gen, space, dstar_on)
            if e is not None:
                tried += 1
                try:
                    poincare_primitive_dstar(f + e)
                except NotCoclosed:
                    raised += 1
        out.append(check("POINCARE.DSTAR", cell, good, n))
        if tried:
            out.append(check("POINCARE.NOT_COCLOSED", cell, raised, tried))
    return out


def _is_zero_map(op) -> bool:
    return op.is_zero()


def _sum_columns(a, b) -> list[dict]:
    out = []
    for ca, cb in zip(a.columns, b.columns):
        col = dict(ca)
        for i, x in cb.items():
            col[i] = col.get(i, 0) + x
        out.append({i: x for i, x in col.items() if x})
    return out


def _identities(cell, ctx):
    m, k, s = cell["m"], cell["k"], cell["s"]
    src = FormSpace(m, k, (s,))
    dd = compose(d_on(d_on(src).target), d_on(src))
    dsds = compose(dstar_on(dstar_on(src).target), dstar_on(src))
    # Cartan: d i_E + i_E d = (k + s) id
    ie = euler_contraction_on(src)
    left = compose(d_on(ie.target), ie)
    dk = d_on(src)
    right = compose(euler_contraction_on(dk.target), dk)
    cartan = all(
        col == ({j: k + s} if k + s else {})
        for j, col in enumerate(_sum_columns(left, right))
    )
    lap = laplacian_matrix(m, k, s)
    scalar = scalar_laplacian_matrix(m, k, s)
    same_lap = all(
        {i: x for i, x in a.items() if x} == {i: x for i, x in b.items() if x}
        for a, b in zip(lap.columns, scalar.columns)
    )
    h, h_dual = hodge_space(m, k, s), hodge_space(m, k, m - s)
    star = star_on(src)
    starred = Subspace.span(h_dual.ambient, [star.matvec(v) for v in h.vectors()])
    return [
        check("OPERATOR_IDENTITIES.D2", cell, _is_zero_map(dd), True),
        check("OPERATOR_IDENTITIES.DSTAR2", cell, _is_zero_map(dsds), True),
        check("OPERATOR_IDENTITIES.CARTAN", cell, cartan, True),
        check("OPERATOR_IDENTITIES.LAPLACIAN", cell, same_lap, True),
        check("OPERATOR_IDENTITIES.STAR_DIM", cell, h_dual.dim, h.dim),
        check("OPERATOR_IDENTITIES.STAR_FORMULA", cell, hodge_dim_formula(k, m, m - s), hodge_dim_formula(k, m, s)),
        check("OPERATOR_IDENTITIES.STAR_MAP", cell, starred == h_dual, True),
    ]


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Suite:
    name: str
    alias: str
    description: str
    m_range: tuple[int, int]
    k_max: int
    cells: Callable[[range, range], list[dict]]
    run: Callable[[dict, dict], list[CheckResult]]
    randomized: bool = False

    def describe(self) -> dict:
        return {
            "name": self.name,
            "alias": self.alias,
            "description": self.description,
            "m": list(self.m_range),
            "k_max": self.k_max,
            "randomized": self.randomized,
        }


_SUITES = [
    Suite("HODGE_DIM", "hodge", "rank of [d; d*] kernel vs closed-form dim H^s_k",
          (2, 6), 4, _single_grade_cells, _hodge_dim),
    Suite("MT_DIM", "mt", "dim of (d + d*) kernel on P^(r,p,q)_k vs the graded sum formula",
          (2, 5), 4, _range_cells, _mt_dim),
    Suite("MONOGENIC_DIM", "monogenic", "dim MT^(0,0,m//2)_k vs 2^(m-1) C(k+m-2, m-2)",
          (2, 5), 4, _monogenic_cells, _monogenic),
    Suite("LEMMA6_UVW", "uvw", "Ker Δ = H ⊕ U ⊕ V ⊕ W dimensions and directness",
          (2, 5), 4, _single_grade_cells, _harmonic_split),
    Suite("THM7_SUBSPACES", "subspaces", "exact equalities of kernel intersections with H ⊕ U, H ⊕ V, H ⊕ U ⊕ V",
          (2, 4), 3, _single_grade_cells, _kernel_intersections),
    Suite("LEMMA8_STRATA", "strata", "closed/coclosed split of r^2j Z strata and reassembly of Ker d, Ker d*",
          (2, 4), 4, _single_grade_cells, _kernel_strata),
    Suite("FISHER", "fisher", "r^2j Ker Δ strata fill P^s_k",
          (2, 5), 4, _single_grade_cells, _fisher),
    Suite("THM2_SPLIT", "split", "Ker/Im of Phi and exact split-then-reassemble of random MT elements",
          (2, 5), 3, _range_cells, _split_phi, True),
    Suite("LIFT_ROUNDTRIP", "lift", "Phi(lift(t)) = t for random Hodge tuples",
          (2, 5), 3, _multi_grade_cells, _lift, True),
    Suite("POINCARE", "poincare", "d- and d*-primitives of random closed/coclosed forms; perturbed inputs rejected",
          (2, 4), 3, _single_grade_cells, _poincare, True),
    Suite("OPERATOR_IDENTITIES", "identities", "d^2 = 0, (d*)^2 = 0, Cartan identity, Δ componentwise, star duality",
          (2, 5), 4, _single_grade_cells, _identities),
]
SUITES = {s.name: s for s in _SUITES}


def suites() -> list[dict]:
    return [s.describe() for s in _SUITES]


def resolve_suite(name: str) -> list[Suite]:
    key = name.strip()
    if key.lower() == "all":
        return list(_SUITES)
    for s in _SUITES:
        if key.upper() == s.name or key.lower() == s.alias:
            return [s]
    raise KeyError(f"unknown suite {name!r}; choose from all, " + ", ".join(s.alias for s in _SUITES))


def _run_cell(args):
    suite_name, cell, ctx = args
    suite = SUITES[suite_name]
    try:
        return suite.run(cell, ctx)
    except DimensionCapExceeded:
        return [CheckResult(suite_name, dict(cell), None, None, "skip")]


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def run_suite(
    suite: str,
    m_max: int | None = None,
    k_max: int | None = None,
    m_min: int | None = None,
    seed: int = 0,
    samples: int = 100,
    threads: int | None = None,
) -> Report:
    """Run one suite (or ``"all"``) and collect a canonical-order report."""
    chosen = resolve_suite(suite)
    tasks = []
    for s in chosen:
        lo = s.m_range[0] if m_min is None else m_min
        hi = s.m_range[1] if m_max is None else m_max
        km = s.k_max if k_max is None else k_max
        ctx = {"seed": seed, "samples": samples}
        for cell in s.cells(range(lo, hi + 1), range(0, km + 1)):
            tasks.append((s.name, cell, ctx))
    threads = default_threads() if threads is None else threads
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_cell, tasks, chunksize=4))
    else:
        chunks = [_run_cell(t) for t in tasks]
    results = [r for chunk in chunks for r in chunk]
    config = {
        "suite": suite,
        "suites": [s.name for s in chosen],
        "m_min": m_min,
        "m_max": m_max,
        "k_max": k_max,
        "seed": seed,
        "samples": samples,
        "dimension_cap": dimension_cap(),
    }
    return Report(results, config)
