"""d, d*, the Hodge Laplacian, the block Dirac operator and Phi as exact matrices.

Sign convention: ``d* = sum_i d/dx_i  i_{e_i}`` with no leading minus, so
``dd* + d*d`` is the scalar Laplacian on every blade component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Mapping

from .exterior_poly import (
    Blade,
    Exps,
    FormSpace,
    InvalidDescriptor,
    PolyForm,
    check_range,
    complement_sign,
    contract_step,
    wedge_step,
)
from .linalg import Coordinates, Subspace, check_cap

Column = dict[int, Fraction]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Sparse exact matrix between two enumerated spaces, stored by columns."""

    source: FormSpace | Coordinates
    target: FormSpace | Coordinates
    columns: tuple[Column, ...]
    name: str = ""
    source_basis: Subspace | None = field(default=None, repr=False)

    @property
    def ncols(self) -> int:
        return len(self.columns)

    @property
    def nrows(self) -> int:
        return self.target.dim

    @cached_property
    def rows(self) -> list[Column]:
        rows: list[Column] = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                rows[i][j] = x
        return rows

    def is_zero(self) -> bool:
        return not any(self.columns)

    def matvec(self, vec: Mapping[int, object]) -> Column:
        out: Column = {}
        for j, t in vec.items():
            if not t:
                continue
            for i, x in self.columns[j].items():
                y = out.get(i, 0) + t * x
                if y:
                    out[i] = y
                else:
                    out.pop(i, None)
        return out

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return compose(self, other)

    def triplets(self) -> list[tuple[int, int, Fraction]]:
        return sorted(
            (i, j, x) for j, col in enumerate(self.columns) for i, x in col.items()
        )

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "triplets": [[i, j, str(x)] for i, j, x in self.triplets()],
        }


Action = Callable[[Exps, Blade], Iterator[tuple[Exps, Blade, int]]]


def _build(source: FormSpace, target: FormSpace, action: Action, name: str) -> OperatorMatrix:
    check_cap(source.dim, target.dim)
    index = target.index
    cols = []
    for exps, blade in source.basis:
        col: Column = {}
        for e2, b2, c in action(exps, blade):
            i = index.get((e2, b2))
            if i is None:
                continue
            y = col.get(i, 0) + c
            if y:
                col[i] = y
            else:
                col.pop(i, None)
        cols.append({i: Fraction(x) for i, x in col.items()})
    return OperatorMatrix(source, target, tuple(cols), name)


def _lower(exps: Exps, i: int) -> Exps:
    return exps[: i - 1] + (exps[i - 1] - 1,) + exps[i:]


def _raise(exps: Exps, i: int, by: int = 1) -> Exps:
    return exps[: i - 1] + (exps[i - 1] + by,) + exps[i:]


def _d_action(exps: Exps, blade: Blade):
    for i in range(1, len(exps) + 1):
        a = exps[i - 1]
        if a:
            hit = wedge_step(i, blade)
            if hit:
                yield _lower(exps, i), hit[1], hit[0] * a


def _dstar_action(exps: Exps, blade: Blade):
    for i in blade:
        a = exps[i - 1]
        if a:
            sign, rest = contract_step(i, blade)
            yield _lower(exps, i), rest, sign * a


def _dirac_action(exps: Exps, blade: Blade):
    yield from _d_action(exps, blade)
    yield from _dstar_action(exps, blade)


def _euler_action(exps: Exps, blade: Blade):
    for i in blade:
        sign, rest = contract_step(i, blade)
        yield _raise(exps, i), rest, sign


def _r2_action(exps: Exps, blade: Blade):
    for i in range(1, len(exps) + 1):
        yield _raise(exps, i, 2), blade, 1


def _validate(m: int, k: int, s: int) -> None:
    if m < 1 or not 0 <= s <= m or k < 0:
        raise InvalidDescriptor(f"invalid descriptor m={m}, k={k}, s={s}")


def _shift(space: FormSpace, dk: int, ds: int) -> FormSpace:
    return FormSpace(space.m, space.k + dk, tuple(g + ds for g in space.grades))


# ---------------------------------------------------------------------------
# operators on arbitrary (multi-grade) spaces


@lru_cache(maxsize=None)
def d_on(space: FormSpace) -> OperatorMatrix:
    return _build(space, _shift(space, -1, 1), _d_action, "d")


@lru_cache(maxsize=None)
def dstar_on(space: FormSpace) -> OperatorMatrix:
    return _build(space, _shift(space, -1, -1), _dstar_action, "d*")


@lru_cache(maxsize=None)
def euler_contraction_on(space: FormSpace) -> OperatorMatrix:
    """i_E with E the Euler field: x^a dx_I -> sum_{i in I} x_i x^a i_{e_i} dx_I."""
    return _build(space, _shift(space, 1, -1), _euler_action, "i_E")


@lru_cache(maxsize=None)
def r2_on(space: FormSpace) -> OperatorMatrix:
    return _build(space, _shift(space, 2, 0), _r2_action, "r^2")


@lru_cache(maxsize=None)
def star_on(space: FormSpace) -> OperatorMatrix:
    m = space.m

    def action(exps, blade):
        comp = tuple(j for j in range(1, m + 1) if j not in blade)
        yield exps, comp, complement_sign(blade, m)

    target = FormSpace(m, space.k, tuple(m - g for g in space.grades))
    return _build(space, target, action, "*")


def compose(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """a ∘ b."""
    if a.source.dim != b.target.dim:
        raise InvalidDescriptor("compose: inner dimensions differ")
    if isinstance(a.source, FormSpace) and isinstance(b.target, FormSpace) and a.source != b.target:
        if a.source.dim:
            raise InvalidDescriptor(f"compose: {a.source} != {b.target}")
    cols = tuple(a.matvec(col) for col in b.columns)
    return OperatorMatrix(b.source, a.target, cols, f"{a.name}{b.name}", b.source_basis)


def add(a: OperatorMatrix, b: OperatorMatrix, target=None) -> OperatorMatrix:
    """a + b; with ``target`` given, a zero-dimensional summand target is allowed."""
    if a.ncols != b.ncols:
        raise InvalidDescriptor("add: column counts differ")
    if target is None and a.nrows != b.nrows:
        raise InvalidDescriptor("add: row counts differ")
    if target is not None and any(op.nrows not in (0, target.dim) for op in (a, b)):
        raise InvalidDescriptor("add: summand does not map into the target")
    cols = []
    for ca, cb in zip(a.columns, b.columns):
        col = dict(ca)
        for i, x in cb.items():
            y = col.get(i, 0) + x
            if y:
                col[i] = y
            else:
                col.pop(i, None)
        cols.append(col)
    return OperatorMatrix(a.source, target or a.target, tuple(cols), f"{a.name}+{b.name}")


# ---------------------------------------------------------------------------
# public constructors


def d_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    """d : P^s_k -> P^{s+1}_{k-1}."""
    _validate(m, k, s)
    return d_on(FormSpace.single(m, k, s))


def dstar_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    """d* : P^s_k -> P^{s-1}_{k-1}."""
    _validate(m, k, s)
    return dstar_on(FormSpace.single(m, k, s))


@lru_cache(maxsize=None)
def laplacian_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    """dd* + d*d : P^s_k -> P^s_{k-2}."""
    _validate(m, k, s)
    src = FormSpace.single(m, k, s)
    down = d_on(dstar_on(src).target) @ dstar_on(src)
    up = dstar_on(d_on(src).target) @ d_on(src)
    return add(down, up, FormSpace.single(m, k - 2, s))


@lru_cache(maxsize=None)
def ddstar_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    _validate(m, k, s)
    src = FormSpace.single(m, k, s)
    inner = dstar_on(src)
    return OperatorMatrix(src, FormSpace(m, k - 2, (s,)), compose(d_on(inner.target), inner).columns, "dd*")


@lru_cache(maxsize=None)
def dstard_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    _validate(m, k, s)
    src = FormSpace.single(m, k, s)
    inner = d_on(src)
    return OperatorMatrix(src, FormSpace(m, k - 2, (s,)), compose(dstar_on(inner.target), inner).columns, "d*d")


def scalar_laplacian_matrix(m: int, k: int, s: int) -> OperatorMatrix:
    """sum_i d^2/dx_i^2 applied to each coefficient; independent of d and d*."""
    _validate(m, k, s)

    def action(exps, blade):
        for i in range(1, m + 1):
            a = exps[i - 1]
            if a >= 2:
                yield _lower(_lower(exps, i), i), blade, a * (a - 1)

    return _build(FormSpace.single(m, k, s), FormSpace(m, k - 2, (s,)), action, "lap")


@lru_cache(maxsize=None)
def dirac_block_matrix(m: int, k: int, r: int, p: int, q: int) -> OperatorMatrix:
    """(d + d*) on P^{(r,p,q)}_k, rows grouped by target grade r+2p-1, ..., r+2q+1."""
    check_range(m, r, p, q)
    if k < 0:
        raise InvalidDescriptor(f"negative homogeneity {k}")
    src = FormSpace.graded(m, k, r, p, q)
    target = FormSpace(m, k - 1, tuple(r + 2 * j - 1 for j in range(p, q + 2)))
    return _build(src, target, _dirac_action, "d+d*")


@lru_cache(maxsize=None)
def block_d_matrix(m: int, k: int, r: int, p: int, q: int) -> OperatorMatrix:
    """d on the components r+2p .. r+2q-2, landing in ⊕_{j=p}^{q-1} P^{r+2j+1}_{k-1}."""
    check_range(m, r, p, q)
    src = FormSpace.graded(m, k, r, p, q)
    target = FormSpace(m, k - 1, tuple(r + 2 * j + 1 for j in range(p, q)))
    top = r + 2 * q

    def action(exps, blade):
        if len(blade) < top:
            yield from _d_action(exps, blade)

    return _build(src, target, action, "Phi")


def phi_matrix(m: int, k: int, r: int, p: int, q: int, mt: Subspace) -> OperatorMatrix:
    """Phi = d restricted to MT^{(r,p,q)}_k, with columns indexed by the basis of ``mt``."""
    dirac = dirac_block_matrix(m, k, r, p, q)
    if mt.ambient != dirac.source:
        raise InvalidDescriptor("mt does not live in P^{(r,p,q)}_k")
    vecs = mt.vectors()
    if any(dirac.matvec(v) for v in vecs):
        raise InvalidDescriptor("mt is not contained in Ker(d+d*)")
    bd = block_d_matrix(m, k, r, p, q)
    cols = tuple(bd.matvec(v) for v in vecs)
    return OperatorMatrix(Coordinates(mt.dim), bd.target, cols, "Phi", mt)


def apply(op: OperatorMatrix, f: PolyForm) -> PolyForm:
    if not isinstance(op.source, FormSpace) or not isinstance(op.target, FormSpace):
        raise InvalidDescriptor("apply needs an operator between form spaces")
    vec = f.to_vector(op.source)
    return PolyForm.from_vector(op.target, op.matvec(vec))


def _single_grade(f: PolyForm, k: int | None = None) -> FormSpace:
    return FormSpace.single(f.m, f.k if k is None else k, f.grade)


def d(f: PolyForm) -> PolyForm:
    """Exterior derivative of a form of any grades."""
    return apply(d_on(FormSpace(f.m, f.k, f.grades)), f)


def dstar(f: PolyForm) -> PolyForm:
    return apply(dstar_on(FormSpace(f.m, f.k, f.grades)), f)


def laplacian(f: PolyForm) -> PolyForm:
    """Hodge Laplacian, grade by grade."""
    out = None
    for s in f.grades:
        part = apply(laplacian_matrix(f.m, f.k, s), f.component(s))
        out = part if out is None else out + part
    return PolyForm.zero(f.m, f.k - 2) if out is None else out


def euler_contraction(f: PolyForm) -> PolyForm:
    return apply(euler_contraction_on(FormSpace(f.m, f.k, f.grades)), f)
