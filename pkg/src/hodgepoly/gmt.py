"""Polynomial solutions of (d + d*) ω = 0 on forms of grades r+2p, r+2p+2, ..., r+2q.

The central construction is the lift: given closed and coclosed forms
P^{r+2j+1}_{k-1} (j = p..q-1), build a solution P_k whose differential
returns them.  Each component is the sum of a d-primitive of the grade above
and a d*-primitive of minus the grade below; primitives are the
Fischer-minimal-norm solutions of the stacked system [d; d*] Q = (f, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

from .exterior_poly import FormSpace, InvalidDescriptor, PolyForm, check_range
from .linalg import Subspace, contains, kernel, solve
from .operators import (
    apply,
    block_d_matrix,
    d,
    dirac_block_matrix,
    dstar,
    phi_matrix,
)
from .spaces import hodge_dim_formula, hodge_space


class PreconditionError(ValueError):
    """An input violates a membership precondition of a construction."""


class NotClosed(PreconditionError):
    pass


class NotCoclosed(PreconditionError):
    pass


class NotInMT(PreconditionError):
    pass


class ComponentNotHodge(PreconditionError):
    pass


@dataclass(frozen=True)
class GradeRange:
    r: int
    p: int
    q: int

    def check(self, m: int) -> "GradeRange":
        check_range(m, self.r, self.p, self.q)
        return self

    @property
    def grades(self) -> tuple[int, ...]:
        return tuple(self.r + 2 * j for j in range(self.p, self.q + 1))

    @property
    def odd_grades(self) -> tuple[int, ...]:
        """Grades r+2j+1 for j = p..q-1, where the image of Phi lives."""
        return tuple(self.r + 2 * j + 1 for j in range(self.p, self.q))

    def to_json(self) -> dict:
        return {"r": self.r, "p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, data: Mapping) -> "GradeRange":
        return cls(int(data["r"]), int(data["p"]), int(data["q"]))


def _as_range(rng) -> GradeRange:
    return rng if isinstance(rng, GradeRange) else GradeRange(*rng)


@dataclass(frozen=True)
class HodgeTuple:
    """Forms in H^{r+2j+1}_{k-1}, j = p..q-1, for an MT space of homogeneity k."""

    m: int
    k: int
    range: GradeRange
    components: tuple[PolyForm, ...]

    def __post_init__(self):
        rng = _as_range(self.range).check(self.m)
        object.__setattr__(self, "range", rng)
        grades = rng.odd_grades
        comps = tuple(self.components)
        if len(comps) != len(grades):
            raise InvalidDescriptor(f"expected {len(grades)} components, got {len(comps)}")
        fixed = []
        for g, c in zip(grades, comps):
            if c.m != self.m or (not c.is_zero() and c.k != self.k - 1):
                raise InvalidDescriptor(f"component of grade {g} has wrong dimension or homogeneity")
            fixed.append(PolyForm(self.m, self.k - 1, c.terms, (g,)))
        object.__setattr__(self, "components", tuple(fixed))

    @classmethod
    def zero(cls, m: int, k: int, rng) -> "HodgeTuple":
        rng = _as_range(rng)
        return cls(m, k, rng, tuple(PolyForm.zero(m, k - 1) for _ in rng.odd_grades))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "range": self.range.to_json(),
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "HodgeTuple":
        rng = GradeRange.from_json(data["range"])
        comps = tuple(PolyForm.from_json(c) for c in data["components"])
        return cls(int(data["m"]), int(data["k"]), rng, comps)


# ---------------------------------------------------------------------------
# dimension formulas


def mt_dim_formula(k: int, m: int, rng) -> int:
    rng = _as_range(rng).check(m)
    r, p, q = rng.r, rng.p, rng.q
    return sum(hodge_dim_formula(k, m, r + 2 * j) for j in range(p, q + 1)) + sum(
        hodge_dim_formula(k - 1, m, r + 2 * j + 1) for j in range(p, q)
    )


def c_formula(k: int, m: int) -> int:
    """Dimension of the even-valued monogenic polynomials of degree k in R^m."""
    if k < 0 or m < 2:
        raise InvalidDescriptor(f"c(k, m) needs k >= 0 and m >= 2, got k={k}, m={m}")
    return 2 ** (m - 1) * comb(k + m - 2, m - 2)


# ---------------------------------------------------------------------------
# spaces


def mt_ambient(m: int, k: int, rng) -> FormSpace:
    rng = _as_range(rng)
    return FormSpace.graded(m, k, rng.r, rng.p, rng.q)


@lru_cache(maxsize=None)
def _mt_space(m: int, k: int, rng: GradeRange) -> Subspace:
    op = dirac_block_matrix(m, k, rng.r, rng.p, rng.q)
    return Subspace(mt_ambient(m, k, rng), kernel(op).basis)


def mt_space(m: int, k: int, rng) -> Subspace:
    """Polynomial solutions of (d + d*) P = 0 in P^{(r,p,q)}_k."""
    rng = _as_range(rng).check(m)
    if k < 0:
        raise InvalidDescriptor(f"negative homogeneity {k}")
    return _mt_space(m, k, rng)


def phi(m: int, k: int, rng):
    rng = _as_range(rng).check(m)
    return phi_matrix(m, k, rng.r, rng.p, rng.q, mt_space(m, k, rng))


# ---------------------------------------------------------------------------
# primitives


def _solve_stacked(op, f: PolyForm) -> PolyForm:
    x = solve(op, f.to_vector(op.target))
    if x is None:
        raise RuntimeError(f"primitive system unexpectedly inconsistent for {f!r}")
    return PolyForm.from_vector(op.source, x)


def poincare_primitive_d(f: PolyForm) -> PolyForm:
    """Q of grade s-1 and homogeneity k+1 with dQ = f and d*Q = 0."""
    s = f.grade
    if s == 0:
        raise InvalidDescriptor("a d-primitive needs grade s > 0")
    if not d(f).is_zero():
        raise NotClosed(f"d f != 0 for f = {f}")
    op = dirac_block_matrix(f.m, f.k + 1, s - 1, 0, 0)
    return _solve_stacked(op, f)


def poincare_primitive_dstar(f: PolyForm) -> PolyForm:
    """Q of grade s+1 and homogeneity k+1 with d*Q = f and dQ = 0."""
    s = f.grade
    if s >= f.m:
        raise InvalidDescriptor(f"a d*-primitive needs grade s < m, got s={s}")
    if not dstar(f).is_zero():
        raise NotCoclosed(f"d* f != 0 for f = {f}")
    op = dirac_block_matrix(f.m, f.k + 1, s + 1, 0, 0)
    return _solve_stacked(op, f)


# ---------------------------------------------------------------------------
# lift and split


def lift_hodge_tuple(t: HodgeTuple) -> PolyForm:
    """A solution P in MT^{(r,p,q)}_k with Phi(P) = t."""
    m, k, rng = t.m, t.k, t.range
    for g, comp in zip(rng.odd_grades, t.components):
        if not d(comp).is_zero() or not dstar(comp).is_zero():
            raise ComponentNotHodge(f"component of grade {g} is not closed and coclosed")
    out = PolyForm.zero(m, k, rng.grades)
    comps = dict(zip(rng.odd_grades, t.components))
    for g in rng.grades:
        above, below = comps.get(g + 1), comps.get(g - 1)
        if above is not None and not above.is_zero():
            out = out + poincare_primitive_d(above)
        if below is not None and not below.is_zero():
            out = out + poincare_primitive_dstar(-below)
    return out.with_grades(rng.grades)


def phi_apply(f: PolyForm, m: int, k: int, rng) -> HodgeTuple:
    rng = _as_range(rng)
    bd = block_d_matrix(m, k, rng.r, rng.p, rng.q)
    image = apply(bd, f)
    return HodgeTuple(m, k, rng, tuple(image.component(g) for g in rng.odd_grades))


def phi_split(f: PolyForm, rng) -> tuple[list[PolyForm], HodgeTuple]:
    """Split f in MT into closed-and-coclosed components plus the lift of Phi(f).

    Returns ``(kernel_part, image_part)`` with
    ``f == sum(kernel_part) + lift_hodge_tuple(image_part)``.
    """
    rng = _as_range(rng).check(f.m)
    m, k = f.m, f.k
    ambient = mt_ambient(m, k, rng)
    try:
        vec = f.to_vector(ambient)
    except InvalidDescriptor as exc:
        raise NotInMT(str(exc)) from None
    if not contains(mt_space(m, k, rng), vec):
        raise NotInMT(f"(d + d*) f != 0 for f = {f}")
    image_part = phi_apply(f, m, k, rng)
    rest = f - lift_hodge_tuple(image_part)
    return [rest.component(g) for g in rng.grades], image_part


def reassemble(kernel_part: Sequence[PolyForm], image_part: HodgeTuple) -> PolyForm:
    lifted = lift_hodge_tuple(image_part)
    total = lifted
    for comp in kernel_part:
        total = total + comp
    return total.with_grades(image_part.range.grades)


def in_hodge(f: PolyForm, s: int) -> bool:
    return contains(hodge_space(f.m, f.k, s), f)
