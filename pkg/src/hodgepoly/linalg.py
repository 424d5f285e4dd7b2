"""Exact sparse linear algebra over the rationals.

Rows are eliminated fraction-free: every working row is a primitive integer
vector (content divided out after each combination), so no intermediate
rationals are formed.  Only the final canonical bases are brought back to
rationals with leading entries equal to 1.

Because the operators of this package never couple coordinates from
different blocks of a block-diagonal layout, sparse elimination stays inside
each block and never produces fill across blocks.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .exterior_poly import FormSpace, InvalidDescriptor, PolyForm

Vec = dict[int, Fraction]

DEFAULT_DIM_CAP = 20000
CAP_ENV = "HODGEPOLY_DIM_CAP"
_cap_override: int | None = None


class DimensionCapExceeded(RuntimeError):
    pass


def dimension_cap() -> int:
    if _cap_override is not None:
        return _cap_override
    env = os.environ.get(CAP_ENV)
    return int(env) if env else DEFAULT_DIM_CAP


def set_dimension_cap(cap: int | None) -> None:
    """Override the ambient-dimension cap; ``None`` restores env/default."""
    global _cap_override
    _cap_override = cap


def check_cap(*dims: int) -> None:
    cap = dimension_cap()
    for n in dims:
        if n > cap:
            raise DimensionCapExceeded(f"dimension {n} exceeds cap {cap} (set {CAP_ENV})")


@dataclass(frozen=True)
class Coordinates:
    """A bare coordinate space R^n with the standard inner product."""

    n: int

    @property
    def dim(self) -> int:
        return self.n

    @property
    def weights(self) -> tuple[int, ...]:
        return (1,) * self.n

    def to_json(self) -> dict:
        return {"coordinates": self.n}


# ---------------------------------------------------------------------------
# fraction-free echelon core


def _integer_row(vec: Mapping[int, object]) -> dict[int, int]:
    entries = {c: Fraction(v) for c, v in vec.items() if v != 0}
    if not entries:
        return {}
    den = lcm(*(v.denominator for v in entries.values()))
    row = {c: int(v * den) for c, v in entries.items()}
    return _primitive(row)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = gcd(*row.values())
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _eliminate(v: dict[int, int], w: dict[int, int], col: int) -> dict[int, int]:
    """Remove ``col`` from v using w; the sign of v's other entries is kept."""
    a, b = w[col], v[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    if a < 0:
        a, b = -a, -b
    out = {c: a * x for c, x in v.items()} if a != 1 else dict(v)
    for c, y in w.items():
        z = out.get(c, 0) - b * y
        if z:
            out[c] = z
        else:
            out.pop(c, None)
    return _primitive(out) if out else out


class _Echelon:
    """Incremental Gauss-Jordan elimination on sparse integer rows.

    Each stored row has a positive entry at its pivot, and every pivot column
    occurs in exactly one row.  With ``reverse=False`` the pivot is the
    smallest column of the row, which yields the reduced row echelon form.
    """

    def __init__(self, reverse: bool = False):
        self.rows: dict[int, dict[int, int]] = {}
        self.where: defaultdict[int, set[int]] = defaultdict(set)
        self.reverse = reverse

    def reduce(self, v: dict[int, int]) -> dict[int, int]:
        for c in [c for c in v if c in self.rows]:
            if c in v:
                v = _eliminate(v, self.rows[c], c)
        return v

    def add(self, v: dict[int, int]) -> int | None:
        v = self.reduce(v)
        if not v:
            return None
        p = max(v) if self.reverse else min(v)
        if v[p] < 0:
            v = {c: -x for c, x in v.items()}
        for q in list(self.where.get(p, ())):
            old = self.rows[q]
            new = _eliminate(old, v, p)
            for c in old:
                if c not in new:
                    self.where[c].discard(q)
            for c in new:
                self.where[c].add(q)
            self.rows[q] = new
        self.rows[p] = v
        for c in v:
            self.where[c].add(p)
        return p

    def rank(self) -> int:
        return len(self.rows)


def _canonical(rows: Iterable[dict[int, int]]) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    out = []
    for row in rows:
        p = min(row)
        lead = row[p]
        out.append(tuple((c, Fraction(row[c], lead)) for c in sorted(row)))
    out.sort(key=lambda vec: vec[0][0])
    return tuple(out)


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace in canonical reduced echelon form.

    ``basis`` holds sparse vectors ``((index, value), ...)``; each starts with
    value 1 at its pivot and no other basis vector touches that pivot.  Two
    subspaces are equal exactly when their ambients and bases are equal.
    """

    ambient: FormSpace | Coordinates
    basis: tuple[tuple[tuple[int, Fraction], ...], ...]

    @classmethod
    def span(cls, ambient, vectors: Iterable[Mapping[int, object]]) -> "Subspace":
        check_cap(ambient.dim)
        ech = _Echelon()
        for v in vectors:
            row = _integer_row(v)
            if row:
                if max(row) >= ambient.dim or min(row) < 0:
                    raise InvalidDescriptor("vector index outside the ambient space")
                ech.add(row)
        return cls(ambient, _canonical(ech.rows.values()))

    @classmethod
    def zero(cls, ambient) -> "Subspace":
        return cls(ambient, ())

    @classmethod
    def full(cls, ambient) -> "Subspace":
        return cls(ambient, tuple(((i, Fraction(1)),) for i in range(ambient.dim)))

    @classmethod
    def from_forms(cls, ambient: FormSpace, forms: Iterable[PolyForm]) -> "Subspace":
        return cls.span(ambient, [f.to_vector(ambient) for f in forms])

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(vec[0][0] for vec in self.basis)

    def vectors(self) -> list[Vec]:
        return [dict(vec) for vec in self.basis]

    def forms(self) -> list[PolyForm]:
        return [PolyForm.from_vector(self.ambient, dict(vec)) for vec in self.basis]

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def to_json(self) -> dict:
        n = self.ambient.dim
        dense = []
        for vec in self.basis:
            row = ["0"] * n
            for c, x in vec:
                row[c] = str(x)
            dense.append(row)
        return {"ambient": self.ambient.to_json(), "dim": self.dim, "basis": dense}

    @classmethod
    def from_json(cls, data: Mapping) -> "Subspace":
        amb = data["ambient"]
        ambient = Coordinates(amb["coordinates"]) if "coordinates" in amb else FormSpace.from_json(amb)
        vectors = [
            {i: Fraction(x) for i, x in enumerate(row) if Fraction(x) != 0}
            for row in data["basis"]
        ]
        return cls.span(ambient, vectors)


def _as_vector(sub: Subspace, v) -> Mapping[int, object]:
    if isinstance(v, PolyForm):
        return v.to_vector(sub.ambient)
    return v


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient:
        raise InvalidDescriptor(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def contains(sub: Subspace, v) -> bool:
    """Exact membership of a vector (or PolyForm) in ``sub``."""
    vec = {c: Fraction(x) for c, x in _as_vector(sub, v).items() if x != 0}
    for basis_vec in sub.basis:
        p = basis_vec[0][0]
        t = vec.get(p)
        if t:
            for c, x in basis_vec:
                y = vec.get(c, 0) - t * x
                if y:
                    vec[c] = y
                else:
                    vec.pop(c, None)
    return not vec


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return Subspace.span(a.ambient, a.vectors() + b.vectors())


def sum_all(ambient, parts: Sequence[Subspace]) -> Subspace:
    vecs: list[Vec] = []
    for part in parts:
        if part.ambient != ambient:
            raise InvalidDescriptor("ambient mismatch in sum")
        vecs.extend(part.vectors())
    return Subspace.span(ambient, vecs)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b via the Zassenhaus block elimination."""
    _same_ambient(a, b)
    n = a.ambient.dim
    check_cap(2 * n)
    ech = _Echelon()
    for vec in a.basis:
        row = dict(vec)
        row.update({c + n: x for c, x in vec})
        ech.add(_integer_row(row))
    for vec in b.basis:
        ech.add(_integer_row(dict(vec)))
    meet = [
        {c - n: x for c, x in row.items()} for p, row in ech.rows.items() if p >= n
    ]
    return Subspace(a.ambient, _canonical(meet))


def is_subspace(a: Subspace, b: Subspace) -> bool:
    _same_ambient(a, b)
    return all(contains(b, dict(vec)) for vec in a.basis)


def independent(parts: Sequence[Subspace]) -> bool:
    """True when the sum of ``parts`` is direct."""
    if not parts:
        return True
    total = sum_all(parts[0].ambient, parts)
    return total.dim == sum(p.dim for p in parts)


def fischer_gram(ambient, vecs_a: Sequence[Mapping], vecs_b: Sequence[Mapping]) -> list[dict[int, Fraction]]:
    """Rows i of the Gram matrix <a_i, b_j> in the ambient's weights."""
    weights = ambient.weights
    by_col: defaultdict[int, list[tuple[int, Fraction]]] = defaultdict(list)
    for j, vec in enumerate(vecs_b):
        for c, x in vec.items():
            by_col[c].append((j, x))
    rows = []
    for vec in vecs_a:
        row: dict[int, Fraction] = {}
        for c, x in vec.items():
            hits = by_col.get(c)
            if hits:
                wx = weights[c] * x
                for j, y in hits:
                    row[j] = row.get(j, 0) + wx * y
        rows.append({j: v for j, v in row.items() if v})
    return rows


def ortho_complement_within(sub: Subspace, whole: Subspace) -> Subspace:
    """Fischer-orthogonal complement of ``sub`` inside ``whole``."""
    _same_ambient(sub, whole)
    if not is_subspace(sub, whole):
        raise InvalidDescriptor("ortho_complement_within: sub is not contained in whole")
    whole_vecs = whole.vectors()
    gram = fischer_gram(sub.ambient, sub.vectors(), whole_vecs)
    coeffs = _kernel_rows(gram, whole.dim)
    out = []
    for c in coeffs:
        acc: dict[int, Fraction] = {}
        for j, t in c.items():
            for idx, x in whole_vecs[j].items():
                acc[idx] = acc.get(idx, 0) + t * x
        out.append(acc)
    return Subspace.span(sub.ambient, out)


# ---------------------------------------------------------------------------
# operators
#
# Any object with ``source``, ``target``, ``nrows``, ``ncols``, ``rows`` (list
# of sparse dicts) and ``columns`` works here; see operators.OperatorMatrix.


def _kernel_rows(rows: Iterable[Mapping[int, object]], ncols: int) -> list[Vec]:
    ech = _Echelon(reverse=True)
    for row in rows:
        r = _integer_row(row)
        if r:
            ech.add(r)
    out = []
    for f in range(ncols):
        if f in ech.rows:
            continue
        vec: Vec = {f: Fraction(1)}
        for p in ech.where.get(f, ()):
            R = ech.rows[p]
            vec[p] = Fraction(-R[f], R[p])
        out.append(vec)
    return out


def kernel(op) -> Subspace:
    check_cap(op.ncols, op.nrows)
    vecs = _kernel_rows(op.rows, op.ncols)
    # pivots-at-max elimination gives kernel vectors already in canonical form
    return Subspace(op.source, tuple(tuple(sorted(v.items())) for v in vecs))


def image(op) -> Subspace:
    check_cap(op.ncols, op.nrows)
    return Subspace.span(op.target, op.columns)


def rank(op) -> int:
    check_cap(op.ncols, op.nrows)
    ech = _Echelon()
    for row in op.rows:
        r = _integer_row(row)
        if r:
            ech.add(r)
    return ech.rank()


class _Factor:
    """Reusable elimination of A with the row operations recorded.

    Row i of A is augmented with a tag column ``ncols + i``; after reduction
    the tag part of each row says which combination of right-hand sides it
    stands for.  Rows whose A-part vanished are consistency conditions.
    """

    def __init__(self, rows: Sequence[Mapping[int, object]], ncols: int):
        self.ncols = ncols
        ech = _Echelon()
        for i, row in enumerate(rows):
            entries = {c: Fraction(v) for c, v in row.items() if v != 0}
            den = lcm(*(v.denominator for v in entries.values())) if entries else 1
            r = {c: int(v * den) for c, v in entries.items()}
            r[ncols + i] = den
            ech.add(_primitive(r))
        self.plan = [
            (p, row[p] if p < ncols else None, [(c - ncols, x) for c, x in row.items() if c >= ncols])
            for p, row in ech.rows.items()
        ]

    def particular_int(self, ib: Mapping[int, int], den: int = 1):
        """Solve A x = ib / den with free variables zero.

        Returns ``(X, D)`` with x = X / D and X integral, or None when the
        system is inconsistent.
        """
        vals = []
        for p, lead, tags in self.plan:
            val = 0
            for i, t in tags:
                y = ib.get(i)
                if y:
                    val += t * y
            if lead is None:
                if val:
                    return None
            elif val:
                vals.append((p, lead, val))
        if not vals:
            return {}, 1
        common = lcm(*(lead for _, lead, _ in vals))
        X = {p: val * (common // lead) for p, lead, val in vals}
        return X, common * den

    def particular(self, b: Mapping[int, object]) -> Vec | None:
        ib, den = _integer_vector(b)
        res = self.particular_int(ib, den)
        if res is None:
            return None
        X, D = res
        return {p: Fraction(v, D) for p, v in X.items()}


def _integer_vector(b: Mapping[int, object]) -> tuple[dict[int, int], int]:
    entries = {i: Fraction(v) for i, v in b.items() if v}
    den = lcm(*(v.denominator for v in entries.values())) if entries else 1
    return {i: int(v * den) for i, v in entries.items()}, den


class _Solver:
    def __init__(self, op):
        check_cap(op.ncols, op.nrows)
        self.factor = _Factor(op.rows, op.ncols)
        # integer multiples of the kernel basis span the same space
        self.ker = [_integer_row(v) for v in _kernel_rows(op.rows, op.ncols)]
        self.weights = op.source.weights
        gram = fischer_gram(op.source, self.ker, self.ker)
        self.gram = _Factor(gram, len(self.ker))

    def solve(self, b: Mapping[int, object]) -> Vec | None:
        ib, den = _integer_vector(b)
        res = self.factor.particular_int(ib, den)
        if res is None:
            return None
        X, D = res
        if X and self.ker:
            # subtract the Fischer projection of X / D onto the kernel
            w = self.weights
            rhs = {}
            for i, kv in enumerate(self.ker):
                t = 0
                for c, y in kv.items():
                    z = X.get(c)
                    if z:
                        t += w[c] * y * z
                if t:
                    rhs[i] = t
            if rhs:
                C, E = self.gram.particular_int(rhs, D)
                # x = X/D - sum_i (C_i/E) K_i = (X*E - D*sum C_i K_i) / (D*E)
                acc = {c: v * E for c, v in X.items()}
                for i, t in C.items():
                    for c, y in self.ker[i].items():
                        z = acc.get(c, 0) - D * t * y
                        if z:
                            acc[c] = z
                        else:
                            acc.pop(c, None)
                X, D = acc, D * E
        return {c: Fraction(v, D) for c, v in X.items()}


def solver(op) -> _Solver:
    cached = getattr(op, "_solver_cache", None)
    if cached is None:
        cached = _Solver(op)
        try:
            object.__setattr__(op, "_solver_cache", cached)
        except AttributeError:
            pass
    return cached


def solve(op, target: Mapping[int, object]) -> Vec | None:
    """Fischer-minimal-norm solution of ``op x = target``, or None."""
    if any(i < 0 or i >= op.nrows for i in target):
        raise InvalidDescriptor("target vector does not fit the operator's target space")
    b = {i: Fraction(v) for i, v in target.items() if v != 0}
    return solver(op).solve(b)
