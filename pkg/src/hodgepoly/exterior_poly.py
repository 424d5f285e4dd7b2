"""Polynomial differential forms on R^m with exact rational coefficients.

A basis element of P^s_k is a pair ``(exps, blade)`` standing for
``x^exps dx_blade``.  Blades are strictly increasing tuples of 1-based
indices.  Ambient spaces are ordered blade-major (ascending grade, blades
lexicographic within a grade) and then by monomial, lexicographically
descending.  Every matrix and JSON layout in the package follows that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Iterable, Mapping

Exps = tuple[int, ...]
Blade = tuple[int, ...]
Key = tuple[Exps, Blade]


class InvalidDescriptor(ValueError):
    """Raised for out-of-range dimensions, grades or grade ranges."""


# ---------------------------------------------------------------------------
# basis enumeration


@lru_cache(maxsize=None)
def enumerate_monomials(m: int, k: int) -> tuple[Exps, ...]:
    """All exponent vectors of length m and degree k, descending lex order."""
    if m < 1:
        raise InvalidDescriptor(f"dimension must be >= 1, got {m}")
    if k < 0:
        return ()

    def rec(n: int, deg: int):
        if n == 1:
            yield (deg,)
            return
        for first in range(deg, -1, -1):
            for rest in rec(n - 1, deg - first):
                yield (first,) + rest

    return tuple(rec(m, k))


@lru_cache(maxsize=None)
def enumerate_blades(m: int, s: int) -> tuple[Blade, ...]:
    if m < 1:
        raise InvalidDescriptor(f"dimension must be >= 1, got {m}")
    if s < 0 or s > m:
        return ()
    return tuple(combinations(range(1, m + 1), s))


def _check_index(i: int, m: int | None) -> None:
    if i < 1 or (m is not None and i > m):
        raise InvalidDescriptor(f"index {i} out of range 1..{m}")


def wedge_step(i: int, blade: Blade, m: int | None = None):
    """dx_i ^ dx_blade as ``(sign, blade')``, or None when i is in blade."""
    _check_index(i, m)
    if i in blade:
        return None
    below = sum(1 for j in blade if j < i)
    sign = -1 if below % 2 else 1
    return sign, tuple(sorted(blade + (i,)))


def contract_step(i: int, blade: Blade, m: int | None = None):
    """Interior product of e_i into dx_blade, or None when i is not in blade."""
    _check_index(i, m)
    if i not in blade:
        return None
    below = sum(1 for j in blade if j < i)
    sign = -1 if below % 2 else 1
    return sign, tuple(j for j in blade if j != i)


def complement_sign(blade: Blade, m: int) -> int:
    """Sign of the permutation (blade, complement of blade) of 1..m."""
    perm = list(blade) + [j for j in range(1, m + 1) if j not in blade]
    inversions = sum(
        1 for a in range(m) for b in range(a + 1, m) if perm[a] > perm[b]
    )
    return -1 if inversions % 2 else 1


# ---------------------------------------------------------------------------
# ambient spaces


@dataclass(frozen=True)
class FormSpace:
    """The space of forms of homogeneity k in the listed grades.

    Grades outside ``[0, m]`` are dropped on construction, so a target such
    as P^{m+1}_{k-1} is simply zero-dimensional.  ``rpq`` remembers the grade
    range a GMT space was built from; it does not take part in equality.
    """

    m: int
    k: int
    grades: tuple[int, ...]
    rpq: tuple[int, int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise InvalidDescriptor(f"dimension must be >= 1, got {self.m}")
        kept = tuple(sorted({g for g in self.grades if 0 <= g <= self.m}))
        object.__setattr__(self, "grades", kept)

    @classmethod
    def single(cls, m: int, k: int, s: int) -> "FormSpace":
        if m < 1 or not 0 <= s <= m:
            raise InvalidDescriptor(f"grade {s} out of range for m={m}")
        return cls(m, k, (s,))

    @classmethod
    def graded(cls, m: int, k: int, r: int, p: int, q: int) -> "FormSpace":
        check_range(m, r, p, q)
        return cls(m, k, tuple(r + 2 * j for j in range(p, q + 1)), (r, p, q))

    @property
    def basis(self) -> tuple[Key, ...]:
        return _basis(self.m, self.k, self.grades)

    @property
    def index(self) -> dict[Key, int]:
        return _index(self.m, self.k, self.grades)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def weights(self) -> tuple[int, ...]:
        """Fischer norms <b, b> of the basis elements."""
        return _weights(self.m, self.k, self.grades)

    def grade_slice(self, s: int) -> range:
        """Coordinate range occupied by grade s."""
        nmon = len(enumerate_monomials(self.m, self.k))
        start = 0
        for g in self.grades:
            size = len(enumerate_blades(self.m, g)) * nmon
            if g == s:
                return range(start, start + size)
            start += size
        return range(start, start)

    def to_json(self) -> dict:
        out = {"m": self.m, "k": self.k, "grades": list(self.grades)}
        if self.rpq is not None:
            r, p, q = self.rpq
            out["range"] = {"r": r, "p": p, "q": q}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FormSpace":
        if "range" in data:
            rng = data["range"]
            return cls.graded(data["m"], data["k"], rng["r"], rng["p"], rng["q"])
        return cls(data["m"], data["k"], tuple(data["grades"]))


def check_range(m: int, r: int, p: int, q: int) -> None:
    if min(r, p, q) < 0 or p > q or r + 2 * q > m:
        raise InvalidDescriptor(
            f"invalid grade range (r,p,q)=({r},{p},{q}) for m={m}: "
            "need p <= q and r + 2q <= m"
        )


@lru_cache(maxsize=None)
def _basis(m: int, k: int, grades: tuple[int, ...]) -> tuple[Key, ...]:
    mons = enumerate_monomials(m, k)
    return tuple(
        (a, b) for s in grades for b in enumerate_blades(m, s) for a in mons
    )


@lru_cache(maxsize=None)
def _index(m: int, k: int, grades: tuple[int, ...]) -> dict[Key, int]:
    return {key: i for i, key in enumerate(_basis(m, k, grades))}


@lru_cache(maxsize=None)
def _weights(m: int, k: int, grades: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(exps_factorial(a) for a, _ in _basis(m, k, grades))


def exps_factorial(exps: Exps) -> int:
    return prod(factorial(e) for e in exps)


def _sort_key(key: Key):
    exps, blade = key
    return (len(blade), blade, tuple(-e for e in exps))


# ---------------------------------------------------------------------------
# forms


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("float coefficients are not accepted; use Fraction or str")
    return Fraction(x)


class PolyForm:
    """An immutable homogeneous polynomial differential form.

    ``grades`` records the grade set the form is declared to live in; for a
    nonzero form it always contains the grades actually present.  Equality
    ignores the declaration and compares ``m``, ``k`` and the terms.
    """

    __slots__ = ("m", "k", "_terms", "_grades")

    def __init__(
        self,
        m: int,
        k: int,
        terms: Mapping[Key, object] | Iterable[tuple[Key, object]] = (),
        grades: Iterable[int] | None = None,
    ):
        if m < 1:
            raise InvalidDescriptor(f"dimension must be >= 1, got {m}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, Fraction] = {}
        for (exps, blade), c in items:
            exps = tuple(int(e) for e in exps)
            blade = tuple(int(i) for i in blade)
            if len(exps) != m or min(exps, default=0) < 0 or sum(exps) != k:
                raise InvalidDescriptor(f"exponent {exps} not of degree {k} in {m} variables")
            if list(blade) != sorted(set(blade)) or (blade and not 1 <= blade[0] <= blade[-1] <= m):
                raise InvalidDescriptor(f"invalid blade {blade} for m={m}")
            acc[(exps, blade)] = acc.get((exps, blade), 0) + _fraction(c)
        self.m = m
        self.k = k
        self._terms = tuple(
            (key, acc[key]) for key in sorted(acc, key=_sort_key) if acc[key] != 0
        )
        present = {len(b) for (_, b), _ in self._terms}
        if grades is None:
            self._grades = tuple(sorted(present))
        else:
            declared = tuple(sorted(set(grades)))
            if not present <= set(declared):
                raise InvalidDescriptor(f"form has grades {sorted(present)} outside {declared}")
            self._grades = declared

    # -- construction ------------------------------------------------------

    @classmethod
    def _trusted(cls, m: int, k: int, terms: tuple, grades: tuple[int, ...]) -> "PolyForm":
        """Skip validation; ``terms`` must already be canonical and nonzero."""
        obj = cls.__new__(cls)
        obj.m, obj.k, obj._terms, obj._grades = m, k, terms, grades
        return obj

    @classmethod
    def zero(cls, m: int, k: int, grades: Iterable[int] = ()) -> "PolyForm":
        return cls(m, k, (), grades)

    @classmethod
    def term(cls, exps, blade=(), coeff=1) -> "PolyForm":
        exps = tuple(exps)
        return cls(len(exps), sum(exps), [((exps, tuple(blade)), coeff)])

    @classmethod
    def from_vector(cls, space: FormSpace, vec: Mapping[int, object]) -> "PolyForm":
        basis = space.basis
        terms = tuple((basis[i], Fraction(vec[i])) for i in sorted(vec) if vec[i])
        return cls._trusted(space.m, space.k, terms, space.grades)

    def to_vector(self, space: FormSpace) -> dict[int, Fraction]:
        if space.m != self.m or (space.k != self.k and self._terms):
            raise InvalidDescriptor(
                f"form (m={self.m}, k={self.k}) does not live in space (m={space.m}, k={space.k})"
            )
        index = space.index
        try:
            return {index[key]: c for key, c in self._terms}
        except KeyError as exc:
            raise InvalidDescriptor(f"term {exc.args[0]} outside space grades {space.grades}") from None

    # -- inspection ----------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[Key, Fraction], ...]:
        return self._terms

    @property
    def grades(self) -> tuple[int, ...]:
        return self._grades

    @property
    def grade(self) -> int:
        if len(self._grades) != 1:
            raise InvalidDescriptor(f"expected a single-grade form, got grades {self._grades}")
        return self._grades[0]

    def is_zero(self) -> bool:
        return not self._terms

    def component(self, s: int) -> "PolyForm":
        terms = tuple((key, c) for key, c in self._terms if len(key[1]) == s)
        return PolyForm._trusted(self.m, self.k, terms, (s,))

    def with_grades(self, grades: Iterable[int]) -> "PolyForm":
        declared = tuple(sorted(set(grades)))
        if any(len(b) not in declared for (_, b), _ in self._terms):
            raise InvalidDescriptor(f"form has grades outside {declared}")
        return PolyForm._trusted(self.m, self.k, self._terms, declared)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "PolyForm") -> None:
        if self.m != other.m or (self.k != other.k and self._terms and other._terms):
            raise InvalidDescriptor("forms of different dimension or homogeneity")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if not isinstance(other, PolyForm):
            return NotImplemented
        self._check_compatible(other)
        k = self.k if self._terms or not other._terms else other.k
        grades = tuple(sorted(set(self._grades) | set(other._grades)))
        acc = dict(self._terms)
        for key, c in other._terms:
            acc[key] = acc.get(key, 0) + c
        terms = tuple((key, acc[key]) for key in sorted(acc, key=_sort_key) if acc[key])
        return PolyForm._trusted(self.m, k, terms, grades)

    def __neg__(self) -> "PolyForm":
        return PolyForm._trusted(self.m, self.k, tuple((key, -c) for key, c in self._terms), self._grades)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "PolyForm":
        if isinstance(scalar, PolyForm):
            return NotImplemented
        c = _fraction(scalar)
        return PolyForm(self.m, self.k, [(key, c * v) for key, v in self._terms], self._grades)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.m != other.m:
            return False
        if not self._terms and not other._terms:
            return True
        return self.k == other.k and self._terms == other._terms

    def __hash__(self):
        return hash((self.m, self.k if self._terms else None, self._terms))

    def __repr__(self) -> str:
        return f"PolyForm(m={self.m}, k={self.k}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (exps, blade), c in self._terms:
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
            )
            dx = "dx" + "".join(map(str, blade)) if blade else ""
            body = " ".join(p for p in (mono, dx) if p) or "1"
            parts.append(f"({c}) {body}" if c != 1 else body)
        return " + ".join(parts)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "terms": [
                {"coeff": str(c), "exps": list(exps), "blade": list(blade)}
                for (exps, blade), c in self._terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping, grades: Iterable[int] | None = None) -> "PolyForm":
        terms = [
            ((tuple(t["exps"]), tuple(t["blade"])), _fraction(str(t["coeff"])))
            for t in data.get("terms", ())
        ]
        return cls(int(data["m"]), int(data["k"]), terms, grades)


# ---------------------------------------------------------------------------
# operations on forms


def hodge_star(f: PolyForm) -> PolyForm:
    if len(f.grades) > 1:
        raise InvalidDescriptor(f"hodge_star needs a single-grade form, got {f.grades}")
    m = f.m
    out = []
    for (exps, blade), c in f.terms:
        comp = tuple(j for j in range(1, m + 1) if j not in blade)
        out.append(((exps, comp), complement_sign(blade, m) * c))
    return PolyForm(m, f.k, out, [m - s for s in f.grades])


def multiply_by_r2(f: PolyForm) -> PolyForm:
    """(x_1^2 + ... + x_m^2) * f."""
    out = []
    for (exps, blade), c in f.terms:
        for i in range(f.m):
            bumped = exps[:i] + (exps[i] + 2,) + exps[i + 1:]
            out.append(((bumped, blade), c))
    return PolyForm(f.m, f.k + 2, out, f.grades)


def fischer_inner(f: PolyForm, g: PolyForm) -> Fraction:
    if f.m != g.m or (f.k != g.k and f.terms and g.terms):
        raise InvalidDescriptor("fischer_inner needs forms of equal dimension and homogeneity")
    other = dict(g.terms)
    total = Fraction(0)
    for key, c in f.terms:
        d = other.get(key)
        if d is not None:
            total += c * d * exps_factorial(key[0])
    return total
