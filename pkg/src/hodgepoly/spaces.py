"""Hodge-de Rham solution spaces, harmonic forms and their decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exterior_poly import FormSpace, InvalidDescriptor
from .linalg import (
    Subspace,
    independent,
    intersect,
    kernel,
    ortho_complement_within,
    sum_all,
)
from .operators import (
    d_matrix,
    ddstar_matrix,
    dirac_block_matrix,
    dstar_matrix,
    dstard_matrix,
    laplacian_matrix,
    r2_on,
)


class StratificationError(AssertionError):
    """A decomposition identity failed; this indicates a bug."""


# ---------------------------------------------------------------------------
# dimension formulas


def hodge_dim_formula(k: int, m: int, s: int) -> int:
    """dim H^s_k in closed form (zero for k < 0 and for s outside [0, m])."""
    if m < 1:
        raise InvalidDescriptor(f"dimension must be >= 1, got {m}")
    if k < 0 or s < 0 or s > m:
        return 0
    if s in (0, m):
        return 1 if k == 0 else 0
    num = comb(m - 2, s - 1) * comb(k + m - 2, m - 2) * (2 * k + m) * (k + m - 1)
    val = Fraction(num, (k + s) * (k + m - s))
    if val.denominator != 1:
        raise ArithmeticError(f"non-integral dimension formula at k={k}, m={m}, s={s}")
    return int(val)


def scalar_harmonic_dim(k: int, m: int) -> int:
    """Dimension of homogeneous harmonic polynomials of degree k in m variables."""
    if k < 0:
        return 0
    lower = comb(k + m - 3, m - 1) if k >= 2 else 0
    return comb(k + m - 1, m - 1) - lower


def form_space_dim(m: int, k: int, s: int) -> int:
    if k < 0 or not 0 <= s <= m:
        return 0
    return comb(k + m - 1, m - 1) * comb(m, s)


@dataclass(frozen=True)
class HodgeLabel:
    weight: tuple[int, ...]
    epsilon: int

    def to_json(self) -> dict:
        return {"weight": list(self.weight), "epsilon": self.epsilon}


def _lambda(n: int, k: int, s: int) -> tuple[int, ...]:
    if s == 0:
        return (0,) * n
    return (k + 1,) + (1,) * (s - 1) + (0,) * (n - s)


def highest_weight_label(m: int, k: int, s: int) -> HodgeLabel:
    if hodge_dim_formula(k, m, s) == 0:
        raise InvalidDescriptor(f"H^{s}_{k} is zero for m={m}; it carries no label")
    n = m // 2
    if s == 0:
        return HodgeLabel(_lambda(n, 0, 0), 1)
    if s == m:
        return HodgeLabel(_lambda(n, 0, 0), -1)
    if m % 2 == 0 and s == n:
        return HodgeLabel(_lambda(n, k, n), 0)
    if s <= n:
        return HodgeLabel(_lambda(n, k, s), 1)
    return HodgeLabel(_lambda(n, k, m - s), -1)


# ---------------------------------------------------------------------------
# computed spaces


def _zero(m: int, k: int, s: int) -> Subspace:
    return Subspace.zero(FormSpace(m, k, (s,)))


def _in_range(m: int, k: int, s: int) -> bool:
    return k >= 0 and 0 <= s <= m


@lru_cache(maxsize=None)
def hodge_space(m: int, k: int, s: int) -> Subspace:
    """Forms in P^s_k with dP = 0 and d*P = 0."""
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    # single-grade block operator is the stacked [d*; d]
    op = dirac_block_matrix(m, k, s, 0, 0)
    return Subspace(FormSpace(m, k, (s,)), kernel(op).basis)


@lru_cache(maxsize=None)
def harmonic_kernel(m: int, k: int, s: int) -> Subspace:
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    return kernel(laplacian_matrix(m, k, s))


@lru_cache(maxsize=None)
def ker_d(m: int, k: int, s: int) -> Subspace:
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    return kernel(d_matrix(m, k, s))


@lru_cache(maxsize=None)
def ker_dstar(m: int, k: int, s: int) -> Subspace:
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    return kernel(dstar_matrix(m, k, s))


@lru_cache(maxsize=None)
def ker_ddstar(m: int, k: int, s: int) -> Subspace:
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    return kernel(ddstar_matrix(m, k, s))


@lru_cache(maxsize=None)
def ker_dstard(m: int, k: int, s: int) -> Subspace:
    if not _in_range(m, k, s):
        return _zero(m, k, s)
    return kernel(dstard_matrix(m, k, s))


@dataclass(frozen=True)
class UVWDecomposition:
    h: Subspace
    u: Subspace
    v: Subspace
    w: Subspace

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.h.dim, self.u.dim, self.v.dim, self.w.dim)


def uvw_predicted_dims(m: int, k: int, s: int) -> tuple[int, int, int, int]:
    """Predicted (dim H, dim U, dim V, dim W); W vanishes for s in {0, m}."""
    d = hodge_dim_formula
    w = d(k - 2, m, s) if 0 < s < m else 0
    return (d(k, m, s), d(k - 1, m, s - 1), d(k - 1, m, s + 1), w)


def strata_predicted_dims(m: int, k: int, s: int, j: int) -> tuple[int, int]:
    """Predicted dims of the closed and coclosed parts of r^{2j} Z^s_{k-2j}.

    Both are d(k-2-2j, m, s) for 0 < s < m.  On 0-forms d* vanishes, so the
    whole stratum is coclosed; on m-forms d vanishes and it is all closed.
    """
    h = hodge_dim_formula(k - 2 - 2 * j, m, s)
    if s == 0:
        return 0, h
    if s == m:
        return h, 0
    return h, h


@lru_cache(maxsize=None)
def uvw_decomposition(m: int, k: int, s: int) -> UVWDecomposition:
    """Ker Δ = H ⊕ U ⊕ V ⊕ W with U, V, W taken as Fischer-orthogonal complements."""
    h = hodge_space(m, k, s)
    if not _in_range(m, k, s):
        return UVWDecomposition(h, h, h, h)
    closed_part = intersect(ker_ddstar(m, k, s), ker_d(m, k, s))
    coclosed_part = intersect(ker_dstard(m, k, s), ker_dstar(m, k, s))
    u = ortho_complement_within(h, closed_part)
    v = ortho_complement_within(h, coclosed_part)
    huv = sum_all(h.ambient, [h, u, v])
    w = ortho_complement_within(huv, harmonic_kernel(m, k, s))
    return UVWDecomposition(h, u, v, w)


def multiply_subspace_by_r2(sub: Subspace, times: int = 1) -> Subspace:
    """r^{2·times} · sub, as a subspace of the space of homogeneity k + 2·times."""
    vecs = sub.vectors()
    space = sub.ambient
    for _ in range(times):
        op = r2_on(space)
        vecs = [op.matvec(v) for v in vecs]
        space = op.target
    return Subspace.span(space, vecs)


def fisher_strata(m: int, k: int, s: int) -> list[Subspace]:
    """r^{2j} Ker^s_{k-2j} Δ for j = 0 .. k // 2."""
    if not _in_range(m, k, s):
        return []
    return [
        multiply_subspace_by_r2(harmonic_kernel(m, k - 2 * j, s), j)
        for j in range(k // 2 + 1)
    ]


@dataclass(frozen=True)
class Stratification:
    """Closed/coclosed splitting of the r^2-multiple strata of P^s_k, indexed by j = 0 .. k // 2."""

    h: Subspace
    us: tuple[Subspace, ...]
    vs: tuple[Subspace, ...]
    zs: tuple[Subspace, ...]
    xs: tuple[Subspace, ...]
    ys: tuple[Subspace, ...]
    ker_d: Subspace
    ker_dstar: Subspace


def z_space(m: int, k: int, s: int) -> Subspace:
    """Z^s_k = r^2 H^s_{k-2} ⊕ W^s_k."""
    ambient = FormSpace(m, k, (s,))
    lifted = multiply_subspace_by_r2(hodge_space(m, k - 2, s)) if k >= 2 else Subspace.zero(ambient)
    w = uvw_decomposition(m, k, s).w if k >= 0 else Subspace.zero(ambient)
    return sum_all(ambient, [lifted, w])


def kernel_stratification(m: int, k: int, s: int) -> Stratification:
    """Split r^{2j} Z^s_{k-2j} into closed and coclosed parts and reassemble Ker d, Ker d*.

    Raises StratificationError naming the first identity that fails.
    """
    if not _in_range(m, k, s):
        raise InvalidDescriptor(f"invalid descriptor m={m}, k={k}, s={s}")
    kd, kds = ker_d(m, k, s), ker_dstar(m, k, s)
    h = hodge_space(m, k, s)
    us, vs, zs, xs, ys = [], [], [], [], []
    for j in range(k // 2 + 1):
        dec = uvw_decomposition(m, k - 2 * j, s)
        us.append(multiply_subspace_by_r2(dec.u, j))
        vs.append(multiply_subspace_by_r2(dec.v, j))
        z = multiply_subspace_by_r2(z_space(m, k - 2 * j, s), j)
        x, y = intersect(z, kd), intersect(z, kds)
        if x.dim + y.dim != z.dim or sum_all(z.ambient, [x, y]) != z:
            raise StratificationError(f"r^{2*j} Z != X ⊕ Y at (m,k,s,j)=({m},{k},{s},{j})")
        zs.append(z)
        xs.append(x)
        ys.append(y)
    for name, target, parts in (
        ("Ker d", kd, [h, *us, *xs]),
        ("Ker d*", kds, [h, *vs, *ys]),
    ):
        if not independent(parts):
            raise StratificationError(f"{name} pieces are not independent at (m,k,s)=({m},{k},{s})")
        if sum_all(target.ambient, parts) != target:
            raise StratificationError(f"{name} reassembly fails at (m,k,s)=({m},{k},{s})")
    return Stratification(h, tuple(us), tuple(vs), tuple(zs), tuple(xs), tuple(ys), kd, kds)


def kernel_intersection_identities(m: int, k: int, s: int) -> dict[str, bool]:
    """Exact subspace equalities relating Ker dd*, Ker d*d, Ker d, Ker d* to H, U, V."""
    dec = uvw_decomposition(m, k, s)
    amb = dec.h.ambient
    kdds, kdsd = ker_ddstar(m, k, s), ker_dstard(m, k, s)
    return {
        "closed": intersect(kdds, ker_d(m, k, s)) == sum_all(amb, [dec.h, dec.u]),
        "coclosed": intersect(kdsd, ker_dstar(m, k, s)) == sum_all(amb, [dec.h, dec.v]),
        "both": intersect(kdds, kdsd) == sum_all(amb, [dec.h, dec.u, dec.v]),
    }


def quotient_w_dim(m: int, k: int, s: int) -> int:
    """dim Ker Δ − dim(Ker dd* ∩ Ker d*d)."""
    return harmonic_kernel(m, k, s).dim - intersect(ker_ddstar(m, k, s), ker_dstard(m, k, s)).dim


__all__ = [
    "HodgeLabel",
    "Stratification",
    "StratificationError",
    "UVWDecomposition",
    "fisher_strata",
    "form_space_dim",
    "harmonic_kernel",
    "highest_weight_label",
    "hodge_dim_formula",
    "hodge_space",
    "kernel_stratification",
    "multiply_subspace_by_r2",
    "scalar_harmonic_dim",
    "kernel_intersection_identities",
    "uvw_decomposition",
    "strata_predicted_dims",
    "uvw_predicted_dims",
]
