from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgepoly.exterior_poly import FormSpace, PolyForm, fischer_inner
from hodgepoly.linalg import (
    Coordinates,
    DimensionCapExceeded,
    Subspace,
    contains,
    image,
    intersect,
    kernel,
    ortho_complement_within,
    rank,
    set_dimension_cap,
    solve,
    subspace_sum,
)
from hodgepoly.operators import OperatorMatrix, d_matrix, dirac_block_matrix, dstar_matrix, phi_matrix
from hodgepoly.gmt import mt_space
from hodgepoly.spaces import harmonic_kernel, hodge_space, ker_d, ker_ddstar, uvw_decomposition
from conftest import form


def matrix(rows, ncols):
    """OperatorMatrix on coordinate spaces from a dense row list."""
    cols = [{i: Fraction(r[j]) for i, r in enumerate(rows) if r[j]} for j in range(ncols)]
    return OperatorMatrix(Coordinates(ncols), Coordinates(len(rows)), tuple(cols))


def brute_rank(rows):
    """Plain Fraction Gaussian elimination, independent of the library."""
    a = [[Fraction(x) for x in r] for r in rows]
    rk, ncols = 0, len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        for i in range(len(a)):
            if i != rk and a[i][c]:
                f = a[i][c] / a[rk][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        rk += 1
    return rk


def test_kernel_examples():
    zero = OperatorMatrix(FormSpace.single(3, 0, 1), FormSpace.single(3, -1, 2), ({}, {}, {}))
    assert kernel(zero).dim == 3
    assert kernel(dirac_block_matrix(3, 1, 1, 0, 0)).dim == 5
    assert kernel(matrix([[1, 0], [0, 1]], 2)).dim == 0


def test_image_examples():
    im = image(d_matrix(2, 1, 0))
    assert im == Subspace.from_forms(im.ambient, [form(2, (1, (0, 0), (1,))), form(2, (1, (0, 0), (2,)))])
    assert image(matrix([[0, 0]], 2)).dim == 0
    mt = mt_space(3, 1, (0, 0, 1))
    assert image(phi_matrix(3, 1, 0, 0, 1, mt)).dim == 3


def test_solve_examples():
    op = d_matrix(3, 1, 0)
    target = form(3, (1, (0, 0, 0), (1,))).to_vector(op.target)
    x = solve(op, target)
    assert PolyForm.from_vector(op.source, x) == form(3, (1, (1, 0, 0), ()))
    zero_map = matrix([[0], [0], [0]], 1)
    assert solve(zero_map, {0: 1}) is None
    assert solve(dstar_matrix(3, 2, 2), {}) == {}


def test_intersect_examples():
    h = intersect(ker_d(3, 1, 1), kernel(dstar_matrix(3, 1, 1)))
    assert h.dim == 5 and h == hodge_space(3, 1, 1)
    assert intersect(h, h) == h
    assert intersect(h, Subspace.zero(h.ambient)).dim == 0


def test_contains_examples():
    h = hodge_space(3, 1, 1)
    assert contains(h, form(3, (1, (1, 0, 0), (2,)), (1, (0, 1, 0), (1,))))
    assert not contains(h, form(3, (1, (1, 0, 0), (1,))))


def test_complement_examples():
    whole = harmonic_kernel(3, 2, 1)
    assert ortho_complement_within(whole, whole).dim == 0
    assert ortho_complement_within(Subspace.zero(whole.ambient), whole) == whole
    closed = intersect(ker_ddstar(4, 2, 2), ker_d(4, 2, 2))
    assert ortho_complement_within(hodge_space(4, 2, 2), closed).dim == 9


def test_sum_of_pieces_is_harmonic_kernel():
    dec = uvw_decomposition(4, 2, 2)
    total = subspace_sum(subspace_sum(dec.h, dec.u), subspace_sum(dec.v, dec.w))
    assert total == harmonic_kernel(4, 2, 2)


rows_st = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=5)
)


@given(rows_st)
def test_rank_nullity_and_brute_rank(rows):
    op = matrix(rows, len(rows[0]))
    assert rank(op) == brute_rank(rows)
    assert rank(op) + kernel(op).dim == op.ncols
    for v in kernel(op).vectors():
        assert not op.matvec(v)


@given(rows_st, st.data())
def test_canonical_form_is_unique(rows, data):
    n = len(rows[0])
    a = Subspace.span(Coordinates(n), [dict(enumerate(r)) for r in rows])
    coeffs = data.draw(st.lists(st.integers(-4, 4), min_size=len(rows), max_size=len(rows)))
    mixed = [{j: sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(n)}]
    shuffled = [dict(enumerate(r)) for r in reversed(rows)] + mixed
    assert Subspace.span(Coordinates(n), shuffled) == a
    for vec in a.basis:
        assert vec[0][1] == 1
    assert list(a.pivots) == sorted(a.pivots)


@given(rows_st, rows_st)
def test_dimension_formula_for_sum_and_intersection(r1, r2):
    n = min(len(r1[0]), len(r2[0]))
    a = Subspace.span(Coordinates(n), [dict(enumerate(r[:n])) for r in r1])
    b = Subspace.span(Coordinates(n), [dict(enumerate(r[:n])) for r in r2])
    i, s = intersect(a, b), subspace_sum(a, b)
    assert i.dim + s.dim == a.dim + b.dim
    for v in i.vectors():
        assert contains(a, v) and contains(b, v)


@given(rows_st, st.data())
def test_solve_is_exact_and_minimal(rows, data):
    n = len(rows[0])
    op = matrix(rows, n)
    x0 = dict(enumerate(data.draw(st.lists(st.integers(-5, 5), min_size=n, max_size=n))))
    target = op.matvec(x0)
    x = solve(op, target)
    assert x is not None and op.matvec(x) == {i: c for i, c in target.items() if c}
    for v in kernel(op).vectors():
        assert sum(x.get(i, 0) * c for i, c in v.items()) == 0


def test_solve_minimal_in_fischer_norm():
    op = d_matrix(2, 2, 0)
    sol = solve(op, op.matvec({0: 1}))
    f = PolyForm.from_vector(op.source, sol)
    for v in kernel(op).forms():
        assert fischer_inner(f, v) == 0


def test_json_round_trip_and_cap():
    h = hodge_space(3, 2, 1)
    assert Subspace.from_json(h.to_json()) == h
    set_dimension_cap(10)
    try:
        with pytest.raises(DimensionCapExceeded):
            kernel(d_matrix(3, 3, 1))
    finally:
        set_dimension_cap(None)
