from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgepoly.exterior_poly import FormSpace, PolyForm, hodge_star
from hodgepoly.linalg import kernel, rank
from hodgepoly.operators import (
    apply,
    compose,
    d,
    d_matrix,
    dirac_block_matrix,
    dstar,
    dstar_matrix,
    euler_contraction,
    laplacian,
    laplacian_matrix,
    phi_matrix,
    scalar_laplacian_matrix,
)
from hodgepoly.gmt import mt_space
from hodgepoly.randomforms import random_form, seeded
from conftest import form


def test_d_examples():
    f = form(3, (1, (1, 1, 0), (3,)))
    assert d(f) == form(3, (1, (0, 1, 0), (1, 3)), (1, (1, 0, 0), (2, 3)))
    assert d(form(3, (1, (2, 0, 0), (1,)))).is_zero()
    op = d_matrix(2, 1, 1)
    assert (op.nrows, op.ncols) == (1, 4)
    assert rank(op) == 1 and kernel(op).dim == 3


def test_dstar_examples():
    f = form(2, (1, (1, 1), (1, 2)))
    assert dstar(f) == form(2, (1, (0, 1), (2,)), (-1, (1, 0), (1,)))
    for k in range(3):
        assert dstar_matrix(3, k, 0).is_zero()
    op = dstar_matrix(3, 1, 1)
    assert (op.nrows, op.ncols) == (1, 9)
    assert rank(op) == 1 and kernel(op).dim == 8


def test_laplacian_examples():
    for blade in [(), (1,), (1, 3)]:
        assert laplacian(form(3, (1, (2, 0, 0), blade))) == form(3, (2, (0, 0, 0), blade))
        assert laplacian(form(3, (1, (2, 0, 0), blade), (-1, (0, 2, 0), blade))).is_zero()
    assert kernel(laplacian_matrix(4, 2, 2)).dim == 54


def test_apply_examples():
    assert d(form(3, (1, (1, 0, 0), ()))) == form(3, (1, (0, 0, 0), (1,)))
    assert laplacian(form(2, (1, (1, 1), (1,)))).is_zero()
    gen = seeded(0, "dstar2")
    for _ in range(10):
        f = random_form(gen, FormSpace.single(3, 3, 2))
        assert dstar(dstar(f)).is_zero()


def test_dirac_block_examples():
    for rng in [(0, 0, 1), (1, 0, 1), (0, 1, 1)]:
        assert dirac_block_matrix(3, 0, *rng).is_zero()
    assert kernel(dirac_block_matrix(3, 1, 0, 0, 1)).dim == 8
    stacked = dirac_block_matrix(3, 2, 1, 0, 0)
    f = form(3, (1, (1, 1, 0), (3,)))
    vec = stacked.matvec(f.to_vector(stacked.source))
    got = PolyForm.from_vector(stacked.target, vec)
    assert got == d(f) + dstar(f)


def test_phi_matrix_examples():
    mt = mt_space(3, 1, (0, 0, 1))
    op = phi_matrix(3, 1, 0, 0, 1, mt)
    assert rank(op) == 3 and kernel(op).dim == 5
    single = phi_matrix(3, 2, 1, 0, 0, mt_space(3, 2, (1, 0, 0)))
    assert single.nrows == 0 and rank(single) == 0
    const = phi_matrix(3, 0, 0, 0, 1, mt_space(3, 0, (0, 0, 1)))
    assert const.is_zero() and kernel(const).dim == 4


CELLS = [(m, k, s) for m in range(2, 5) for k in range(0, 4) for s in range(m + 1)]


@pytest.mark.parametrize("m,k,s", CELLS)
def test_complex_identities(m, k, s):
    if s + 2 <= m and k >= 2:
        assert compose(d_matrix(m, k - 1, s + 1), d_matrix(m, k, s)).is_zero()
    if s >= 2 and k >= 2:
        assert compose(dstar_matrix(m, k - 1, s - 1), dstar_matrix(m, k, s)).is_zero()
    if k >= 2:
        assert laplacian_matrix(m, k, s).triplets() == scalar_laplacian_matrix(m, k, s).triplets()


@pytest.mark.parametrize("m,k,s", CELLS)
def test_cartan_euler_identity(m, k, s):
    sp = FormSpace.single(m, k, s)
    for exps, blade in sp.basis:
        w = PolyForm.term(exps, blade)
        lhs = d(euler_contraction(w)) + euler_contraction(d(w))
        assert lhs == w * (k + s)


def test_laplacian_blocks_identical():
    op = laplacian_matrix(3, 3, 1)
    by_blade = {}
    src, tgt = op.source.basis, op.target.basis
    for i, j, x in op.triplets():
        b = src[j][1]
        assert tgt[i][1] == b
        by_blade.setdefault(b, set()).add((tgt[i][0], src[j][0], x))
    blocks = list(by_blade.values())
    assert all(b == blocks[0] for b in blocks)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_star_conjugates_d_to_dstar(m):
    gen = seeded(1, "star", m)
    for s in range(m + 1):
        signs = set()
        for _ in range(4):
            f = random_form(gen, FormSpace.single(m, 2, s))
            lhs = hodge_star(d(hodge_star(f)))
            rhs = dstar(f)
            if rhs.is_zero():
                assert lhs.is_zero()
                continue
            signs.add(1 if lhs == rhs else -1 if lhs == -rhs else 0)
        assert 0 not in signs and len(signs) <= 1


@given(st.integers(2, 4), st.integers(1, 3), st.data())
def test_operators_are_linear(m, k, data):
    s = data.draw(st.integers(0, m))
    sp = FormSpace.single(m, k, s)
    gen = seeded(data.draw(st.integers(0, 10**6)), "lin")
    f, g = random_form(gen, sp), random_form(gen, sp)
    c = Fraction(data.draw(st.integers(-5, 5)), 3)
    for op in (d, dstar, laplacian):
        assert op(f * c + g) == op(f) * c + op(g)


def test_operator_json_shape():
    data = d_matrix(2, 1, 0).to_json()
    assert data["source"] == {"m": 2, "k": 1, "grades": [0]}
    assert data["triplets"] == [[0, 0, "1"], [1, 1, "1"]]
