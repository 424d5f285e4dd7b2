from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgepoly.exterior_poly import FormSpace, InvalidDescriptor, PolyForm
from hodgepoly.gmt import (
    ComponentNotHodge,
    GradeRange,
    HodgeTuple,
    NotClosed,
    NotCoclosed,
    NotInMT,
    c_formula,
    lift_hodge_tuple,
    mt_dim_formula,
    mt_space,
    phi_apply,
    phi_split,
    poincare_primitive_d,
    poincare_primitive_dstar,
    reassemble,
)
from hodgepoly.linalg import kernel
from hodgepoly.operators import d, dirac_block_matrix, dstar, phi_matrix
from hodgepoly.randomforms import random_element, random_form, seeded
from hodgepoly.spaces import hodge_dim_formula, hodge_space
from conftest import form

ZERO3 = (0, 0, 0)


def test_mt_space_examples():
    assert mt_space(4, 0, (0, 0, 2)).dim == 8 == comb(4, 0) + comb(4, 2) + comb(4, 4)
    assert mt_space(4, 1, (0, 0, 2)).dim == 24
    for k in range(4):
        assert mt_space(3, k, (1, 0, 0)).dim == 2 * k + 3


def test_mt_dim_formula_examples():
    assert mt_dim_formula(1, 4, (0, 0, 2)) == 24
    for m in range(2, 6):
        for r in range(m + 1):
            for q in range((m - r) // 2 + 1):
                rng = GradeRange(r, 0, q)
                assert mt_dim_formula(0, m, rng) == sum(comb(m, r + 2 * j) for j in range(q + 1))
                for k in range(4):
                    assert mt_dim_formula(k, m, GradeRange(r, q, q)) == hodge_dim_formula(k, m, r + 2 * q)


def test_c_formula_examples():
    for m in range(2, 7):
        assert c_formula(0, m) == 2 ** (m - 1)
    assert c_formula(1, 4) == 24
    for k in range(6):
        assert c_formula(k, 2) == 2


def test_mt_kernel_matches_block_operator():
    assert mt_space(3, 1, (0, 0, 1)) == kernel(dirac_block_matrix(3, 1, 0, 0, 1))


def test_primitive_d_examples():
    for m in (1, 2, 3):
        dx1 = PolyForm.term((0,) * m, (1,))
        assert poincare_primitive_d(dx1) == PolyForm.term((1,) + (0,) * (m - 1), ())
    f = form(2, (2, (0, 0), (1, 2)))
    q = poincare_primitive_d(f)
    assert d(q) == f and dstar(q).is_zero()
    hand = form(2, (1, (1, 0), (2,)), (-1, (0, 1), (1,)))
    assert d(hand) == f and dstar(hand).is_zero()
    with pytest.raises(NotClosed):
        poincare_primitive_d(form(2, (1, (1, 0), (2,))))


def test_primitive_dstar_examples():
    for m in (2, 3, 4):
        one = PolyForm.term((0,) * m, ())
        q = poincare_primitive_dstar(one)
        assert dstar(q) == one and d(q).is_zero()
        radial = PolyForm(m, 1, [((tuple(int(i == j) for j in range(m)), (i + 1,)), 1) for i in range(m)])
        assert q == radial * Fraction(1, m)
    assert poincare_primitive_dstar(PolyForm.zero(3, 1, (1,))).is_zero()
    top = form(3, (1, (1, 0, 0), (1, 2, 3)))
    with pytest.raises((NotCoclosed, InvalidDescriptor)):
        poincare_primitive_dstar(top)


@given(st.integers(2, 4), st.integers(0, 2), st.data())
def test_primitives_satisfy_both_equations(m, k, data):
    s = data.draw(st.integers(1, m))
    gen = seeded(data.draw(st.integers(0, 10**6)), "prim")
    f = d(random_form(gen, FormSpace.single(m, k + 1, s - 1)))
    q = poincare_primitive_d(f)
    assert d(q) == f and dstar(q).is_zero()
    s2 = data.draw(st.integers(0, m - 1))
    g = dstar(random_form(gen, FormSpace.single(m, k + 1, s2 + 1)))
    q2 = poincare_primitive_dstar(g)
    assert dstar(q2) == g and d(q2).is_zero()


def test_lift_examples():
    assert lift_hodge_tuple(HodgeTuple.zero(3, 1, (0, 0, 1))).is_zero()
    dx1 = form(3, (1, ZERO3, (1,)))
    t = HodgeTuple(3, 1, GradeRange(0, 0, 1), (dx1,))
    p = lift_hodge_tuple(t)
    p0, p2 = p.component(0), p.component(2)
    assert d(p0) + dstar(p2) == PolyForm.zero(3, 0)
    assert d(p2).is_zero() and dstar(p0).is_zero()
    assert phi_apply(p, 3, 1, (0, 0, 1)) == t
    hand = form(3, (1, (1, 0, 0), ()), (1, (0, 1, 0), (1, 2)))
    assert phi_apply(hand, 3, 1, (0, 0, 1)) == t
    assert lift_hodge_tuple(HodgeTuple(3, 2, GradeRange(1, 0, 0), ())).is_zero()


def test_lift_rejects_non_hodge_component():
    bad = form(3, (1, (1, 0, 0), (1,)))
    with pytest.raises(ComponentNotHodge):
        lift_hodge_tuple(HodgeTuple(3, 2, GradeRange(0, 0, 1), (bad,)))


def test_split_examples():
    f = form(3, (1, (1, 0, 0), ()), (1, (0, 1, 0), (1, 2)))
    kern, image = phi_split(f, (0, 0, 1))
    assert image.components == (form(3, (1, ZERO3, (1,))),)
    for part in kern:
        assert d(part).is_zero() and dstar(part).is_zero()
    assert reassemble(kern, image) == f
    g = hodge_space(3, 2, 1).forms()[0]
    kern, image = phi_split(g, (1, 0, 0))
    assert image.components == () and kern == [g]
    for c in mt_space(3, 0, (0, 0, 1)).forms():
        assert phi_split(c, (0, 0, 1))[1].is_zero()
    with pytest.raises(NotInMT):
        phi_split(form(3, (1, (1, 0, 0), ())), (0, 0, 1))


@given(st.integers(0, 10**6))
def test_split_reassemble_random(seed):
    gen = seeded(seed, "split")
    rng = GradeRange(0, 0, 1)
    f = random_element(gen, mt_space(3, 1, rng))
    kern, image = phi_split(f, rng)
    assert reassemble(kern, image) == f
    for part in kern:
        assert d(part).is_zero() and dstar(part).is_zero()


@pytest.mark.parametrize("m,k,rng", [
    (3, 1, (0, 0, 1)), (3, 2, (0, 0, 1)), (3, 2, (1, 0, 1)), (4, 2, (0, 0, 2)), (4, 2, (0, 1, 2)),
])
def test_phi_dims(m, k, rng):
    r, p, q = rng
    mt = mt_space(m, k, rng)
    op = phi_matrix(m, k, r, p, q, mt)
    ker_expected = sum(hodge_dim_formula(k, m, r + 2 * j) for j in range(p, q + 1))
    im_expected = sum(hodge_dim_formula(k - 1, m, r + 2 * j + 1) for j in range(p, q))
    assert kernel(op).dim == ker_expected
    assert mt.dim - kernel(op).dim == im_expected


@given(st.integers(0, 10**6))
def test_lift_round_trip_random(seed):
    gen = seeded(seed, "lift")
    m, k, rng = 4, 2, GradeRange(0, 0, 2)
    comps = tuple(random_element(gen, hodge_space(m, k - 1, g)) for g in rng.odd_grades)
    t = HodgeTuple(m, k, rng, comps)
    assert phi_apply(lift_hodge_tuple(t), m, k, rng) == t


def test_json_round_trip():
    t = HodgeTuple(3, 1, GradeRange(0, 0, 1), (form(3, (1, ZERO3, (2,))),))
    assert HodgeTuple.from_json(t.to_json()) == t
    assert GradeRange.from_json(GradeRange(1, 0, 1).to_json()) == GradeRange(1, 0, 1)
    with pytest.raises(InvalidDescriptor):
        GradeRange(1, 0, 2).check(4)
