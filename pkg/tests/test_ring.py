from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgmkit.linalg import QQ, GF, Matrix
from mgmkit.ring import (GeneratingSequence, MonomialQuotientRing, bracket_power_ideal, counterexample_ring,
                         degree_basis, ideal_power_generators, mult_map, polynomial_ring)

from oracles import counterexample_ideal, standard_monomials


def names(ring, basis):
    return {ring.monomial_str(m) for m in basis}


def test_degree_basis_examples():
    R = MonomialQuotientRing(QQ, ["x", "y"], ideal=[(1, 1)])
    assert names(R, degree_basis(R, 2)) == {"x^2", "y^2"}
    assert degree_basis(R, 0) == ((0, 0),)
    C, _ = counterexample_ring(2)
    assert names(C, degree_basis(C, 2)) == {"x2*s", "s^2"}
    C3, _ = counterexample_ring(3)
    assert names(C3, degree_basis(C3, 3)) == {"s^3", "x3*s^2"}


def test_counterexample_relations():
    R1, s1 = counterexample_ring(1)
    assert set(R1.ideal_generators) == {(2, 0), (1, 1)}
    R2, _ = counterexample_ring(2)
    assert set(R2.ideal_generators) == {(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 2)}
    assert [str(t) for t in s1] == ["s"]


@pytest.mark.parametrize("v", [1, 2, 3])
@pytest.mark.parametrize("d", range(0, 7))
def test_free_ring_dimensions(v, d):
    R = polynomial_ring(QQ, [f"x{i}" for i in range(v)])
    assert R.dim(d) == comb(d + v - 1, v - 1)


@pytest.mark.parametrize("num_vars", [2, 3, 4])
@pytest.mark.parametrize("d", range(0, 6))
def test_counterexample_basis_against_enumeration(num_vars, d):
    R, _ = counterexample_ring(num_vars)
    assert sorted(degree_basis(R, d)) == standard_monomials(num_vars + 1, d, counterexample_ideal(num_vars))


def test_weighted_degree_basis():
    R = polynomial_ring(QQ, ["x", "y"], [1, 2])
    assert sorted(degree_basis(R, 4)) == standard_monomials(2, 4, (), [1, 2])
    assert R.dim(-1) == 0


def test_mult_map_examples():
    R = polynomial_ring(QQ, ["x"])
    assert mult_map(R, R.var("x"), 3) == Matrix.from_rows(QQ, [[1]])
    Q = MonomialQuotientRing(QQ, ["x"], ideal=[(2,)])
    assert mult_map(Q, Q.var("x"), 1).shape == (0, 1)
    S = MonomialQuotientRing(QQ, ["x", "y"], ideal=[(1, 1)])
    m = mult_map(S, S.var("x"), 1)
    src = list(degree_basis(S, 1))
    tgt = list(degree_basis(S, 2))
    col_x = m.column(src.index((1, 0)))
    assert col_x == {tgt.index((2, 0)): QQ(1)}
    assert m.column(src.index((0, 1))) == {}


def test_bracket_powers():
    R = polynomial_ring(QQ, ["x", "y"])
    x, y = R.var("x"), R.var("y")
    assert bracket_power_ideal(GeneratingSequence(R, [x, y]), 2).elements == (x ** 2, y ** 2)
    C, s = counterexample_ring(2)
    assert bracket_power_ideal(s, 3).elements == (C.var("s") ** 3,)
    t = bracket_power_ideal(GeneratingSequence(R, [x + y, y]), 2)
    assert t.elements == (x * x + 2 * x * y + y * y, y ** 2)


def test_ideal_power_generators():
    R = polynomial_ring(QQ, ["x", "y"])
    gens = ideal_power_generators(GeneratingSequence(R, [R.var("x"), R.var("y")]), 2)
    assert {str(g) for g in gens} == {"x^2", "x*y", "y^2"}


def test_sequence_validation():
    R = polynomial_ring(QQ, ["x", "y"])
    with pytest.raises(ValueError):
        GeneratingSequence(R, [R.var("x") + R.one()])
    with pytest.raises(ValueError):
        GeneratingSequence(R, [])
    with pytest.raises(ValueError):
        GeneratingSequence(R, [R.one()])


polys = st.lists(st.tuples(st.integers(0, 3), st.integers(-3, 3)), min_size=1, max_size=4)


def _homog(R, d, terms):
    basis = degree_basis(R, d)
    f = R.zero()
    for k, c in terms:
        if basis:
            f = f + R.monomial(basis[k % len(basis)], c)
    return f


RINGS = [
    polynomial_ring(QQ, ["x", "y"]),
    MonomialQuotientRing(QQ, ["x", "y", "z"], ideal=[(1, 1, 0), (0, 0, 3)]),
    MonomialQuotientRing(GF(101), ["x", "y"], [1, 2], ideal=[(2, 1)]),
    counterexample_ring(3)[0],
]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RINGS), st.integers(1, 3), st.integers(0, 4), polys, polys)
def test_mult_map_additive(R, e, d, a, b):
    f, g = _homog(R, e, a), _homog(R, e, b)
    assert mult_map(R, f + g, d, e) == mult_map(R, f, d, e) + mult_map(R, g, d, e)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RINGS), st.integers(1, 3), st.integers(1, 3), st.integers(0, 3), polys, polys)
def test_mult_maps_commute(R, e1, e2, d, a, b):
    f, g = _homog(R, e1, a), _homog(R, e2, b)
    lhs = mult_map(R, f, d + e2, e1) @ mult_map(R, g, d, e2)
    assert lhs == mult_map(R, g, d + e1, e2) @ mult_map(R, f, d, e1)


@pytest.mark.parametrize("R", RINGS)
def test_ideal_generators_act_by_zero(R):
    free = MonomialQuotientRing(R.field, R.variables, R.weights)
    for h in R.ideal_generators:
        assert R.monomial(h).is_zero()
        for d in range(0, 5):
            assert mult_map(R, R.monomial(h), d, R.degree(h)).is_zero()
            # lifting to the free ring and reducing gives nothing either
            for u in degree_basis(R, d):
                lift = free.monomial(h) * free.monomial(u)
                assert all(not R.is_standard(m) for m in lift.terms)


def test_mult_map_zero_needs_degree():
    R = polynomial_ring(QQ, ["x"])
    with pytest.raises(ValueError):
        mult_map(R, R.zero(), 1)
    with pytest.raises(ValueError):
        mult_map(R, R.var("x"), 1, degree=2)
