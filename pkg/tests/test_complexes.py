import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgmkit.complexes import (ChainComplex, ComplexMap, cocone, cone, dual, hom_from_free, homology, one_term,
                              shift, tensor)
from mgmkit.linalg import QQ, Matrix, kernel_basis, random_matrix
from mgmkit.mgm import koszul_complex, telescope_single
from mgmkit.modules import FinDimMap, FinDimModule, GradedFPModule, GradedMap
from mgmkit.ring import GeneratingSequence, MonomialQuotientRing, polynomial_ring

from oracles import koszul_homology_dims

Rx = polynomial_ring(QQ, ["x"])
Rxy = polynomial_ring(QQ, ["x", "y"])
x = Rx.var("x")


def random_findim_complex(rng: random.Random, length: int = 3) -> ChainComplex:
    """Trivial k[x]-modules (x acts by 0) with random differentials, d∘d = 0."""
    dims = [rng.randint(0, 3) for _ in range(length)]
    mods = [FinDimModule(Rx, n, [Matrix.zeros(QQ, n, n)]) for n in dims]
    diffs = {}
    prev = None
    for i in range(length - 1):
        d = random_matrix(QQ, dims[i + 1], dims[i], rng)
        if prev is not None:
            # rows of L kill the image of the previous differential
            L = kernel_basis(prev.T).T
            d = random_matrix(QQ, dims[i + 1], L.nrows, rng) @ L if L.nrows else Matrix.zeros(QQ, dims[i + 1], dims[i])
        diffs[i] = FinDimMap(mods[i], mods[i + 1], d)
        prev = d
    return ChainComplex(dict(enumerate(mods)), diffs)


def free_map(src_deg, tgt_deg, p):
    S = GradedFPModule.free(Rx, [src_deg])
    T = GradedFPModule.free(Rx, [tgt_deg])
    return S, T, GradedMap(S, T, {(0, 0): p})


def all_dims(C, degrees=(None,)):
    lo, hi = min(C.terms), max(C.terms)
    return {(i, d): homology(C, i, d).dim for i in range(lo - 1, hi + 2) for d in degrees}


seeds = st.integers(0, 10**6)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_d_squared_and_euler(seed):
    C = random_findim_complex(random.Random(seed), 4)
    for i in C.terms:
        if i in C.diffs and i + 1 in C.diffs:
            assert (C.diff_at(i + 1) @ C.diff_at(i)).is_zero()
    lhs = sum((-1) ** i * homology(C, i).dim for i in C.terms)
    rhs = sum((-1) ** i * C.dim_at(i) for i in C.terms)
    assert lhs == rhs == C.euler_characteristic()


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(-2, 2))
def test_shift_homology(seed, k):
    C = random_findim_complex(random.Random(seed))
    S = shift(C, k)
    for i in range(-4, 5):
        assert homology(S, i).dim == homology(C, i + k).dim


def test_shift_identities():
    K = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")]))
    assert all_dims(shift(K, 0), range(0, 4)) == all_dims(K, range(0, 4))
    back = shift(shift(K, 1), -1)
    assert back.terms.keys() == K.terms.keys()
    for i in K.diffs:
        assert back.diff_at(i, 3) == K.diff_at(i, 3)


def test_cone_of_identity_is_acyclic():
    K = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")]))
    C = cone(ComplexMap.identity(K))
    assert all(v == 0 for v in all_dims(C, range(0, 5)).values())


def test_cone_of_zero_map():
    S, T, _ = free_map(1, 0, x)
    A, B = one_term(S), one_term(T, 1)
    C = cone(ComplexMap(A, B, {}))
    # cone^i = A^{i+1} ⊕ B^i
    assert set(C.terms) == {-1, 1}
    for d in range(0, 4):
        assert C.dim_at(-1, d) == A.dim_at(0, d)
        assert C.dim_at(1, d) == B.dim_at(1, d)


def test_cocone_of_multiplication():
    S, T, g = free_map(1, 0, x)
    C = cocone(ComplexMap(one_term(S), one_term(T), {0: g}))
    for d in range(0, 5):
        assert homology(C, 0, d).dim == 0
        assert homology(C, 1, d).dim == (1 if d == 0 else 0)


def test_tensor_with_unit():
    K = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")]), 2)
    U = one_term(GradedFPModule.free(Rxy, [0]))
    assert all_dims(tensor(K, U), range(0, 6)) == all_dims(K, range(0, 6))


def test_koszul_as_tensor_product():
    kx = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x")]))
    ky = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("y")]))
    T = tensor(kx, ky)
    K = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")]))
    assert [T.terms[i].ngens for i in (-2, -1, 0)] == [1, 2, 1]
    assert [K.terms[i].ngens for i in (-2, -1, 0)] == [1, 2, 1]
    assert all_dims(T, range(0, 5)) == all_dims(K, range(0, 5))


def test_tensor_of_acyclic_cones():
    K = koszul_complex(GeneratingSequence(Rx, [x]))
    C = cone(ComplexMap.identity(K))
    assert all(v == 0 for v in all_dims(tensor(C, C), range(0, 4)).values())


def test_hom_examples():
    U = one_term(GradedFPModule.free(Rx, [0]))
    K = koszul_complex(GeneratingSequence(Rx, [x]), 3)
    assert all_dims(hom_from_free(U, K), range(0, 5)) == all_dims(K, range(0, 5))
    D = dual(K)
    assert sorted(D.terms) == [0, 1]
    assert D.terms[0].generator_degrees == (0,)
    assert D.terms[1].generator_degrees == (-3,)
    # multiplication by x^3 up to the Hom sign convention
    for d in range(0, 4):
        m = D.diff_at(0, d)
        assert m == Rx.mult_map(x ** 3, d) or m == -Rx.mult_map(x ** 3, d)
    DD = dual(D)
    for i in K.terms:
        assert DD.terms[i].generator_degrees == K.terms[i].generator_degrees
        for d in range(0, 5):
            if i in K.diffs:
                assert DD.diff_at(i, d).rank() == K.diff_at(i, d).rank()


@pytest.mark.parametrize("d", range(0, 7))
def test_koszul_xy_homology(d):
    K = koszul_complex(GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")]))
    assert homology(K, 0, d).dim == (1 if d == 0 else 0)
    assert homology(K, -1, d).dim == 0
    oracle = koszul_homology_dims(2, (), [(1, 0), (0, 1)], 1, d)
    assert [homology(K, -k, d).dim for k in range(3)] == [oracle[k] for k in range(3)]


@pytest.mark.parametrize("d", range(0, 5))
def test_koszul_over_dual_numbers(d):
    R = MonomialQuotientRing(QQ, ["x"], ideal=[(2,)])
    K = koszul_complex(GeneratingSequence(R, [R.var("x")]))
    # H_1 = ann(x) = (x), sitting in K_1 = R(-1), so it shows up in degree 2
    assert homology(K, -1, d).dim == (1 if d == 2 else 0)
    assert homology(K, -1, d).dim == koszul_homology_dims(1, [(2,)], [(1,)], 1, d)[1]


def test_one_term_homology():
    M = FinDimModule.monomial_quotient(Rxy, [(2, 0), (0, 2)])
    assert homology(one_term(M), 0).dim == 4
    assert homology(one_term(M), 1).dim == 0


def test_telescope_single_differential():
    T = telescope_single(x, 1)
    assert T.labels[0] == ["d0", "d1"] and T.labels[1] == ["d0", "d1"]
    g = T.diffs[0]
    # d(δ0) = δ0, d(δ1) = δ0 - x δ1 (entries keyed (target, source))
    assert g.entries == {(0, 0): Rx.one(), (0, 1): Rx.one(), (1, 1): -x}


def test_complex_map_checks():
    K = koszul_complex(GeneratingSequence(Rx, [x]))
    f = ComplexMap.identity(K)
    for d in range(0, 3):
        assert f.commutes(d)
    assert (f @ f).component_at(0, 1) == Matrix.identity(QQ, 1)
