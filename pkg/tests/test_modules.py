import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mgmkit.linalg import QQ, Matrix
from mgmkit.modules import (FinDimModule, GradedFPModule, findim_direct_sum, fitting_decomposition, gamma,
                            graded_piece, is_contramodule, quotient_by_bracket_power, quotient_by_ideal_power,
                            torsion_order, truncated_completion)
from mgmkit.ring import GeneratingSequence, polynomial_ring

from helpers import random_mixed_module, random_torsion_module, ring_xy
from oracles import nilpotency_index

Rx = polynomial_ring(QQ, ["x"])
sx = GeneratingSequence(Rx, [Rx.var("x")])
Rxy = ring_xy()
sxy = GeneratingSequence(Rxy, [Rxy.var("x"), Rxy.var("y")])


def mat(rows):
    return Matrix.from_rows(QQ, rows)


def jordan(n):
    return mat([[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)])


def test_graded_piece_examples():
    R = GradedFPModule.free(Rx, [0])
    assert graded_piece(R, 5).dim == 1
    x = Rx.var("x")
    M = GradedFPModule(Rx, [0], [[x ** 2]])
    assert [graded_piece(M, d).dim for d in (0, 1, 2)] == [1, 1, 0]
    N = GradedFPModule(Rxy, [0], [[Rxy.var("x")], [Rxy.var("y")]])
    assert graded_piece(N, 1).dim == 0
    assert graded_piece(N, 0).dim == 1


def test_graded_relations_must_be_homogeneous():
    x = Rx.var("x")
    with pytest.raises(ValueError):
        GradedFPModule(Rx, [0], [[x + x ** 2]])


def test_gamma_examples():
    M = FinDimModule.monomial_quotient(Rx, [(3,)])
    assert gamma(M, sx).module.dim == 3
    inv = FinDimModule(Rx, 1, [mat([[1]])])
    assert gamma(inv, sx).module.dim == 0
    mixed = FinDimModule(Rx, 3, [mat([[0, 1, 0], [0, 0, 0], [0, 0, 1]])])
    g = gamma(mixed, sx)
    assert g.module.dim == 2
    assert g.inclusion.rank() == 2


def test_quotient_by_bracket_power_examples():
    M = FinDimModule.monomial_quotient(Rx, [(3,)])
    assert quotient_by_bracket_power(M, sx, 1).module.dim == 1
    assert quotient_by_bracket_power(M, sx, 2).module.dim == 2
    assert quotient_by_bracket_power(M, sx, 3).module.dim == 3


def test_fitting_examples():
    nil = FinDimModule(Rx, 2, [jordan(2)])
    fd = fitting_decomposition(nil, Rx.var("x"))
    assert (fd.nil.dim, fd.inv.dim) == (2, 0)
    inv = FinDimModule(Rx, 2, [mat([[2, 1], [0, 3]])])
    fd = fitting_decomposition(inv, Rx.var("x"))
    assert (fd.nil.dim, fd.inv.dim) == (0, 2)
    blk = FinDimModule(Rx, 3, [mat([[0, 0, 0], [1, 0, 0], [0, 0, 1]])])
    fd = fitting_decomposition(blk, Rx.var("x"))
    assert (fd.nil.dim, fd.inv.dim) == (2, 1)


def test_is_contramodule_examples():
    assert is_contramodule(FinDimModule.monomial_quotient(Rxy, [(2, 0), (0, 2)]), sxy)
    eig1 = FinDimModule(Rx, 2, [mat([[1, 0], [0, 0]])])
    assert not is_contramodule(eig1, sx)
    # x nilpotent, s invertible on a line
    R = polynomial_ring(QQ, ["x", "s"])
    s = GeneratingSequence(R, [R.var("s")])
    M = FinDimModule(R, 2, [mat([[0, 0], [0, 0]]), mat([[0, 0], [0, 1]])])
    assert not is_contramodule(M, s)


def test_truncated_completion_examples():
    M = FinDimModule.monomial_quotient(Rx, [(2,)])
    t = truncated_completion(M, sx, 4)
    assert [lv.dim for lv in t.levels] == [1, 2, 2, 2]
    R1 = GradedFPModule.free(Rx, [0])
    t = truncated_completion(R1, sx, 3)
    for n in range(1, 4):
        assert [t.level(n).dim(d) for d in range(0, 6)] == [1 if d < n else 0 for d in range(0, 6)]
    R2 = GradedFPModule.free(Rx, [0, 0])
    t2 = truncated_completion(R2, sx, 3)
    for n in range(1, 4):
        assert [t2.level(n).dim(d) for d in range(0, 6)] == [2 if d < n else 0 for d in range(0, 6)]
    with pytest.raises(ValueError):
        truncated_completion(GradedFPModule(Rx, [0], [[Rx.var("x")]]), sx, 2)


seeds = st.integers(0, 10**6)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gamma_idempotent(seed):
    M = random_mixed_module(random.Random(seed), Rxy)
    g = gamma(M, sxy)
    gg = gamma(g.module, sxy)
    assert gg.module.dim == g.module.dim
    assert gg.inclusion == Matrix.identity(QQ, g.module.dim)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gamma_full_iff_contramodule(seed):
    rng = random.Random(seed)
    M = random_torsion_module(rng, Rxy) if rng.random() < 0.5 else random_mixed_module(rng, Rxy)
    full = gamma(M, sxy).module.dim == M.dim
    assert full == is_contramodule(M, sxy)
    # independent: every variable nilpotent
    nil = all(nilpotency_index(sympy.Matrix(a.to_lists())) is not None for a in M.action) if M.dim else True
    assert full == nil


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gamma_radical_invariance(seed):
    M = random_mixed_module(random.Random(seed), Rxy)
    assert gamma(M, sxy).module.dim == gamma(M, sxy.power(2)).module.dim
    assert gamma(M, sxy).inclusion.rank() == gamma(M, sxy.power(2)).inclusion.rank()


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_fitting_pieces(seed):
    rng = random.Random(seed)
    M = random_mixed_module(rng, Rxy)
    for f in (Rxy.var("x"), Rxy.var("y"), Rxy.var("x") + 2 * Rxy.var("y")):
        fd = fitting_decomposition(M, f)
        assert fd.nil.dim + fd.inv.dim == M.dim
        both = Matrix.hstack(QQ, M.dim, [fd.nil_inclusion, fd.inv_inclusion])
        assert both.rank() == M.dim
        assert M.is_stable(fd.nil_inclusion) and M.is_stable(fd.inv_inclusion)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_bracket_and_ideal_powers_interleave(seed, n):
    M = random_mixed_module(random.Random(seed), Rxy)
    m = len(sxy)
    if n == 1:
        assert quotient_by_bracket_power(M, sxy, 1).module.dim == quotient_by_ideal_power(M, sxy, 1).module.dim
    # (s^[mn]) ⊆ I^n and I^mn ⊆ (s^[n]) ⊆ I^n
    bracket_mn = quotient_by_bracket_power(M, sxy, m * n).module.dim
    bracket_n = quotient_by_bracket_power(M, sxy, n).module.dim
    ideal_n = quotient_by_ideal_power(M, sxy, n).module.dim
    ideal_mn = quotient_by_ideal_power(M, sxy, m * n).module.dim
    assert bracket_mn >= ideal_n
    assert ideal_mn >= bracket_n >= ideal_n


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_torsion_order_matches_nilpotency(seed):
    M = random_torsion_module(random.Random(seed), Rxy)
    want = max(nilpotency_index(sympy.Matrix(a.to_lists())) or 1 for a in M.action)
    assert torsion_order(M, sxy) == max(want, 1)


def test_findim_module_validation():
    with pytest.raises(ValueError):
        FinDimModule(Rxy, 2, [jordan(2), jordan(2).T])
    Q = FinDimModule.monomial_quotient(Rxy, [(1, 0), (0, 1)])
    assert Q.dim == 1
    S = findim_direct_sum([Q, Q])
    assert S.dim == 2
