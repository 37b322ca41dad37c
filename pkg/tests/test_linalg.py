import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mgmkit.linalg import (GF, QQ, Matrix, Quotient, field_from_string, image_basis, inverse, kernel_basis,
                           quotient_dim, random_invertible, rank, solve)

P = 1000003

int_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rank_examples():
    assert rank(Matrix.identity(QQ, 2)) == 2
    assert rank(Matrix.zeros(QQ, 3, 4)) == 0
    assert rank(Matrix.from_rows(QQ, [[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(QQ, 3)).ncols == 0
    assert kernel_basis(Matrix.zeros(QQ, 2, 3)).ncols == 3
    k = kernel_basis(Matrix.from_rows(QQ, [[1, 2], [2, 4]]))
    assert k.ncols == 1
    v = k.column(0)
    # proportional to (2, -1)
    assert v.get(0, 0) * -1 == v.get(1, 0) * 2


def test_quotient_dim_examples():
    assert quotient_dim(Matrix.identity(QQ, 3), 3) == 0
    assert quotient_dim(Matrix.zeros(QQ, 3, 1), 3) == 3
    assert quotient_dim(Matrix.from_rows(QQ, [[1, 2], [2, 4]]), 2) == 1


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_rank_nullity_and_kernel_residual(rows):
    m = Matrix.from_rows(QQ, rows)
    k = kernel_basis(m)
    assert rank(m) + k.ncols == m.ncols
    assert (m @ k).is_zero()


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_rank_matches_sympy(rows):
    assert rank(Matrix.from_rows(QQ, rows)) == sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_rank_over_large_prime_matches_rationals(rows):
    # entries are tiny, so no invariant factor is divisible by P
    assert rank(Matrix.from_rows(QQ, rows)) == rank(Matrix.from_rows(GF(P), rows))


@settings(max_examples=40, deadline=None)
@given(int_matrices)
def test_deterministic(rows):
    a, b = Matrix.from_rows(QQ, rows), Matrix.from_rows(QQ, rows)
    assert kernel_basis(a) == kernel_basis(b)
    assert image_basis(a) == image_basis(b)
    assert repr(kernel_basis(a)) == repr(kernel_basis(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_inverse_and_solve(seed, n):
    rng = random.Random(seed)
    for F in (QQ, GF(101)):
        A = random_invertible(F, n, rng)
        assert A @ inverse(A) == Matrix.identity(F, n)
        B = Matrix.from_rows(F, [[rng.randint(-3, 3) for _ in range(2)] for _ in range(n)])
        assert A @ solve(A, B) == B


def test_prime_field_arithmetic():
    F = GF(7)
    m = Matrix.from_rows(F, [[3, 0], [0, 5]])
    assert m @ inverse(m) == Matrix.identity(F, 2)
    assert rank(Matrix.from_rows(F, [[7, 14]])) == 0


def test_quotient_projection_and_lift():
    sub = Matrix.from_rows(QQ, [[1], [1], [0]])
    q = Quotient.of_columns(sub)
    assert q.dim == 2
    assert (q.project @ sub).is_zero()
    assert q.project @ q.lift == Matrix.identity(QQ, 2)


def test_field_strings():
    assert field_from_string("q") == QQ
    assert field_from_string("p:101") == GF(101)
    with pytest.raises(ValueError):
        field_from_string("reals")
    with pytest.raises(ValueError):
        GF(12)
