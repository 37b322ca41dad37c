import random

from hypothesis import given, settings
from hypothesis import strategies as st

from mgmkit.complexes import ComplexMap
from mgmkit.linalg import QQ, Matrix, random_matrix
from mgmkit.mgm import homology_towers_koszul, koszul_complex, koszul_tower
from mgmkit.ring import GeneratingSequence, counterexample_ring, polynomial_ring
from mgmkit.towers import (CERTIFIED, NOT_PRO_ZERO, Tower, VectorCoTower, VectorTower, colim_stabilized,
                           homology_tower, image_ranks, ml_limit, pro_zero_check)

from oracles import ann_s_power_dim


def ident(n):
    return Matrix.identity(QQ, n)


def zeros(r, c):
    return Matrix.zeros(QQ, r, c)


def projection(r, c):
    """k^c -> k^r keeping the first r coordinates."""
    return Matrix.from_rows(QQ, [[1 if i == j else 0 for j in range(c)] for i in range(r)])


def test_constant_complex_tower():
    R = polynomial_ring(QQ, ["x", "y"])
    K = koszul_complex(GeneratingSequence(R, [R.var("x"), R.var("y")]))
    t = Tower([K] * 4, [ComplexMap.identity(K)] * 3)
    vt = homology_tower(t, 0, 0)
    assert vt.dims == [1, 1, 1, 1]
    assert all(m == ident(1) for m in vt.maps)


def test_regular_koszul_tower_is_zero():
    R = polynomial_ring(QQ, ["x"])
    kt = koszul_tower(R, GeneratingSequence(R, [R.var("x")]), 5)
    for d in range(0, 8):
        assert homology_towers_koszul(kt, 1, d).dims == [0] * 5


def test_counterexample_tower_dims_and_witness():
    R, s = counterexample_ring(4)
    kt = koszul_tower(R, s, 4)
    # H_1 of K_n sits in K_1 = R(-n): raw degree 1 is total degree n + 1
    for n in range(1, 5):
        vt = homology_towers_koszul(kt, 1, n + 1)
        assert vt.dims[n - 1] == n == ann_s_power_dim(4, n, 1)
    vt = homology_towers_koszul(kt, 1, 5)
    v = pro_zero_check(vt, 3)
    assert v.status == NOT_PRO_ZERO
    assert not vt.compose(4, 1).is_zero()
    assert v.recheck(vt)


def test_pro_zero_simple_cases():
    z = VectorTower(QQ, [2, 2, 2], [zeros(2, 2), zeros(2, 2)])
    v = pro_zero_check(z, 1)
    assert v.status == CERTIFIED and v.max_lag == 1
    i = VectorTower(QQ, [2, 2, 2], [ident(2), ident(2)])
    assert pro_zero_check(i, 2).status == NOT_PRO_ZERO


def test_ml_limit_simple_cases():
    c = VectorTower(QQ, [3] * 4, [ident(3)] * 3)
    lim = ml_limit(c)
    assert (lim.status, lim.limit_dim, lim.stabilization_level) == ("stabilized", 3, 1)
    z = VectorTower(QQ, [2] * 4, [zeros(2, 2)] * 3)
    assert ml_limit(z).limit_dim == 0
    # k^1 <- k^2 <- k^3 ... by projections: every level is hit, the limit is not finite-dimensional
    p = VectorTower(QQ, [1, 2, 3, 4, 5], [projection(k, k + 1) for k in range(1, 5)])
    lim = ml_limit(p)
    assert lim.eventual_image == [1, 2, 3, 4, 5]
    assert lim.status == "non-stabilizing"


def test_colim_simple_cases():
    c = VectorCoTower(QQ, [2] * 4, [ident(2)] * 3)
    r = colim_stabilized(c)
    assert (r.status, r.dim, r.level) == ("stabilized", 2, 1)
    g = VectorCoTower(QQ, [1, 2, 3, 4], [projection(k, k + 1).T for k in range(1, 4)])
    assert colim_stabilized(g).status == "non-stabilizing"


def _random_tower(rng, N=5, maxdim=3, surjective=False):
    dims = [rng.randint(0 if not surjective else 1, maxdim) for _ in range(N)]
    if surjective:
        dims.sort()
    maps = []
    for k in range(N - 1):
        if surjective:
            m = projection(dims[k], dims[k + 1])
        else:
            m = random_matrix(QQ, dims[k], dims[k + 1], rng, bound=2)
            if rng.random() < 0.3:
                m = zeros(dims[k], dims[k + 1])
        maps.append(m)
    return VectorTower(QQ, dims, maps)


seeds = st.integers(0, 10**6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_certificates_recheck(seed):
    t = _random_tower(random.Random(seed))
    v = pro_zero_check(t, 2)
    assert v.recheck(t)
    for c in v.certificates:
        comp = t.compose(c["source"], c["level"])
        if c["kind"] in ("lag-exceeded", "untestable"):
            assert comp.is_zero() == c["top_zero"]
            assert (c["kind"] == "untestable") == (c["level"] + 2 > t.N)
        else:
            assert comp.is_zero() == (c["kind"] == "zero")


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_image_ranks_monotone(seed):
    t = _random_tower(random.Random(seed))
    for row in image_ranks(t):
        assert all(a >= b for a, b in zip(row, row[1:]))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_surjective_towers_stabilize_at_once(seed):
    t = _random_tower(random.Random(seed), surjective=True)
    lim = ml_limit(t)
    assert all(lag == 0 for lag in lim.image_lag)
    assert lim.eventual_image == t.dims


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_pro_zero_implies_zero_limit(seed):
    t = _random_tower(random.Random(seed))
    if pro_zero_check(t, 2).status == CERTIFIED:
        lim = ml_limit(t)
        assert lim.limit_dim in (0, None)
        assert lim.eventual_image[:-2] == [0] * (t.N - 2)
