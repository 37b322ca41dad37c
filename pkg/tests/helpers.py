"""Random finite-dimensional modules for the property tests."""

from __future__ import annotations

import random

from mgmkit.linalg import QQ, Matrix, inverse, random_invertible, random_matrix
from mgmkit.modules import FinDimModule, findim_direct_sum
from mgmkit.ring import polynomial_ring

# monomial ideals of k[x, y] with finite quotients of dim <= 6
SMALL_IDEALS_2 = [
    [(1, 0), (0, 1)], [(2, 0), (0, 1)], [(1, 0), (0, 2)], [(2, 0), (0, 2)], [(3, 0), (0, 1)],
    [(2, 0), (1, 1), (0, 2)], [(3, 0), (0, 2)], [(2, 0), (0, 3)], [(4, 0), (0, 1)], [(3, 0), (1, 1), (0, 2)],
    [(2, 0), (1, 1), (0, 3)], [(5, 0), (0, 1)], [(3, 0), (1, 1), (0, 3)], [(2, 0), (0, 3)],
]


def ring_xy(field=QQ):
    return polynomial_ring(field, ["x", "y"])


def conjugate(M: FinDimModule, P: Matrix) -> FinDimModule:
    Pi = inverse(P)
    return FinDimModule(M.ring, M.dim, [P @ a @ Pi for a in M.action])


def random_torsion_module(rng: random.Random, ring, max_dim: int = 6) -> FinDimModule:
    """Sums of monomial quotients, cut down by a random submodule, in a random basis."""
    ideals = SMALL_IDEALS_2 if ring.nvars == 2 else [[(k,)] for k in range(1, 6)]
    mods, total = [], 0
    while True:
        choices = [I for I in ideals if _quot_dim(I) + total <= max_dim]
        if not choices or (mods and rng.random() < 0.5):
            break
        M = FinDimModule.monomial_quotient(ring, rng.choice(choices))
        mods.append(M)
        total += M.dim
    M = findim_direct_sum(mods)
    if M.dim > 1 and rng.random() < 0.4:
        sub = _generated(M, random_matrix(M.field, M.dim, 1, rng))
        if 0 < sub.ncols < M.dim:
            M, _ = M.quotient(sub)
    if M.dim > 1:
        M = conjugate(M, random_invertible(M.field, M.dim, rng))
    return M


def invertible_part(rng: random.Random, ring, dim: int) -> FinDimModule:
    """x acts by a nonzero scalar, y by any matrix: nothing is torsion for (x, y)."""
    F = ring.field
    c = F(rng.choice([1, 2, -1, 3]))
    x = Matrix.identity(F, dim).scale(c)
    rest = [random_matrix(F, dim, dim, rng) for _ in range(ring.nvars - 1)]
    return FinDimModule(ring, dim, [x] + rest)


def random_mixed_module(rng: random.Random, ring, max_dim: int = 6) -> FinDimModule:
    T = random_torsion_module(rng, ring, max(1, max_dim - 2))
    k = rng.randint(0, max_dim - T.dim)
    if k == 0:
        return T
    M = findim_direct_sum([T, invertible_part(rng, ring, k)])
    return conjugate(M, random_invertible(M.field, M.dim, rng))


def _quot_dim(ideal) -> int:
    if len(ideal[0]) == 1:
        return ideal[0][0]
    a = max(g[0] for g in ideal if g[1] == 0)
    b = max(g[1] for g in ideal if g[0] == 0)
    return sum(1 for i in range(a) for j in range(b) if not any(i >= g[0] and j >= g[1] for g in ideal))


def _generated(M: FinDimModule, vecs: Matrix) -> Matrix:
    from mgmkit.linalg import image_basis
    span = vecs
    while True:
        blocks = [span] + [a @ span for a in M.action]
        new = image_basis(Matrix.hstack(M.field, M.dim, blocks))
        if new.ncols == span.ncols:
            return new
        span = new
