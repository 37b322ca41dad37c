"""Finite-dimensional coalgebras, comodules and contramodules.

Index conventions (all vectors are flattened row-major):

* ``C ⊗ M`` has index ``i * dim M + m``;
* ``Hom_k(C, P)`` has index ``i * dim P + q`` for the map ``c_i -> p_q``;
* ``Hom_k(X, Y)`` has index ``y * dim X + x`` (the matrix of the map, row-major).

The dual algebra multiplies ``f·g = (g ⊗ f) ∘ Δ``.  With this order a right
comodule is a right C*-module via ``n·f = n_(0) f(n_(1))`` and a left
contramodule is the same thing as a left C*-module, ``f·p = π(f ⊗ p)``.
``Hom(C, Hom(C, P))`` is identified with ``Hom(C ⊗ C, P)`` by
``G(c'')(c') = g(c' ⊗ c'')``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .linalg import Field, Matrix, Quotient, kernel_basis, random_invertible, random_matrix, solve, inverse


def _rank_equal_spans(a: Matrix, b: Matrix) -> bool:
    """Column spans of a and b coincide."""
    ra, rb = a.rank(), b.rank()
    if ra != rb:
        return False
    if a.ncols == 0 or b.ncols == 0:
        return ra == rb == 0
    return Matrix.hstack(a.field, a.nrows, [a, b]).rank() == ra


# ---------------------------------------------------------------------------
# coalgebras


class FinDimCoalgebra:
    """Coalgebra with Δ(c_i) = Σ μ[i][j][k] c_j ⊗ c_k and counit ε.

    ``delta`` is the (dim² × dim) matrix of Δ, ``counit`` the 1 × dim row.
    """

    def __init__(self, field: Field, dim: int, mu, counit: Sequence, check: bool = True):
        self.field = field
        self.dim = dim
        if isinstance(mu, Matrix):
            self.delta = mu
        else:
            entries = {}
            if isinstance(mu, dict):
                items = mu.items()
            else:
                items = (((i, j, k), mu[i][j][k]) for i in range(dim) for j in range(dim) for k in range(dim))
            for (i, j, k), c in items:
                c = field(c)
                if c:
                    entries[(j * dim + k, i)] = c
            self.delta = Matrix.from_dict(field, dim * dim, dim, entries)
        self.counit = Matrix.from_rows(field, [[field(x) for x in counit]], ncols=dim)
        if self.delta.shape != (dim * dim, dim) or self.counit.shape != (1, dim):
            raise ValueError("structure tensors have the wrong shape")
        if check:
            self.validate()

    def mu(self, i: int, j: int, k: int):
        return self.delta[j * self.dim + k, i]

    def identity(self) -> Matrix:
        return Matrix.identity(self.field, self.dim)

    def validate(self) -> None:
        I = self.identity()
        d = self.delta
        if (d.kron(I) @ d) != (I.kron(d) @ d):
            raise ValueError("comultiplication is not coassociative")
        if self.counit.kron(I) @ d != I or I.kron(self.counit) @ d != I:
            raise ValueError("counit axiom fails")

    def __repr__(self) -> str:
        return f"FinDimCoalgebra(dim={self.dim}, field={self.field})"

    def change_basis(self, P: Matrix) -> "FinDimCoalgebra":
        """New basis c'_i = Σ_j P[j][i] c_j."""
        Q = inverse(P)
        return FinDimCoalgebra(self.field, self.dim, Q.kron(Q) @ self.delta @ P, _row(self.counit @ P, self.dim))

    def is_subcoalgebra(self, basis: Sequence[int]) -> bool:
        """Is span{c_i : i in basis} closed under Δ?"""
        inside = set(basis)
        for i in basis:
            for r, c in self.delta.column(i).items():
                j, k = divmod(r, self.dim)
                if c and (j not in inside or k not in inside):
                    return False
        return True

    def restrict(self, basis: Sequence[int]) -> "FinDimCoalgebra":
        if not self.is_subcoalgebra(basis):
            raise ValueError(f"span of basis vectors {list(basis)} is not a subcoalgebra")
        pos = {b: n for n, b in enumerate(basis)}
        e = len(basis)
        entries = {}
        for n, i in enumerate(basis):
            for r, c in self.delta.column(i).items():
                j, k = divmod(r, self.dim)
                entries[(n, pos[j], pos[k])] = c
        return FinDimCoalgebra(self.field, e, entries, [self.counit[0, b] for b in basis])


def _row(m: Matrix, n: int) -> list:
    return [m[0, j] for j in range(n)]


def trivial_coalgebra(field: Field) -> FinDimCoalgebra:
    return FinDimCoalgebra(field, 1, {(0, 0, 0): 1}, [1])


def grouplike_coalgebra(field: Field, n: int) -> FinDimCoalgebra:
    return FinDimCoalgebra(field, n, {(i, i, i): 1 for i in range(n)}, [1] * n)


def coalgebra_from_algebra(field: Field, dim: int, mult: dict, unit: Sequence) -> FinDimCoalgebra:
    """The dual coalgebra A* of an algebra with e_a e_b = Σ mult[(a, b, c)] e_c.

    Chosen so that dual_algebra(A*) reproduces ``mult``.
    """
    return FinDimCoalgebra(field, dim, {(c, b, a): v for (a, b, c), v in mult.items()}, unit)


def divided_power_coalgebra(field: Field, a: int) -> FinDimCoalgebra:
    """(k[x]/x^a)*: Δ(d_n) = Σ_{i+j=n} d_i ⊗ d_j, ε = d_0^*."""
    mu = {(n, i, n - i): 1 for n in range(a) for i in range(n + 1)}
    return FinDimCoalgebra(field, a, mu, [1] + [0] * (a - 1))


def upper_triangular_coalgebra(field: Field) -> FinDimCoalgebra:
    """Dual of the 2×2 upper-triangular matrices, basis e11, e12, e22."""
    mult = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 2, 1): 1, (2, 2, 2): 1}
    return coalgebra_from_algebra(field, 3, mult, [1, 0, 1])


def matrix_coalgebra(field: Field, n: int = 2) -> FinDimCoalgebra:
    """Δ(e_ij) = Σ_k e_ik ⊗ e_kj."""
    idx = lambda i, j: i * n + j
    mu = {(idx(i, j), idx(i, k), idx(k, j)): 1 for i in range(n) for j in range(n) for k in range(n)}
    return FinDimCoalgebra(field, n * n, mu, [1 if i == j else 0 for i in range(n) for j in range(n)])


def monomial_algebra_coalgebra(field: Field, monomials: Sequence[tuple]) -> FinDimCoalgebra:
    """Dual of k[x, y, ...]/I where ``monomials`` is the (order-ideal) standard basis."""
    basis = [tuple(m) for m in monomials]
    pos = {m: i for i, m in enumerate(basis)}
    mult = {}
    for a, ma in enumerate(basis):
        for b, mb in enumerate(basis):
            prod = tuple(x + y for x, y in zip(ma, mb))
            if prod in pos:
                mult[(a, b, pos[prod])] = 1
    unit = [1 if all(x == 0 for x in m) else 0 for m in basis]
    return coalgebra_from_algebra(field, len(basis), mult, unit)


@dataclass
class DualAlgebra:
    """Structure constants: f_a f_b = Σ_i mult[a][b][i] f_i, unit vector ``unit``."""

    field: Field
    dim: int
    mult: list
    unit: list

    def product(self, x: Sequence, y: Sequence) -> list:
        out = [self.field.zero] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                for i in range(self.dim):
                    c = self.mult[a][b][i]
                    if c:
                        out[i] = self.field(out[i] + xa * yb * c)
        return out

    def is_associative(self) -> bool:
        e = [[self.field.one if i == j else self.field.zero for i in range(self.dim)] for j in range(self.dim)]
        for a in e:
            for b in e:
                for c in e:
                    if self.product(self.product(a, b), c) != self.product(a, self.product(b, c)):
                        return False
        return all(self.product(self.unit, a) == a == self.product(a, self.unit) for a in e)


def dual_algebra(C: FinDimCoalgebra) -> DualAlgebra:
    n = C.dim
    mult = [[[C.mu(i, b, a) for i in range(n)] for b in range(n)] for a in range(n)]
    return DualAlgebra(C.field, n, mult, _row(C.counit, n))


def random_coalgebra(field: Field, rng: random.Random, max_dim: int = 4, basis_change: bool = True) -> FinDimCoalgebra:
    kinds = ["trivial", "grouplike", "divided", "upper", "matrix", "monomial"]
    while True:
        kind = rng.choice(kinds)
        if kind == "trivial":
            C = trivial_coalgebra(field)
        elif kind == "grouplike":
            C = grouplike_coalgebra(field, rng.randint(1, max_dim))
        elif kind == "divided":
            C = divided_power_coalgebra(field, rng.randint(1, max_dim))
        elif kind == "upper":
            C = upper_triangular_coalgebra(field)
        elif kind == "matrix":
            C = matrix_coalgebra(field, 2)
        else:
            C = monomial_algebra_coalgebra(field, rng.choice([[(0, 0), (1, 0), (0, 1)],
                                                              [(0, 0), (1, 0), (0, 1), (1, 1)]]))
        if C.dim <= max_dim:
            break
    if basis_change and C.dim > 1:
        C = C.change_basis(random_invertible(field, C.dim, rng))
    return C


# ---------------------------------------------------------------------------
# comodules


class FinDimComodule:
    """Left (ρ: M -> C ⊗ M) or right (ρ: M -> M ⊗ C) comodule."""

    def __init__(self, coalgebra: FinDimCoalgebra, dim: int, coaction: Matrix, side: str = "left",
                 check: bool = True):
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        self.coalgebra = coalgebra
        self.field = coalgebra.field
        self.dim = dim
        self.coaction = coaction
        self.side = side
        if coaction.shape != (coalgebra.dim * dim, dim):
            raise ValueError("coaction has the wrong shape")
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"FinDimComodule({self.side}, dim={self.dim})"

    def validate(self) -> None:
        C = self.coalgebra
        Ic, Im = C.identity(), Matrix.identity(self.field, self.dim)
        r = self.coaction
        if self.side == "left":
            ok = C.delta.kron(Im) @ r == Ic.kron(r) @ r and C.counit.kron(Im) @ r == Im
        else:
            ok = r.kron(Ic) @ r == Im.kron(C.delta) @ r and Im.kron(C.counit) @ r == Im
        if not ok:
            raise ValueError(f"{self.side} coaction axioms fail")

    def act_dual(self, f: Sequence) -> Matrix:
        """The C*-action of f (left: f·m = f(m_(-1)) m_(0); right: m·f = m_(0) f(m_(1)))."""
        fm = Matrix.from_rows(self.field, [list(f)], ncols=self.coalgebra.dim)
        Im = Matrix.identity(self.field, self.dim)
        if self.side == "left":
            return fm.kron(Im) @ self.coaction
        return Im.kron(fm) @ self.coaction

    def submodule(self, basis: Matrix) -> tuple["FinDimComodule", Matrix]:
        """Subcomodule spanned by the columns of ``basis`` (must be stable)."""
        C = self.coalgebra
        big = Matrix.identity(self.field, C.dim).kron(basis) if self.side == "left" else basis.kron(
            Matrix.identity(self.field, C.dim))
        image = self.coaction @ basis
        coact = solve(big, image)
        return FinDimComodule(C, basis.ncols, coact, self.side), basis

    def quotient(self, sub: Matrix) -> tuple["FinDimComodule", Matrix]:
        q = Quotient.of_columns(sub)
        C = self.coalgebra
        Ic = Matrix.identity(self.field, C.dim)
        proj = q.project
        big = Ic.kron(proj) if self.side == "left" else proj.kron(Ic)
        coact = big @ self.coaction @ q.lift
        return FinDimComodule(C, q.dim, coact, self.side), proj

    def change_basis(self, P: Matrix) -> "FinDimComodule":
        Q = inverse(P)
        Ic = self.coalgebra.identity()
        big = Ic.kron(Q) if self.side == "left" else Q.kron(Ic)
        return FinDimComodule(self.coalgebra, self.dim, big @ self.coaction @ P, self.side)

    def generated_by(self, vectors: Matrix) -> Matrix:
        """Basis of the smallest subcomodule containing the columns of ``vectors``."""
        C = self.coalgebra
        cols = []
        for j in range(vectors.ncols):
            v = Matrix.from_columns(self.field, self.dim, [vectors.column(j)])
            for i in range(C.dim):
                f = [self.field.one if t == i else self.field.zero for t in range(C.dim)]
                cols.append((self.act_dual(f) @ v).column(0))
        m = Matrix.from_columns(self.field, self.dim, cols)
        return m.select_cols(m.pivot_columns())


def cofree_left(C: FinDimCoalgebra, v: int) -> FinDimComodule:
    """C ⊗ V with ρ = Δ ⊗ id."""
    return FinDimComodule(C, C.dim * v, C.delta.kron(Matrix.identity(C.field, v)), "left")


def cofree_right(C: FinDimCoalgebra, v: int) -> FinDimComodule:
    """V ⊗ C with ρ = id ⊗ Δ."""
    return FinDimComodule(C, v * C.dim, Matrix.identity(C.field, v).kron(C.delta), "right")


def regular_right(C: FinDimCoalgebra) -> FinDimComodule:
    return FinDimComodule(C, C.dim, C.delta, "right")


def regular_left(C: FinDimCoalgebra) -> FinDimComodule:
    return FinDimComodule(C, C.dim, C.delta, "left")


def _vec(m: Matrix) -> dict:
    """Row-major vectorization as a sparse column."""
    return {r * m.ncols + c: x for r, row in enumerate(m.rows) for c, x in row.items()}


def _unit_matrix(F: Field, rows: int, cols: int, r: int, c: int) -> Matrix:
    return Matrix.from_dict(F, rows, cols, {(r, c): F.one})


def _matrix_of(F: Field, out_dim: int, in_shape: tuple[int, int], fn) -> Matrix:
    """Matrix of a linear map on (in_shape) matrices, columns indexed row-major."""
    rows, cols = in_shape
    out = [_vec(fn(_unit_matrix(F, rows, cols, r, c))) for r in range(rows) for c in range(cols)]
    return Matrix.from_columns(F, out_dim, out)


def _same_coalgebra(*objs) -> None:
    first = objs[0].coalgebra
    for o in objs[1:]:
        if o.coalgebra is not first:
            raise ValueError("objects live over different coalgebras")


def hom_comodules(L: FinDimComodule, M: FinDimComodule) -> Matrix:
    """Basis (vectorized columns, index m * dim L + l) of comodule maps L -> M."""
    _same_coalgebra(L, M)
    if L.side != M.side:
        raise ValueError("comodules on different sides")
    F, C = L.field, L.coalgebra
    Ic = C.identity()

    def defect(f: Matrix) -> Matrix:
        lifted = Ic.kron(f) if L.side == "left" else f.kron(Ic)
        return M.coaction @ f - lifted @ L.coaction

    return kernel_basis(_matrix_of(F, C.dim * M.dim * L.dim, (M.dim, L.dim), defect))


# ---------------------------------------------------------------------------
# contramodules


class FinDimContramodule:
    """Left contramodule: π: Hom_k(C, P) -> P as a dim × (dim C · dim) matrix.

    Column ``i * dim + q`` is π of the map c_i -> p_q.
    """

    def __init__(self, coalgebra: FinDimCoalgebra, dim: int, contraaction: Matrix, check: bool = True):
        self.coalgebra = coalgebra
        self.field = coalgebra.field
        self.dim = dim
        self.contraaction = contraaction
        if contraaction.shape != (dim, coalgebra.dim * dim):
            raise ValueError("contraaction has the wrong shape")
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"FinDimContramodule(dim={self.dim})"

    def unit_map(self) -> Matrix:
        """P -> Hom(C, P), p -> (c -> ε(c) p)."""
        C, n = self.coalgebra, self.dim
        ent = {}
        for i in range(C.dim):
            e = C.counit[0, i]
            if e:
                for q in range(n):
                    ent[(i * n + q, q)] = e
        return Matrix.from_dict(self.field, C.dim * n, n, ent)

    def hom_lift(self, g: Matrix) -> Matrix:
        """Hom(C, g): Hom(C, P) -> Hom(C, P') for g: P -> P'."""
        return self.coalgebra.identity().kron(g)

    def validate(self) -> None:
        C, n, F = self.coalgebra, self.dim, self.field
        Pi = self.contraaction
        if Pi @ self.unit_map() != Matrix.identity(F, n):
            raise ValueError("contraunit axiom fails")
        d = C.dim
        # Hom(C⊗C, P) basis (j, k, q): c_j ⊗ c_k -> p_q
        via_delta, via_nested = {}, {}
        for j in range(d):
            for k in range(d):
                for q in range(n):
                    col = (j * d + k) * n + q
                    for i in range(d):
                        c = C.mu(i, j, k)
                        if c:
                            via_delta[(i * n + q, col)] = c
                    # G(c_k) = (c_j -> p_q), then Hom(C, π): c_k -> π(E_{j,q})
                    for r, x in Pi.column(j * n + q).items():
                        via_nested[(k * n + r, col)] = x
        A = Matrix.from_dict(F, d * n, d * d * n, via_delta)
        B = Matrix.from_dict(F, d * n, d * d * n, via_nested)
        if Pi @ A != Pi @ B:
            raise ValueError("contraassociativity fails")

    def act_dual(self, f: Sequence) -> Matrix:
        """Left C*-action f·p = π(f ⊗ p)."""
        d, n = self.coalgebra.dim, self.dim
        ent = {}
        for i, fi in enumerate(f):
            if fi:
                for q in range(n):
                    ent[(i * n + q, q)] = fi
        return self.contraaction @ Matrix.from_dict(self.field, d * n, n, ent)

    def change_basis(self, P: Matrix) -> "FinDimContramodule":
        Q = inverse(P)
        return FinDimContramodule(self.coalgebra, self.dim, Q @ self.contraaction @ self.hom_lift(P))

    def generated_by(self, vectors: Matrix) -> Matrix:
        """Basis of the subcontramodule (= C*-submodule) generated by the columns."""
        F, d = self.field, self.coalgebra.dim
        basis = vectors.select_cols(vectors.pivot_columns())
        while True:
            cols = list(basis.columns())
            for i in range(d):
                f = [F.one if t == i else F.zero for t in range(d)]
                cols.extend((self.act_dual(f) @ basis).columns())
            m = Matrix.from_columns(F, self.dim, cols)
            m = m.select_cols(m.pivot_columns())
            if m.ncols == basis.ncols:
                return m
            basis = m

    def submodule(self, basis: Matrix) -> tuple["FinDimContramodule", Matrix]:
        lifted = self.hom_lift(basis)
        Pi = solve(basis, self.contraaction @ lifted)
        return FinDimContramodule(self.coalgebra, basis.ncols, Pi), basis

    def quotient(self, sub: Matrix) -> tuple["FinDimContramodule", Matrix]:
        q = Quotient.of_columns(sub)
        Pi = q.project @ self.contraaction @ self.hom_lift(q.lift)
        return FinDimContramodule(self.coalgebra, q.dim, Pi), q.project


def free_contramodule(C: FinDimCoalgebra, v: int) -> FinDimContramodule:
    """Hom_k(C, V), basis (j, t): c_j -> v_t, with π(g) = g ∘ Δ under G(c'')(c') = g(c' ⊗ c'')."""
    d = C.dim
    n = d * v
    ent = {}
    # basis of Hom(C, Hom(C, V)): E_{i, (j, t)}: c_i -> (c_j -> v_t), i.e. g(c_j ⊗ c_i) = v_t
    for i in range(d):
        for j in range(d):
            for t in range(v):
                col = i * n + j * v + t
                for l in range(d):
                    c = C.mu(l, j, i)
                    if c:
                        ent[(l * v + t, col)] = c
    return FinDimContramodule(C, n, Matrix.from_dict(C.field, n, d * n, ent))


def contramodule_from_dual_module(C: FinDimCoalgebra, dim: int, actions: Sequence[Matrix]) -> FinDimContramodule:
    """Left C*-module (f_i acting by actions[i]) as a contramodule."""
    ent = {}
    for i, a in enumerate(actions):
        for r, row in enumerate(a.rows):
            for q, x in row.items():
                ent[(r, i * dim + q)] = x
    return FinDimContramodule(C, dim, Matrix.from_dict(C.field, dim, C.dim * dim, ent))


def hom_contramodules(P: FinDimContramodule, Q: FinDimContramodule) -> Matrix:
    """Basis (vectorized, index q * dim P + p) of contramodule maps P -> Q."""
    _same_coalgebra(P, Q)
    F = P.field

    def defect(f: Matrix) -> Matrix:
        return f @ P.contraaction - Q.contraaction @ P.hom_lift(f)

    return kernel_basis(_matrix_of(F, Q.dim * P.coalgebra.dim * P.dim, (Q.dim, P.dim), defect))


# ---------------------------------------------------------------------------
# bicomodules


class FinDimBicomodule:
    """C-D-bicomodule: left C-coaction and right D-coaction that commute."""

    def __init__(self, left: FinDimCoalgebra, right: FinDimCoalgebra, dim: int, left_coaction: Matrix,
                 right_coaction: Matrix, check: bool = True):
        self.left = FinDimComodule(left, dim, left_coaction, "left", check)
        self.right = FinDimComodule(right, dim, right_coaction, "right", check)
        self.dim = dim
        self.field = left.field
        if check:
            self.validate()

    def validate(self) -> None:
        Ic, Id = self.left.coalgebra.identity(), self.right.coalgebra.identity()
        a = Ic.kron(self.right.coaction) @ self.left.coaction
        b = self.left.coaction.kron(Id) @ self.right.coaction
        if a != b:
            raise ValueError("left and right coactions do not commute")


def cofree_bicomodule(C: FinDimCoalgebra, D: FinDimCoalgebra, v: int = 1) -> FinDimBicomodule:
    """C ⊗ V ⊗ D with Δ_C on the left and Δ_D on the right."""
    F = C.field
    Iv, Ic, Id = Matrix.identity(F, v), C.identity(), D.identity()
    return FinDimBicomodule(C, D, C.dim * v * D.dim, C.delta.kron(Iv.kron(Id)), Ic.kron(Iv).kron(D.delta))


def regular_bicomodule(C: FinDimCoalgebra) -> FinDimBicomodule:
    return FinDimBicomodule(C, C, C.dim, C.delta, C.delta)


# ---------------------------------------------------------------------------
# tensor calculus


@dataclass
class SpaceResult:
    """A subspace (kernel) or quotient (cokernel) with its basis data."""

    dim: int
    basis: Matrix | None = None          # kernel: columns in the ambient space
    projection: Matrix | None = None     # cokernel: ambient -> quotient
    ambient: int = 0


def cotensor(N: FinDimComodule, M: FinDimComodule) -> SpaceResult:
    """N □_C M = ker(ρ_N ⊗ id - id ⊗ ρ_M) inside N ⊗ M."""
    _same_coalgebra(N, M)
    if N.side != "right" or M.side != "left":
        raise ValueError("cotensor needs a right and a left comodule")
    F = N.field
    In, Im = Matrix.identity(F, N.dim), Matrix.identity(F, M.dim)
    diff = N.coaction.kron(Im) - In.kron(M.coaction)
    k = kernel_basis(diff)
    return SpaceResult(k.ncols, basis=k, ambient=N.dim * M.dim)


def _contratensor_relations(N: FinDimComodule, P: FinDimContramodule) -> Matrix:
    """Image of N ⊗ Hom(D, P) ⇉ N ⊗ P (difference of the two maps)."""
    F, d, n, p = N.field, N.coalgebra.dim, N.dim, P.dim
    ent = {}
    # n ⊗ E_{i,q} -> Σ_{n'} ρ[n' d + i][n] n' ⊗ p_q
    for nn in range(n):
        for r, x in N.coaction.column(nn).items():
            n2, i = divmod(r, d)
            for q in range(p):
                key = (n2 * p + q, nn * (d * p) + i * p + q)
                ent[key] = F(ent.get(key, 0) + x)
    first = Matrix.from_dict(F, n * p, n * d * p, {k: v for k, v in ent.items() if v})
    second = Matrix.identity(F, n).kron(P.contraaction)
    return first - second


def contratensor(N: FinDimComodule, P: FinDimContramodule) -> SpaceResult:
    """N ⊙_D P = coker(N ⊗ Hom(D, P) ⇉ N ⊗ P)."""
    _same_coalgebra(N, P)
    if N.side != "right":
        raise ValueError("contratensor needs a right comodule")
    q = Quotient.of_columns(_contratensor_relations(N, P))
    return SpaceResult(q.dim, projection=q.project, ambient=N.dim * P.dim)


def cohom(M: FinDimComodule, P: FinDimContramodule) -> SpaceResult:
    """Cohom_D(M, P) = coker(Hom(D ⊗ M, P) ⇉ Hom(M, P)), Hom(M, P) indexed m * dim P + q."""
    _same_coalgebra(M, P)
    if M.side != "left":
        raise ValueError("cohom needs a left comodule")
    F, d, m, p = M.field, M.coalgebra.dim, M.dim, P.dim
    ent = {}
    for i in range(d):
        for m2 in range(m):
            for q in range(p):
                col = (i * m + m2) * p + q
                # g ∘ ρ_M: m -> ρ[i m + m2][m] p_q
                for mm in range(m):
                    x = M.coaction[i * m + m2, mm]
                    if x:
                        key = (mm * p + q, col)
                        ent[key] = F(ent.get(key, 0) + x)
                # m2 -> π(E_{i,q})
                for r, x in P.contraaction.column(i * p + q).items():
                    key = (m2 * p + r, col)
                    ent[key] = F(ent.get(key, 0) - x)
    rel = Matrix.from_dict(F, m * p, d * m * p, {k: v for k, v in ent.items() if v})
    q = Quotient.of_columns(rel)
    return SpaceResult(q.dim, projection=q.project, ambient=m * p)


def tensor_over_dual(N: FinDimComodule, P: FinDimContramodule) -> SpaceResult:
    """N ⊗_{D*} P with N a right D*-module and P a left D*-module (the oracle for ⊙)."""
    _same_coalgebra(N, P)
    F, d = N.field, N.coalgebra.dim
    In, Ip = Matrix.identity(F, N.dim), Matrix.identity(F, P.dim)
    blocks = []
    for i in range(d):
        f = [F.one if t == i else F.zero for t in range(d)]
        # n·f ⊗ p - n ⊗ f·p; right action on row-major N ⊗ P
        blocks.append(N.act_dual(f).kron(Ip) - In.kron(P.act_dual(f)))
    q = Quotient.of_columns(Matrix.hstack(F, N.dim * P.dim, blocks))
    return SpaceResult(q.dim, projection=q.project, ambient=N.dim * P.dim)


# ---------------------------------------------------------------------------
# E-parts


def _check_sub(C: FinDimCoalgebra, E: Sequence[int]) -> list[int]:
    E = sorted(set(E))
    if any(e < 0 or e >= C.dim for e in E):
        raise ValueError("subcoalgebra basis index out of range")
    if not C.is_subcoalgebra(E):
        raise ValueError(f"span of basis vectors {E} is not a subcoalgebra")
    return E


def subcoalgebra_as_right_comodule(C: FinDimCoalgebra, E: Sequence[int]) -> FinDimComodule:
    """E with the right C-coaction Δ|_E: E -> E ⊗ C."""
    E = _check_sub(C, E)
    pos = {b: n for n, b in enumerate(E)}
    ent = {}
    for n, i in enumerate(E):
        for r, x in C.delta.column(i).items():
            j, k = divmod(r, C.dim)
            ent[(pos[j] * C.dim + k, n)] = x
    return FinDimComodule(C, len(E), Matrix.from_dict(C.field, len(E) * C.dim, len(E), ent), "right")


def subcoalgebra_as_left_comodule(C: FinDimCoalgebra, E: Sequence[int]) -> FinDimComodule:
    E = _check_sub(C, E)
    pos = {b: n for n, b in enumerate(E)}
    ent = {}
    for n, i in enumerate(E):
        for r, x in C.delta.column(i).items():
            j, k = divmod(r, C.dim)
            ent[(j * len(E) + pos[k], n)] = x
    return FinDimComodule(C, len(E), Matrix.from_dict(C.field, C.dim * len(E), len(E), ent), "left")


def max_subcomodule(E: Sequence[int], M: FinDimComodule) -> tuple[FinDimComodule, Matrix]:
    """_E M: the preimage of E ⊗ M under ρ_M, with its inclusion into M.

    Also checks dim _E M = dim E □_C M.
    """
    C = M.coalgebra
    E = _check_sub(C, E)
    if M.side != "left":
        raise ValueError("max_subcomodule expects a left comodule")
    outside = [i for i in range(C.dim) if i not in set(E)]
    rows = [i * M.dim + m for i in outside for m in range(M.dim)]
    incl = kernel_basis(M.coaction.select_rows(rows)) if rows else Matrix.identity(M.field, M.dim)
    sub, _ = M.submodule(incl) if incl.ncols else (FinDimComodule(C, 0, Matrix.zeros(M.field, 0, 0), "left"), incl)
    other = cotensor(subcoalgebra_as_right_comodule(C, E), M).dim if E else 0
    if other != sub.dim:
        raise AssertionError(f"_E M has dim {sub.dim} but E □ M has dim {other}")
    return sub, incl


def max_quotient_contramodule(E: Sequence[int], P: FinDimContramodule) -> tuple[FinDimContramodule, Matrix]:
    """^E P = P / π(Hom(D/E, P)), with its projection; checks dim = Cohom_D(E, P)."""
    D = P.coalgebra
    E = _check_sub(D, E)
    outside = [i for i in range(D.dim) if i not in set(E)]
    cols = [i * P.dim + q for i in outside for q in range(P.dim)]
    image = P.contraaction.select_cols(cols) if cols else Matrix.zeros(P.field, P.dim, 0)
    quo, proj = P.quotient(image)
    other = cohom(subcoalgebra_as_left_comodule(D, E), P).dim if E else 0
    if other != quo.dim:
        raise AssertionError(f"^E P has dim {quo.dim} but Cohom(E, P) has dim {other}")
    return quo, proj


# ---------------------------------------------------------------------------
# adjunction


def _hom_comodule_contraaction(K: FinDimBicomodule, M: FinDimComodule, H: Matrix) -> Matrix:
    """Contraaction on Hom_C(K, M) (columns of H in vectorized Hom_k(K, M)).

    π(g)(k) = Σ g(k_(1))(k_(0)) for g in Hom(D, Hom_C(K, M)).
    """
    F = K.field
    D = K.right.coalgebra
    k_dim, m_dim, h = K.dim, M.dim, H.ncols
    d = D.dim
    # basis E_{i, t}: d_i -> H[:, t]; value at k: Σ_{k', j} ρ[k' d + j][k] [j == i] H_t(k')
    cols = []
    for i in range(d):
        for t in range(h):
            g = H.column(t)
            out = {}
            for kk in range(k_dim):
                for r, x in K.right.coaction.column(kk).items():
                    k2, j = divmod(r, d)
                    if j != i:
                        continue
                    for mm in range(m_dim):
                        y = g.get(mm * k_dim + k2)
                        if y:
                            key = mm * k_dim + kk
                            out[key] = F(out.get(key, 0) + x * y)
            cols.append({k: v for k, v in out.items() if v})
    full = Matrix.from_columns(F, m_dim * k_dim, cols)
    return solve(H, full)


@dataclass
class AdjunctionReport:
    lhs_dim: int
    rhs_dim: int
    canonical_bijective: bool

    @property
    def passed(self) -> bool:
        return self.lhs_dim == self.rhs_dim and self.canonical_bijective


def adjunction_check(K: FinDimBicomodule, M: FinDimComodule, P: FinDimContramodule) -> AdjunctionReport:
    """Hom_C(K ⊙_D P, M) ≅ Hom^D(P, Hom_C(K, M)).

    Both sides are embedded in Hom_k(K ⊗ P, M) (currying) and compared as
    subspaces; the canonical map is the identity there.
    """
    C, D = K.left.coalgebra, K.right.coalgebra
    if M.coalgebra is not C or P.coalgebra is not D or M.side != "left":
        raise ValueError("adjunction needs K over (C, D), a left C-comodule M and a D-contramodule P")
    F = K.field
    kd, pd, md = K.dim, P.dim, M.dim
    amb = md * kd * pd
    # left side: the contratensor with its induced left C-coaction
    ct = contratensor(K.right, P)
    proj, lift = ct.projection, Quotient.of_columns(_contratensor_relations(K.right, P)).lift
    Ip, Ic = Matrix.identity(F, pd), C.identity()
    coact = Ic.kron(proj) @ K.left.coaction.kron(Ip) @ lift
    Q = FinDimComodule(C, ct.dim, coact, "left")
    homQ = hom_comodules(Q, M)
    lhs_cols = []
    for t in range(homQ.ncols):
        g = _unvec(F, homQ.column(t), md, ct.dim)
        lhs_cols.append(_vec(g @ proj))
    lhs = Matrix.from_columns(F, amb, lhs_cols)
    # right side: Hom_C(K, M) with its contraaction, then contramodule maps from P
    H = hom_comodules(K.left, M)
    HP = FinDimContramodule(D, H.ncols, _hom_comodule_contraaction(K, M, H))
    homPH = hom_contramodules(P, HP)
    rhs_cols = []
    for t in range(homPH.ncols):
        h = _unvec(F, homPH.column(t), HP.dim, pd)       # P -> H coordinates
        full = H @ h                                      # column p: vec of a map K -> M
        f = {}
        for p_, col in enumerate(full.columns()):
            for idx, x in col.items():
                mm, kk = divmod(idx, kd)
                f[mm * (kd * pd) + kk * pd + p_] = x
        rhs_cols.append(f)
    rhs = Matrix.from_columns(F, amb, rhs_cols)
    return AdjunctionReport(lhs.rank(), rhs.rank(), _rank_equal_spans(lhs, rhs))


def _unvec(F: Field, v: dict, rows: int, cols: int) -> Matrix:
    return Matrix.from_dict(F, rows, cols, {divmod(k, cols): x for k, x in v.items()})


# ---------------------------------------------------------------------------
# universal properties and bridges


@dataclass
class UniversalPropertyReport:
    comodule_side: tuple
    contramodule_side: tuple

    @property
    def passed(self) -> bool:
        return self.comodule_side[0] == self.comodule_side[1] and self.comodule_side[2] and \
            self.contramodule_side[0] == self.contramodule_side[1] and self.contramodule_side[2]


def universal_property_checks(C: FinDimCoalgebra, v: int, L: FinDimComodule, Q: FinDimContramodule) -> UniversalPropertyReport:
    """Hom_C(L, C ⊗ V) ≅ Hom_k(L, V) via ε ⊗ id, and Hom^C(Hom(C, V), Q) ≅ Hom_k(V, Q) via the unit."""
    F = C.field
    cof = cofree_left(C, v)
    H = hom_comodules(L, cof)
    eps = C.counit.kron(Matrix.identity(F, v))
    imgs = [_vec(eps @ _unvec(F, H.column(t), cof.dim, L.dim)) for t in range(H.ncols)]
    r1 = Matrix.from_columns(F, v * L.dim, imgs).rank()
    com = (H.ncols, v * L.dim, r1 == H.ncols == v * L.dim)
    fr = free_contramodule(C, v)
    H2 = hom_contramodules(fr, Q)
    # V -> Hom(C, V), v -> (c -> ε(c) v)
    unit = Matrix.from_dict(F, C.dim * v, v, {(i * v + t, t): C.counit[0, i]
                                              for i in range(C.dim) for t in range(v) if C.counit[0, i]})
    imgs2 = [_vec(_unvec(F, H2.column(t), Q.dim, fr.dim) @ unit) for t in range(H2.ncols)]
    r2 = Matrix.from_columns(F, Q.dim * v, imgs2).rank()
    con = (H2.ncols, Q.dim * v, r2 == H2.ncols == Q.dim * v)
    return UniversalPropertyReport(com, con)


def comodule_from_torsion_module(E: FinDimCoalgebra, x_action: Matrix) -> FinDimComodule:
    """k[x]-module with x^n = 0 as a left comodule over (k[x]/x^n)*: ρ(m) = Σ_i d_i ⊗ x^i m."""
    F = E.field
    n, m = E.dim, x_action.nrows
    blocks = [x_action.power(i) for i in range(n)]
    return FinDimComodule(E, m, Matrix.vstack(F, m, blocks), "left")


def torsion_module_from_comodule(M: FinDimComodule) -> Matrix:
    """Recover the x-action: x·m is the d_1 component of ρ(m)."""
    n = M.coalgebra.dim
    f = [M.field.one if i == 1 else M.field.zero for i in range(n)]
    return M.act_dual(f)


# ---------------------------------------------------------------------------
# random instances


def random_left_comodule(C: FinDimCoalgebra, rng: random.Random, max_dim: int = 4) -> FinDimComodule:
    """A subcomodule or quotient of a small cofree comodule, dim in [1, max_dim]."""
    F = C.field
    for _ in range(50):
        cof = cofree_left(C, rng.randint(1, 2))
        gens = random_matrix(F, cof.dim, rng.randint(1, 2), rng)
        if gens.is_zero():
            continue
        basis = cof.generated_by(gens)
        sub, _ = cof.submodule(basis)
        if sub.dim > max_dim:
            # a quotient of the generated subcomodule by a random subcomodule
            g2 = random_matrix(F, sub.dim, 1, rng)
            kill = sub.generated_by(g2)
            sub, _ = sub.quotient(kill)
        if 1 <= sub.dim <= max_dim:
            return sub.change_basis(random_invertible(F, sub.dim, rng)) if sub.dim > 1 else sub
    return _trivial_comodule(C)


def _trivial_comodule(C: FinDimCoalgebra) -> FinDimComodule:
    """Fallback: the subcomodule of C generated by its first basis vector."""
    F = C.field
    reg = regular_left(C)
    basis = reg.generated_by(Matrix.identity(F, C.dim).select_cols([0]))
    sub, _ = reg.submodule(basis)
    return sub


def random_contramodule(D: FinDimCoalgebra, rng: random.Random, max_dim: int = 4) -> FinDimContramodule:
    """A subcontramodule or quotient of a small free contramodule."""
    F = D.field
    for _ in range(50):
        fr = free_contramodule(D, rng.randint(1, 2))
        gens = random_matrix(F, fr.dim, 1, rng)
        if gens.is_zero():
            continue
        P, _ = fr.submodule(fr.generated_by(gens))
        if P.dim > max_dim:
            kill = P.generated_by(random_matrix(F, P.dim, 1, rng))
            P, _ = P.quotient(kill)
        if 1 <= P.dim <= max_dim:
            return P.change_basis(random_invertible(F, P.dim, rng)) if P.dim > 1 else P
    fr = free_contramodule(D, 1)
    return fr


# ---------------------------------------------------------------------------
# randomized suite


@dataclass
class CoalgSuiteReport:
    seed: int
    field: str
    instances: list

    @property
    def passed(self) -> bool:
        return all(inst["ok"] for inst in self.instances)

    @property
    def failures(self) -> list:
        return [inst for inst in self.instances if not inst["ok"]]

    def records(self, task: str = "coalg-verify") -> list[dict]:
        q = {"seed": self.seed, "field": self.field, "count": len(self.instances)}
        out = [{"task": task, "i": None, "d": None, "level": k, **inst, "qualification": q}
               for k, inst in enumerate(self.instances)]
        out.append({"task": task, "i": None, "d": None, "level": None, "passed": self.passed,
                    "failures": [inst["index"] for inst in self.failures], "qualification": q})
        return out


def coalg_instance(F: Field, rng: random.Random, index: int = 0, max_dim: int = 4) -> dict:
    """One random instance: adjunction, cofree/free identities, ⊙ against ⊗ over the dual algebra."""
    C = random_coalgebra(F, rng, max_dim)
    if rng.random() < 0.3:
        D, K = C, regular_bicomodule(C)
    else:
        D = random_coalgebra(F, rng, max_dim)
        K = cofree_bicomodule(C, D, 1)
    M = random_left_comodule(C, rng, max_dim)
    P = random_contramodule(D, rng, max_dim)
    N = cofree_right(D, 1) if rng.random() < 0.5 else random_left_comodule(D, rng, max_dim)
    if N.side != "right":
        N = regular_right(D)
    v = rng.randint(1, 2)
    adj = adjunction_check(K, M, P)
    ident = {
        "cotensor_cofree": [cotensor(N, cofree_left(D, v)).dim, N.dim * v],
        "contratensor_free": [contratensor(N, free_contramodule(D, v)).dim, N.dim * v],
        "cohom_cofree": [cohom(cofree_left(D, v), P).dim, v * P.dim],
        "cohom_free": [cohom(cofree_left(D, 1), free_contramodule(D, v)).dim, D.dim * v],
    }
    ct, to = contratensor(N, P).dim, tensor_over_dual(N, P).dim
    ok = adj.passed and all(a == b for a, b in ident.values()) and ct == to
    return {"index": index, "dims": {"C": C.dim, "D": D.dim, "M": M.dim, "P": P.dim, "N": N.dim},
            "adjunction": [adj.lhs_dim, adj.rhs_dim, adj.canonical_bijective],
            "identities": ident, "contratensor": [ct, to], "ok": bool(ok)}


def coalg_suite(seed: int = 0, count: int = 100, field: Field | None = None, max_dim: int = 4) -> CoalgSuiteReport:
    from .linalg import GF
    F = field or GF(101)
    rng = random.Random(seed)
    return CoalgSuiteReport(seed, str(F), [coalg_instance(F, rng, k, max_dim) for k in range(count)])
