"""Module backends.

``GradedFPModule`` is a cokernel of a homogeneous polynomial matrix between
graded free modules and is only ever looked at one degree at a time.
``FinDimModule`` is a finite-dimensional module given by commuting action
matrices, one per ring variable.

Finite-dimensional contramodules.  An s-contramodule is a module on which
every system ``q_n = s q_{n+1} + p_n`` has a unique solution.  In finite
dimension split M by Fitting along s: on the part where s is invertible the
module is an R[1/s]-module, so Hom(R[1/s], M) is nonzero and the condition
fails; on the nilpotent part the system is solved by a finite sum.  So a
finite-dimensional module is an I-contramodule exactly when every
generator of I acts nilpotently, which is also the torsion condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .linalg import Matrix, Quotient, kernel_basis, solve
from .ring import GeneratingSequence, MonomialQuotientRing, Polynomial, ideal_power_generators
from .towers import Tower


# ---------------------------------------------------------------------------
# graded finitely presented modules


@dataclass(frozen=True)
class DegreePiece:
    """One graded piece ``M_d`` with its chosen basis.

    ``labels`` lists ``(generator, monomial)`` pairs of the free cover that
    survive as the deterministic complement of the relations.
    """

    module: "GradedFPModule"
    degree: int
    free_dim: int
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def labels(self) -> list:
        flat = self.module.free_labels(self.degree)
        return [flat[q] for q in self.quotient.basis]

    def outgoing(self, f: Polynomial) -> Matrix:
        return self.module.act(f, self.degree)

    def incoming(self, f: Polynomial) -> Matrix:
        return self.module.act(f, self.degree - f.degree)


class GradedFPModule:
    """coker(relations: ⊕ R(-e_k) -> ⊕ R(-g_i)).

    ``relations`` is a list of columns; column k is a sequence of ring
    elements, one per generator, homogeneous of degree ``e_k - g_i``.
    """

    def __init__(self, ring: MonomialQuotientRing, generator_degrees: Sequence[int],
                 relations: Iterable[Sequence] = (), relation_degrees: Sequence[int] | None = None):
        self.ring = ring
        self.generator_degrees = tuple(int(g) for g in generator_degrees)
        rels = []
        for col in relations:
            col = tuple(c if isinstance(c, Polynomial) else ring.one() * c for c in col)
            if len(col) != self.ngens:
                raise ValueError("relation length must equal the number of generators")
            rels.append(col)
        if relation_degrees is None:
            relation_degrees = []
            for col in rels:
                if any(c.degree is None for c in col if not c.is_zero()):
                    raise ValueError("relation entries must be homogeneous")
                degs = {c.degree + g for c, g in zip(col, self.generator_degrees) if not c.is_zero()}
                if len(degs) > 1:
                    raise ValueError("relation column is not homogeneous")
                relation_degrees.append(degs.pop() if degs else 0)
        self.relation_degrees = tuple(int(e) for e in relation_degrees)
        if len(self.relation_degrees) != len(rels):
            raise ValueError("one degree per relation")
        for col, e in zip(rels, self.relation_degrees):
            for c, g in zip(col, self.generator_degrees):
                if not c.is_zero() and c.degree != e - g:
                    raise ValueError(f"relation entry {c} has degree {c.degree}, expected {e - g}")
        self.relations = tuple(rels)
        self._pieces: dict[int, DegreePiece] = {}
        self._labels: dict[int, list] = {}

    @classmethod
    def free(cls, ring: MonomialQuotientRing, generator_degrees: Sequence[int]) -> "GradedFPModule":
        return cls(ring, generator_degrees)

    @classmethod
    def monomial_quotient(cls, ring: MonomialQuotientRing, monomials: Sequence[Sequence[int]], shift: int = 0):
        """Cyclic module R/(monomials) generated in degree ``shift``."""
        rels = [(ring.monomial(m),) for m in monomials]
        return cls(ring, [shift], rels)

    @property
    def ngens(self) -> int:
        return len(self.generator_degrees)

    @property
    def is_free(self) -> bool:
        return not self.relations

    @property
    def relation_matrix(self) -> list[list[Polynomial]]:
        return [[col[i] for col in self.relations] for i in range(self.ngens)]

    def __repr__(self) -> str:
        return f"GradedFPModule(gens={list(self.generator_degrees)}, rels={len(self.relations)})"

    # -- degree pieces ------------------------------------------------------
    def _offsets(self, d: int) -> list[int]:
        offs = [0]
        for g in self.generator_degrees:
            offs.append(offs[-1] + self.ring.dim(d - g))
        return offs

    def free_labels(self, d: int) -> list:
        if d not in self._labels:
            self._labels[d] = [(i, m) for i, g in enumerate(self.generator_degrees)
                               for m in self.ring.degree_basis(d - g)]
        return self._labels[d]

    def free_dim(self, d: int) -> int:
        return self._offsets(d)[-1]

    def _free_vector(self, col: Sequence[Polynomial], u: tuple, d: int, offs: list[int]) -> dict:
        """Coordinates in F_d of ``col * u``."""
        ring = self.ring
        p = ring.field.characteristic
        v: dict = {}
        for i, c in enumerate(col):
            if c is None or c.is_zero():
                continue
            idx = ring.index(d - self.generator_degrees[i])
            for m, a in c.terms.items():
                j = idx.get(tuple(x + y for x, y in zip(m, u)))
                if j is None:
                    continue
                k = offs[i] + j
                x = v.get(k, 0) + a
                if p:
                    x %= p
                if x:
                    v[k] = x
                else:
                    v.pop(k, None)
        return v

    def piece(self, d: int) -> DegreePiece:
        if d in self._pieces:
            return self._pieces[d]
        offs = self._offsets(d)
        gens = []
        for col, e in zip(self.relations, self.relation_degrees):
            for u in self.ring.degree_basis(d - e):
                v = self._free_vector(col, u, d, offs)
                if v:
                    gens.append(v)
        pc = DegreePiece(self, d, offs[-1], Quotient(self.ring.field, offs[-1], gens))
        self._pieces[d] = pc
        return pc

    def dim(self, d: int) -> int:
        return self.piece(d).dim

    def act(self, f: Polynomial, d: int) -> Matrix:
        """Multiplication by f from M_d to M_{d + deg f}."""
        e = f.degree
        if e is None:
            raise ValueError("acting element must be homogeneous and nonzero")
        src = self.piece(d)
        tgt = self.piece(d + e)
        offs = self._offsets(d + e)
        labels = self.free_labels(d)
        cols = []
        for q in src.quotient.basis:
            i, m = labels[q]
            col = [None] * self.ngens
            col[i] = f
            cols.append(tgt.quotient.reduce(self._free_vector(col, m, d + e, offs)))
        return Matrix.from_columns(self.ring.field, tgt.dim, cols)

    # -- constructions ------------------------------------------------------
    def shift(self, k: int) -> "GradedFPModule":
        """M(k), with M(k)_d = M_{d+k}."""
        if k == 0:
            return self
        return GradedFPModule(self.ring, [g - k for g in self.generator_degrees], self.relations,
                              [e - k for e in self.relation_degrees])

    def gamma_dim(self, s: GeneratingSequence, d: int, max_power: int) -> tuple[int, int | None]:
        """dim Γ_s(M)_d by the ann chain, and the power where it stabilized."""
        prev = None
        for n in range(1, max_power + 1):
            blocks = [self.act(t ** n, d) for t in s]
            stacked = Matrix.vstack(self.ring.field, self.dim(d), blocks)
            k = self.dim(d) - stacked.rank()
            if prev is not None and k == prev:
                return k, n - 1
            prev = k
        return prev, None


def graded_piece(M: GradedFPModule, d: int) -> DegreePiece:
    return M.piece(d)


def graded_direct_sum(mods: Sequence[GradedFPModule]) -> GradedFPModule:
    if not mods:
        raise ValueError("empty direct sum needs a ring; use GradedFPModule.free(ring, [])")
    ring = mods[0].ring
    degs: list[int] = []
    rels = []
    rdegs: list[int] = []
    total = sum(m.ngens for m in mods)
    off = 0
    zero = ring.zero()
    for m in mods:
        if m.ring != ring:
            raise ValueError("direct sum over different rings")
        degs.extend(m.generator_degrees)
        for col, e in zip(m.relations, m.relation_degrees):
            full = [zero] * total
            full[off:off + m.ngens] = col
            rels.append(tuple(full))
            rdegs.append(e)
        off += m.ngens
    return GradedFPModule(ring, degs, rels, rdegs)


class GradedMap:
    """Degree-preserving map of graded FP modules lifted to the free covers.

    ``entries[(i, j)]`` is the polynomial sending generator j of the source
    to a multiple of generator i of the target.
    """

    def __init__(self, source: GradedFPModule, target: GradedFPModule, entries: dict):
        self.source = source
        self.target = target
        clean = {}
        for (i, j), p in entries.items():
            if not isinstance(p, Polynomial):
                p = source.ring.one() * p
            if p.is_zero():
                continue
            want = source.generator_degrees[j] - target.generator_degrees[i]
            if p.degree != want:
                raise ValueError(f"map entry {p} at {(i, j)} has degree {p.degree}, expected {want}")
            clean[(i, j)] = p
        self.entries = clean
        self._cache: dict[int, Matrix] = {}

    @classmethod
    def identity(cls, m: GradedFPModule) -> "GradedMap":
        one = m.ring.one()
        return cls(m, m, {(i, i): one for i in range(m.ngens)})

    @classmethod
    def zero(cls, source: GradedFPModule, target: GradedFPModule) -> "GradedMap":
        return cls(source, target, {})

    def realize(self, d: int) -> Matrix:
        if d in self._cache:
            return self._cache[d]
        src = self.source.piece(d)
        tgt = self.target.piece(d)
        offs = self.target._offsets(d)
        labels = self.source.free_labels(d)
        bycol: dict[int, list] = {}
        for (i, j), p in self.entries.items():
            bycol.setdefault(j, []).append((i, p))
        cols = []
        free_tgt = self.target.is_free
        for q in src.quotient.basis:
            j, m = labels[q]
            col = [None] * self.target.ngens
            for i, p in bycol.get(j, ()):
                col[i] = p
            v = self.target._free_vector(col, m, d, offs)
            cols.append(v if free_tgt else tgt.quotient.reduce(v))
        out = Matrix.from_columns(self.source.ring.field, tgt.dim, cols)
        self._cache[d] = out
        return out

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        acc: dict = {}
        for (i, k), p in self.entries.items():
            for (k2, j), q in other.entries.items():
                if k == k2:
                    acc[(i, j)] = acc.get((i, j), self.source.ring.zero()) + p * q
        return GradedMap(other.source, self.target, acc)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        acc = dict(self.entries)
        for k, p in other.entries.items():
            acc[k] = acc[k] + p if k in acc else p
        return GradedMap(self.source, self.target, acc)

    def __neg__(self) -> "GradedMap":
        return GradedMap(self.source, self.target, {k: -p for k, p in self.entries.items()})

    def scale(self, c) -> "GradedMap":
        return GradedMap(self.source, self.target, {k: p * c for k, p in self.entries.items()})


# ---------------------------------------------------------------------------
# finite-dimensional modules


class FinDimModule:
    """A module over a monomial quotient ring given by action matrices."""

    def __init__(self, ring: MonomialQuotientRing, dim: int, action: Sequence[Matrix], check: bool = True):
        self.ring = ring
        self.field = ring.field
        self.dim = int(dim)
        self.action = tuple(action)
        if len(self.action) != ring.nvars:
            raise ValueError("one action matrix per ring variable")
        for a in self.action:
            if a.shape != (self.dim, self.dim):
                raise ValueError("action matrices must be dim x dim")
            if a.field != self.field:
                raise ValueError("action matrix over a different field")
        self._powers: dict[tuple, Matrix] = {}
        self._act: dict[Polynomial, Matrix] = {}
        if check:
            self.validate()

    def validate(self) -> None:
        for i, a in enumerate(self.action):
            for b in self.action[i + 1:]:
                if a @ b != b @ a:
                    raise ValueError("action matrices do not commute")
        for g in self.ring.ideal_generators:
            if not self._monomial_matrix(g).is_zero():
                raise ValueError(f"ideal generator {self.ring.monomial_str(g)} does not act by zero")

    def __repr__(self) -> str:
        return f"FinDimModule(dim={self.dim}, ring={self.ring})"

    @classmethod
    def zero_module(cls, ring: MonomialQuotientRing) -> "FinDimModule":
        return cls(ring, 0, [Matrix.zeros(ring.field, 0, 0) for _ in ring.variables], check=False)

    @classmethod
    def trivial(cls, ring: MonomialQuotientRing) -> "FinDimModule":
        """The residue field k with every variable acting by 0."""
        return cls(ring, 1, [Matrix.zeros(ring.field, 1, 1) for _ in ring.variables])

    @classmethod
    def monomial_quotient(cls, ring: MonomialQuotientRing, monomials: Sequence[Sequence[int]]) -> "FinDimModule":
        """R/(monomials) when it is finite-dimensional; basis = standard monomials."""
        extra = MonomialQuotientRing(ring.field, ring.variables, ring.weights,
                                     list(ring.ideal_generators) + [tuple(m) for m in monomials])
        basis = []
        d = 0
        empty_run = 0
        top = max(ring.weights)
        while empty_run < top:
            b = extra.degree_basis(d)
            basis.extend(b)
            empty_run = 0 if b else empty_run + 1
            d += 1
            if d > 10_000:
                raise ValueError("quotient is not finite-dimensional")
        pos = {m: i for i, m in enumerate(basis)}
        mats = []
        for v in range(ring.nvars):
            rows: list[dict] = [dict() for _ in basis]
            for j, m in enumerate(basis):
                t = list(m)
                t[v] += 1
                i = pos.get(tuple(t))
                if i is not None:
                    rows[i][j] = ring.field.one
            mats.append(Matrix(ring.field, len(basis), len(basis), rows))
        mod = cls(ring, len(basis), mats)
        mod.basis_labels = [extra.monomial_str(m) for m in basis]
        return mod

    def _monomial_matrix(self, mono: tuple) -> Matrix:
        if mono in self._powers:
            return self._powers[mono]
        out = Matrix.identity(self.field, self.dim)
        for a, e in zip(self.action, mono):
            if e:
                out = out @ a.power(e)
        self._powers[mono] = out
        return out

    def act(self, f: Polynomial) -> Matrix:
        """Matrix of multiplication by the ring element f."""
        if f in self._act:
            return self._act[f]
        out = Matrix.zeros(self.field, self.dim, self.dim)
        for m, c in f.terms.items():
            out = out + self._monomial_matrix(m).scale(c)
        self._act[f] = out
        return out

    # -- sub and quotient -----------------------------------------------------
    def submodule(self, basis: Matrix) -> "FinDimModule":
        """Submodule spanned by the (independent, stable) columns of ``basis``."""
        acts = [solve(basis, a @ basis) for a in self.action]
        return FinDimModule(self.ring, basis.ncols, acts, check=False)

    def quotient(self, sub: Matrix) -> tuple["FinDimModule", Matrix]:
        """M / span(columns of sub), with the projection matrix."""
        q = Quotient.of_columns(sub)
        proj, lift = q.project, q.lift
        acts = [proj @ a @ lift for a in self.action]
        return FinDimModule(self.ring, q.dim, acts, check=False), proj

    def is_stable(self, basis: Matrix) -> bool:
        r = basis.rank()
        for a in self.action:
            if Matrix.hstack(self.field, self.dim, [basis, a @ basis]).rank() != r:
                return False
        return True


def findim_direct_sum(mods: Sequence[FinDimModule], ring: MonomialQuotientRing | None = None) -> FinDimModule:
    if not mods:
        if ring is None:
            raise ValueError("empty direct sum needs a ring")
        return FinDimModule.zero_module(ring)
    ring = mods[0].ring
    dims = [m.dim for m in mods]
    acts = []
    for v in range(ring.nvars):
        acts.append(Matrix.block(ring.field, dims, dims, {(k, k): m.action[v] for k, m in enumerate(mods)}))
    return FinDimModule(ring, sum(dims), acts, check=False)


class FinDimMap:
    """R-linear map between finite-dimensional modules."""

    def __init__(self, source: FinDimModule, target: FinDimModule, matrix: Matrix, check: bool = False):
        if matrix.shape != (target.dim, source.dim):
            raise ValueError(f"map matrix has shape {matrix.shape}, expected {(target.dim, source.dim)}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.is_linear():
            raise ValueError("map does not commute with the ring action")

    def is_linear(self) -> bool:
        return all(b @ self.matrix == self.matrix @ a for a, b in zip(self.source.action, self.target.action))

    def realize(self, d: int | None = None) -> Matrix:
        return self.matrix

    def __matmul__(self, other: "FinDimMap") -> "FinDimMap":
        return FinDimMap(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "FinDimMap") -> "FinDimMap":
        return FinDimMap(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> "FinDimMap":
        return FinDimMap(self.source, self.target, -self.matrix)

    @classmethod
    def identity(cls, m: FinDimModule) -> "FinDimMap":
        return cls(m, m, Matrix.identity(m.field, m.dim))


# ---------------------------------------------------------------------------
# functors


@dataclass(frozen=True)
class Inclusion:
    module: FinDimModule
    inclusion: Matrix


@dataclass(frozen=True)
class Projection:
    module: FinDimModule
    projection: Matrix


def _stacked(M: FinDimModule, elems: Sequence[Polynomial]) -> Matrix:
    return Matrix.vstack(M.field, M.dim, [M.act(e) for e in elems])


def annihilator_chain(M: FinDimModule, s: GeneratingSequence) -> list[int]:
    """dims of ann_M(s^[n]) for n = 1, 2, ... until two consecutive agree."""
    dims = []
    n = 1
    while True:
        k = M.dim - _stacked(M, [t ** n for t in s]).rank()
        dims.append(k)
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            return dims
        if n > M.dim + 1:
            return dims
        n += 1


def gamma(M: FinDimModule, s: GeneratingSequence) -> Inclusion:
    """Maximal s-torsion submodule, as the stable term of ann(s^[n])."""
    prev = None
    n = 1
    while True:
        ker = kernel_basis(_stacked(M, [t ** n for t in s]))
        if prev is not None and ker.ncols == prev.ncols:
            break
        prev = ker
        n += 1
    return Inclusion(M.submodule(ker), ker)


def torsion_order(M: FinDimModule, s: GeneratingSequence) -> int | None:
    """Least n with s_j^n = 0 on M for all j; None if some s_j is not nilpotent."""
    for n in range(1, M.dim + 2):
        if all(M.act(t ** n).is_zero() for t in s):
            return n
    return None


def quotient_by_bracket_power(M: FinDimModule, s: GeneratingSequence, n: int) -> Projection:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _quotient_by_elements(M, [t ** n for t in s])


def quotient_by_ideal_power(M: FinDimModule, s: GeneratingSequence, n: int) -> Projection:
    """M / I^n M for the ideal generated by s."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _quotient_by_elements(M, ideal_power_generators(s, n))


def _quotient_by_elements(M: FinDimModule, elems: Sequence[Polynomial]) -> Projection:
    if elems:
        sub = Matrix.hstack(M.field, M.dim, [M.act(e) for e in elems])
    else:
        sub = Matrix.zeros(M.field, M.dim, 0)
    mod, proj = M.quotient(sub)
    return Projection(mod, proj)


@dataclass(frozen=True)
class FittingDecomposition:
    nil: FinDimModule
    inv: FinDimModule
    nil_inclusion: Matrix
    inv_inclusion: Matrix


def fitting_decomposition(M: FinDimModule, f: Polynomial) -> FittingDecomposition:
    """M = ker f^dim ⊕ im f^dim."""
    a = M.act(f).power(max(M.dim, 1))
    ker = kernel_basis(a)
    img = a.select_cols(a.pivot_columns())
    return FittingDecomposition(M.submodule(ker), M.submodule(img), ker, img)


def is_contramodule(M: FinDimModule, s: GeneratingSequence) -> bool:
    return all(fitting_decomposition(M, t).inv.dim == 0 for t in s)


def contramodule_witness(M: FinDimModule, s: GeneratingSequence):
    """First (index, vector) with s_j acting invertibly on the span, or None."""
    for j, t in enumerate(s):
        fd = fitting_decomposition(M, t)
        if fd.inv.dim:
            return j, fd.inv_inclusion.column(0)
    return None


def truncated_completion(M, s: GeneratingSequence, N: int) -> Tower:
    """The tower M/(s^[1])M <- ... <- M/(s^[N])M with surjective transitions.

    Graded input must be free: completion is only compared with the derived
    functor on flat modules.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(M, GradedFPModule):
        if not M.is_free:
            raise ValueError("truncated_completion on a graded module requires a free module "
                             "(flatness hypothesis for comparing completion with its derived functor)")
        levels = []
        for n in range(1, N + 1):
            rels = []
            for i, g in enumerate(M.generator_degrees):
                for t in s:
                    col = [M.ring.zero()] * M.ngens
                    col[i] = t ** n
                    rels.append(tuple(col))
            levels.append(GradedFPModule(M.ring, M.generator_degrees, rels))
        trans = [GradedMap(levels[k + 1], levels[k], {(i, i): M.ring.one() for i in range(M.ngens)})
                 for k in range(N - 1)]
        return Tower(levels, trans)
    levels = []
    projs = []
    for n in range(1, N + 1):
        q = quotient_by_bracket_power(M, s, n)
        levels.append(q.module)
        projs.append(q.projection)
    trans = []
    for k in range(N - 1):
        # level k+2 -> level k+1 induced by the identity of M
        src_lift = Quotient.of_columns(_bracket_image(M, s, k + 2)).lift
        trans.append(FinDimMap(levels[k + 1], levels[k], projs[k] @ src_lift))
    return Tower(levels, trans)


def _bracket_image(M: FinDimModule, s: GeneratingSequence, n: int) -> Matrix:
    return Matrix.hstack(M.field, M.dim, [M.act(t ** n) for t in s])
