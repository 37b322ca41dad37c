"""Finite cochain complexes over the graded and the finite-dimensional backend.

Indexing is cohomological: the differential goes from ``C^i`` to
``C^{i+1}``.  Homological degrees (``H_i`` of a Koszul or Hom complex) are
stored at cohomological degree ``-i``.

Signs:

* shift: ``(C[k])^i = C^{i+k}`` with differential ``(-1)^k d``;
* cone of ``f: C -> D``: ``C^{i+1} ⊕ D^i`` with ``d(c, x) = (-dc, f(c) + dx)``;
* tensor: ``d(c ⊗ x) = dc ⊗ x + (-1)^{|c|} c ⊗ dx``;
* Hom: ``d(f) = d ∘ f - (-1)^{|f|} f ∘ d``.

Graded complexes are realized one internal degree ``d`` at a time and
``d∘d = 0`` is checked at every degree that gets realized.  Tensor and Hom
need a free factor on the graded side: the free factor's differential is a
polynomial matrix, which acts on any module of either backend.
"""

from __future__ import annotations

from typing import Sequence

from .linalg import Matrix, Quotient, kernel_basis, solve
from .modules import (FinDimMap, FinDimModule, GradedFPModule, GradedMap, findim_direct_sum,
                      graded_direct_sum)
from .ring import Polynomial

GRADED = "graded"
FINDIM = "findim"


def _backend_of(mod) -> str:
    if isinstance(mod, GradedFPModule):
        return GRADED
    if isinstance(mod, FinDimModule):
        return FINDIM
    raise TypeError(f"not a module: {mod!r}")


# ---------------------------------------------------------------------------
# backend-generic module and map helpers


def _shifted(mod, k: int):
    return mod.shift(k) if isinstance(mod, GradedFPModule) else mod


def _dsum(mods: Sequence):
    if isinstance(mods[0], GradedFPModule):
        return graded_direct_sum(mods)
    return findim_direct_sum(mods)


def _ngens(mod) -> int:
    return mod.ngens if isinstance(mod, GradedFPModule) else mod.dim


def _assemble(src_parts: Sequence, tgt_parts: Sequence, src, tgt, blocks: dict):
    """Map ⊕ src_parts -> ⊕ tgt_parts from ``{(target_index, source_index): map}``."""
    if isinstance(src, GradedFPModule):
        soff = [0]
        for m in src_parts:
            soff.append(soff[-1] + m.ngens)
        toff = [0]
        for m in tgt_parts:
            toff.append(toff[-1] + m.ngens)
        entries: dict = {}
        for (ti, si), g in blocks.items():
            for (i, j), p in g.entries.items():
                key = (toff[ti] + i, soff[si] + j)
                entries[key] = entries[key] + p if key in entries else p
        return GradedMap(src, tgt, entries)
    field = src.field
    mats = {k: g.matrix for k, g in blocks.items()}
    m = Matrix.block(field, [t.dim for t in tgt_parts], [s.dim for s in src_parts], mats)
    return FinDimMap(src, tgt, m)


def _poly_map(p: Polynomial, src, tgt):
    """Multiplication by p between two shifts of one module."""
    if isinstance(src, GradedFPModule):
        return GradedMap(src, tgt, {(i, i): p for i in range(src.ngens)})
    return FinDimMap(src, tgt, src.act(p))


def _poly_times(p: Polynomial, g, src, tgt):
    """p * g, re-typed as a map src -> tgt (shifts of g's source and target)."""
    if isinstance(src, GradedFPModule):
        return GradedMap(src, tgt, {k: q * p for k, q in g.entries.items()})
    return FinDimMap(src, tgt, g.target.act(p) @ g.matrix)


def _retype(g, src, tgt):
    """Same map between shifted copies of its source and target."""
    if isinstance(src, GradedFPModule):
        return GradedMap(src, tgt, g.entries)
    return FinDimMap(src, tgt, g.matrix)


def _neg(g):
    return -g


def _scaled(g, c):
    if c == 1:
        return g
    if c == -1:
        return -g
    if isinstance(g, GradedMap):
        return g.scale(c)
    return FinDimMap(g.source, g.target, g.matrix.scale(c))


def _identity(mod):
    return GradedMap.identity(mod) if isinstance(mod, GradedFPModule) else FinDimMap.identity(mod)


def _mod_dim(mod, d):
    return mod.dim(d) if isinstance(mod, GradedFPModule) else mod.dim


# ---------------------------------------------------------------------------


class ChainComplex:
    """A bounded cochain complex.

    ``terms[i]`` is a module; ``diffs[i]`` maps ``terms[i]`` to
    ``terms[i+1]``.  Missing terms are zero and missing differentials are
    zero maps.  ``labels`` optionally names the summands of each term, which
    the telescope constructors use to keep track of generators.
    """

    def __init__(self, terms: dict, diffs: dict | None = None, ring=None, labels: dict | None = None,
                 check: bool = True, parts: dict | None = None):
        self.terms = {int(i): m for i, m in terms.items() if m is not None}
        self.diffs = {int(i): g for i, g in (diffs or {}).items() if g is not None}
        if not self.terms and ring is None:
            raise ValueError("empty complex needs a ring")
        first = next(iter(self.terms.values()), None)
        self.ring = ring if ring is not None else first.ring
        self.backend = _backend_of(first) if first is not None else GRADED
        for m in self.terms.values():
            if _backend_of(m) != self.backend:
                raise ValueError("mixed backends in one complex")
            if m.ring != self.ring:
                raise ValueError("terms over different rings")
        for i, g in self.diffs.items():
            if i not in self.terms or i + 1 not in self.terms:
                raise ValueError(f"differential at {i} between missing terms")
            if g.source is not self.terms[i] or g.target is not self.terms[i + 1]:
                if _ngens(g.source) != _ngens(self.terms[i]) or _ngens(g.target) != _ngens(self.terms[i + 1]):
                    raise ValueError(f"differential at {i} has wrong source/target")
        self.labels = labels or {}
        self.parts = parts or {}
        self._checked: set = set()
        self._hcache: dict = {}
        if check and self.backend == FINDIM:
            self.check_d2(None)

    @property
    def field(self):
        return self.ring.field

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    @property
    def is_free(self) -> bool:
        return self.backend == GRADED and all(m.is_free for m in self.terms.values())

    def term(self, i: int):
        return self.terms.get(i)

    def dim_at(self, i: int, d: int | None = None) -> int:
        m = self.terms.get(i)
        if m is None:
            return 0
        return _mod_dim(m, d)

    def diff_at(self, i: int, d: int | None = None) -> Matrix:
        g = self.diffs.get(i)
        if g is None:
            return Matrix.zeros(self.field, self.dim_at(i + 1, d), self.dim_at(i, d))
        return g.realize(d)

    def check_d2(self, d: int | None) -> None:
        if d in self._checked:
            return
        for i in self.diffs:
            if i + 1 in self.diffs:
                if not (self.diff_at(i + 1, d) @ self.diff_at(i, d)).is_zero():
                    where = "" if d is None else f" at internal degree {d}"
                    raise ValueError(f"d∘d != 0 at cohomological degree {i}{where}")
        self._checked.add(d)

    def _check_degree_arg(self, d):
        if self.backend == GRADED and d is None:
            raise ValueError("graded homology needs an internal degree d")
        if self.backend == FINDIM and d is not None:
            raise ValueError("finite-dimensional complexes have no internal degree")

    def homology(self, i: int, d: int | None = None) -> "HomologySpace":
        self._check_degree_arg(d)
        key = (i, d)
        if key not in self._hcache:
            self.check_d2(d)
            self._hcache[key] = HomologySpace(self.diff_at(i - 1, d), self.diff_at(i, d), self.dim_at(i, d))
        return self._hcache[key]

    def homology_dims(self, d: int | None = None) -> dict:
        return {i: self.homology(i, d).dim for i in range(min(self.terms) - 1, max(self.terms) + 2)} \
            if self.terms else {}

    def euler_characteristic(self, d: int | None = None) -> int:
        return sum((-1) ** i * self.dim_at(i, d) for i in self.terms)

    def __repr__(self) -> str:
        return f"ChainComplex({self.backend}, degrees={self.degrees})"


class HomologySpace:
    """H = ker(d_out) / im(d_in) with explicit cycle representatives.

    ``reps`` holds one cycle per homology basis vector, chosen as the first
    cycles (in kernel-basis order) independent modulo boundaries.
    """

    def __init__(self, d_in: Matrix, d_out: Matrix, ambient: int):
        self.ambient = ambient
        z = kernel_basis(d_out) if d_out.ncols else Matrix.zeros(d_out.field, ambient, 0)
        if z.nrows != ambient:
            z = Matrix.zeros(d_in.field, ambient, 0)
        self.quotient = Quotient.of_columns(d_in) if d_in.nrows else Quotient(d_in.field, ambient, [])
        pz = self.quotient.project @ z
        piv = pz.pivot_columns()
        self.reps = z.select_cols(piv)
        self._proj = pz.select_cols(piv)
        self.cycles_dim = z.ncols
        self.boundaries_dim = self.quotient.sub_dim

    @property
    def dim(self) -> int:
        return self.reps.ncols

    @property
    def field(self):
        return self.reps.field

    def coords(self, cycles: Matrix) -> Matrix:
        """Homology coordinates of the columns of ``cycles`` (must be cycles)."""
        if self.dim == 0:
            return Matrix.zeros(cycles.field, 0, cycles.ncols)
        return solve(self._proj, self.quotient.project @ cycles)

    def is_boundary(self, v: Matrix) -> bool:
        return (self.quotient.project @ v).is_zero()

    def induced(self, f: "ComplexMap", source: "HomologySpace", i: int, d: int | None = None) -> Matrix:
        """Matrix of H^i(f) from ``source`` to this space."""
        return self.coords(f.component_at(i, d) @ source.reps)


class ComplexMap:
    """Degree-0 morphism of complexes given by per-degree module maps."""

    def __init__(self, source: ChainComplex, target: ChainComplex, components: dict, check: bool = True):
        self.source = source
        self.target = target
        self.components = {int(i): g for i, g in components.items() if g is not None}
        self._checked: set = set()
        if check and source.backend == FINDIM and target.backend == FINDIM:
            self.check(None)

    @property
    def field(self):
        return self.source.field

    def component_at(self, i: int, d: int | None = None) -> Matrix:
        g = self.components.get(i)
        if g is None:
            return Matrix.zeros(self.field, self.target.dim_at(i, d), self.source.dim_at(i, d))
        return g.realize(d)

    def commutes(self, d: int | None = None) -> bool:
        lo = min(self.source.degrees + self.target.degrees, default=0) - 1
        hi = max(self.source.degrees + self.target.degrees, default=0) + 1
        for i in range(lo, hi + 1):
            lhs = self.target.diff_at(i, d) @ self.component_at(i, d)
            rhs = self.component_at(i + 1, d) @ self.source.diff_at(i, d)
            if lhs != rhs:
                return False
        return True

    def check(self, d: int | None) -> None:
        if d in self._checked:
            return
        if not self.commutes(d):
            where = "" if d is None else f" at internal degree {d}"
            raise ValueError(f"map does not commute with the differentials{where}")
        self._checked.add(d)

    def realize_homology(self, i: int, d: int | None = None) -> Matrix:
        self.check(d)
        return self.target.homology(i, d).induced(self, self.source.homology(i, d), i, d)

    def __matmul__(self, other: "ComplexMap") -> "ComplexMap":
        comps = {}
        for i in set(self.components) & set(other.components):
            comps[i] = self.components[i] @ other.components[i]
        return ComplexMap(other.source, self.target, comps, check=False)

    @classmethod
    def identity(cls, c: ChainComplex) -> "ComplexMap":
        return cls(c, c, {i: _identity(m) for i, m in c.terms.items()}, check=False)


def homology(c: ChainComplex, i: int, d: int | None = None) -> HomologySpace:
    return c.homology(i, d)


# ---------------------------------------------------------------------------
# constructions


def one_term(mod, degree: int = 0) -> ChainComplex:
    return ChainComplex({degree: mod})


def shift(c: ChainComplex, k: int) -> ChainComplex:
    terms = {i - k: m for i, m in c.terms.items()}
    diffs = {i - k: (g if k % 2 == 0 else _neg(g)) for i, g in c.diffs.items()}
    labels = {i - k: v for i, v in c.labels.items()}
    return ChainComplex(terms, diffs, ring=c.ring, labels=labels, check=False)


def cone(f: ComplexMap) -> ChainComplex:
    """Cone^i = S^{i+1} ⊕ T^i, d(c, x) = (-dc, f(c) + dx)."""
    S, T = f.source, f.target
    degs = sorted({i - 1 for i in S.terms} | set(T.terms))
    terms = {}
    parts = {}
    for i in degs:
        pr = []
        if i + 1 in S.terms:
            pr.append(("s", S.terms[i + 1]))
        if i in T.terms:
            pr.append(("t", T.terms[i]))
        parts[i] = pr
        terms[i] = _dsum([m for _, m in pr])
    diffs = {}
    for i in degs:
        if i + 1 not in terms:
            continue
        src, tgt = parts[i], parts[i + 1]
        sidx = {k: n for n, (k, _) in enumerate(src)}
        tidx = {k: n for n, (k, _) in enumerate(tgt)}
        blocks = {}
        if "s" in sidx and "s" in tidx and (i + 1) in S.diffs:
            blocks[(tidx["s"], sidx["s"])] = _neg(S.diffs[i + 1])
        if "s" in sidx and "t" in tidx and (i + 1) in f.components:
            blocks[(tidx["t"], sidx["s"])] = f.components[i + 1]
        if "t" in sidx and "t" in tidx and i in T.diffs:
            blocks[(tidx["t"], sidx["t"])] = T.diffs[i]
        if blocks:
            blocks = {k: _retype(g, src[k[1]][1], tgt[k[0]][1]) for k, g in blocks.items()}
            diffs[i] = _assemble([m for _, m in src], [m for _, m in tgt], terms[i], terms[i + 1], blocks)
    return ChainComplex(terms, diffs, ring=S.ring)


def cocone(f: ComplexMap) -> ChainComplex:
    return shift(cone(f), -1)


def _free_data(K: ChainComplex, i: int):
    """Generator degrees of the free term K^i (empty if absent)."""
    m = K.terms.get(i)
    if m is None:
        return ()
    return m.generator_degrees


def _require_free(K: ChainComplex, what: str) -> None:
    if not K.is_free:
        raise ValueError(f"{what} needs a complex of free graded modules")


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """Total complex of C ⊗_R D; one factor must consist of free modules."""
    if C.ring != D.ring:
        raise ValueError("tensor over different rings")
    if C.is_free:
        return _tensor_free_left(C, D)
    if D.is_free:
        return _tensor_free_right(C, D)
    raise ValueError("tensor needs one factor of free modules (flatness)")


def _tensor_free_left(K: ChainComplex, D: ChainComplex) -> ChainComplex:
    # K^i ⊗ D^j = ⊕_a D^j(-a_a)
    cells: dict = {}
    for i in K.terms:
        for j in D.terms:
            degs = _free_data(K, i)
            if degs:
                cells[(i, j)] = [_shifted(D.terms[j], -a) for a in degs]
    return _total(cells, K, D, D.ring, left_free=True)


def _tensor_free_right(C: ChainComplex, K: ChainComplex) -> ChainComplex:
    # C^i ⊗ K^j = ⊕_b C^i(-b_b)
    cells: dict = {}
    for i in C.terms:
        for j in K.terms:
            degs = _free_data(K, j)
            if degs:
                cells[(i, j)] = [_shifted(C.terms[i], -b) for b in degs]
    return _total(cells, C, K, C.ring, left_free=False)


def _total(cells: dict, C: ChainComplex, D: ChainComplex, ring, left_free: bool) -> ChainComplex:
    bydeg: dict = {}
    for (i, j) in sorted(cells):
        bydeg.setdefault(i + j, []).append((i, j))
    terms, parts, labels = {}, {}, {}
    for p, keys in bydeg.items():
        flat = []
        lab = []
        for key in keys:
            for r, m in enumerate(cells[key]):
                flat.append(m)
                lab.append((key, r))
        parts[p] = (keys, flat, lab)
        terms[p] = _dsum(flat)
        labels[p] = lab
    diffs = {}
    for p in terms:
        if p + 1 not in terms:
            continue
        _, sflat, slab = parts[p]
        _, tflat, tlab = parts[p + 1]
        tpos = {lab: n for n, lab in enumerate(tlab)}
        blocks: dict = {}
        for sn, ((i, j), r) in enumerate(slab):
            src_mod = sflat[sn]
            if left_free:
                # d_K ⊗ id : entries P[b][a] acting on D^j
                g = C.diffs.get(i)
                if g is not None:
                    for (b, a), poly in g.entries.items():
                        if a == r:
                            tn = tpos[((i + 1, j), b)]
                            blocks[(tn, sn)] = _poly_map(poly, src_mod, tflat[tn])
                # (-1)^i id ⊗ d_D
                h = D.diffs.get(j)
                if h is not None:
                    tn = tpos[((i, j + 1), r)]
                    blocks[(tn, sn)] = _retype(h if i % 2 == 0 else _neg(h), src_mod, tflat[tn])
            else:
                g = C.diffs.get(i)
                if g is not None:
                    tn = tpos[((i + 1, j), r)]
                    blocks[(tn, sn)] = _retype(g, src_mod, tflat[tn])
                h = D.diffs.get(j)
                if h is not None:
                    sign = 1 if i % 2 == 0 else -1
                    for (b2, b), poly in h.entries.items():
                        if b == r:
                            tn = tpos[((i, j + 1), b2)]
                            blocks[(tn, sn)] = _poly_map(poly * sign, src_mod, tflat[tn])
        if blocks:
            diffs[p] = _assemble(sflat, tflat, terms[p], terms[p + 1], blocks)
    return ChainComplex(terms, diffs, ring=ring, labels=labels,
                        parts={p: v[1] for p, v in parts.items()})


def hom_from_free(K: ChainComplex, C: ChainComplex) -> ChainComplex:
    """Hom_R(K, C) for K a bounded complex of finitely generated free modules.

    Hom^p = ⊕_i Hom(K^i, C^{i+p}) and Hom(R(-a), X) = X(a).
    """
    _require_free(K, "hom_from_free")
    if K.ring != C.ring:
        raise ValueError("Hom over different rings")
    cells: dict = {}
    for i in K.terms:
        for j in C.terms:
            degs = _free_data(K, i)
            if degs:
                cells[(i, j)] = [_shifted(C.terms[j], a) for a in degs]
    bydeg: dict = {}
    for (i, j) in sorted(cells):
        bydeg.setdefault(j - i, []).append((i, j))
    terms, parts, labels = {}, {}, {}
    for p, keys in bydeg.items():
        flat, lab = [], []
        for key in keys:
            for r, m in enumerate(cells[key]):
                flat.append(m)
                lab.append((key, r))
        parts[p] = (flat, lab)
        terms[p] = _dsum(flat)
        labels[p] = lab
    diffs = {}
    for p in terms:
        if p + 1 not in terms:
            continue
        sflat, slab = parts[p]
        tflat, tlab = parts[p + 1]
        tpos = {lab: n for n, lab in enumerate(tlab)}
        sign = -1 if p % 2 == 0 else 1      # -(-1)^p
        blocks: dict = {}
        for sn, ((i, j), a) in enumerate(slab):
            src_mod = sflat[sn]
            h = C.diffs.get(j)
            if h is not None:
                tn = tpos[((i, j + 1), a)]
                blocks[(tn, sn)] = _retype(h, src_mod, tflat[tn])
            g = K.diffs.get(i - 1)
            if g is not None:
                # (f∘d_K)(e_b) = Σ_a P[a][b] f(e_a)
                for (a2, b), poly in g.entries.items():
                    if a2 == a:
                        tn = tpos[((i - 1, j), b)]
                        blocks[(tn, sn)] = _poly_map(poly * sign, src_mod, tflat[tn])
        if blocks:
            diffs[p] = _assemble(sflat, tflat, terms[p], terms[p + 1], blocks)
    return ChainComplex(terms, diffs, ring=C.ring, labels=labels,
                        parts={p: v[0] for p, v in parts.items()})


def dual(K: ChainComplex) -> ChainComplex:
    """Hom_R(K, R)."""
    return hom_from_free(K, one_term(GradedFPModule.free(K.ring, [0])))


def hom_map_first(f: ComplexMap, C: ChainComplex, src_hom: ChainComplex | None = None,
                  tgt_hom: ChainComplex | None = None) -> ComplexMap:
    """Hom(f, C): Hom(K', C) -> Hom(K, C) for f: K -> K' between free complexes."""
    K, K2 = f.source, f.target
    A = src_hom if src_hom is not None else hom_from_free(K2, C)
    B = tgt_hom if tgt_hom is not None else hom_from_free(K, C)
    comps = {}
    for p in A.terms:
        if p not in B.terms:
            continue
        slab, tlab = A.labels[p], B.labels[p]
        sflat = _parts_of(A, p)
        tflat = _parts_of(B, p)
        tpos = {lab: n for n, lab in enumerate(tlab)}
        blocks = {}
        for sn, ((i, j), a) in enumerate(slab):
            g = f.components.get(i)
            if g is None:
                continue
            # (φ∘f)(e_{a'}) = Σ_a f[a][a'] φ(e_a)
            for (a2, a1), poly in g.entries.items():
                if a2 == a:
                    tn = tpos[((i, j), a1)]
                    blocks[(tn, sn)] = _poly_map(poly, sflat[sn], tflat[tn])
        if blocks:
            comps[p] = _assemble(sflat, tflat, A.terms[p], B.terms[p], blocks)
    return ComplexMap(A, B, comps, check=False)


def hom_map_second(K: ChainComplex, g: ComplexMap, src_hom: ChainComplex | None = None,
                   tgt_hom: ChainComplex | None = None) -> ComplexMap:
    """Hom(K, g): Hom(K, C) -> Hom(K, C') for g: C -> C'."""
    A = src_hom if src_hom is not None else hom_from_free(K, g.source)
    B = tgt_hom if tgt_hom is not None else hom_from_free(K, g.target)
    comps = {}
    for p in A.terms:
        if p not in B.terms:
            continue
        slab, tlab = A.labels[p], B.labels[p]
        sflat = _parts_of(A, p)
        tflat = _parts_of(B, p)
        tpos = {lab: n for n, lab in enumerate(tlab)}
        blocks = {}
        for sn, ((i, j), a) in enumerate(slab):
            h = g.components.get(j)
            if h is None or ((i, j), a) not in tpos:
                continue
            tn = tpos[((i, j), a)]
            blocks[(tn, sn)] = _retype(h, sflat[sn], tflat[tn])
        if blocks:
            comps[p] = _assemble(sflat, tflat, A.terms[p], B.terms[p], blocks)
    return ComplexMap(A, B, comps, check=False)


def tensor_map(f: ComplexMap, g: ComplexMap, src: ChainComplex | None = None,
               tgt: ChainComplex | None = None) -> ComplexMap:
    """f ⊗ g for f between free complexes (left factor) and any g."""
    A = src if src is not None else tensor(f.source, g.source)
    B = tgt if tgt is not None else tensor(f.target, g.target)
    comps = {}
    for p in A.terms:
        if p not in B.terms:
            continue
        slab, tlab = A.labels[p], B.labels[p]
        sflat = _parts_of(A, p)
        tflat = _parts_of(B, p)
        tpos = {lab: n for n, lab in enumerate(tlab)}
        blocks = {}
        for sn, ((i, j), a) in enumerate(slab):
            fi = f.components.get(i)
            gj = g.components.get(j)
            if fi is None or gj is None:
                continue
            for (b, a1), poly in fi.entries.items():
                if a1 == a:
                    tn = tpos[((i, j), b)]
                    blocks[(tn, sn)] = _poly_times(poly, gj, sflat[sn], tflat[tn])
        if blocks:
            comps[p] = _assemble(sflat, tflat, A.terms[p], B.terms[p], blocks)
    return ComplexMap(A, B, comps, check=False)


def _parts_of(C: ChainComplex, p: int) -> list:
    """Summands of a term built by tensor or hom_from_free, in label order."""
    if p not in C.parts:
        raise ValueError("complex carries no summand bookkeeping for this term")
    return C.parts[p]
