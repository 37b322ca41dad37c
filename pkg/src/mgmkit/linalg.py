"""Exact linear algebra over Q and prime fields.

Every homology dimension in the package is ultimately a rank computed here,
so nothing in this module ever touches floating point.  Rationals are
``gmpy2.mpq`` values (always reduced, positive denominator); residues mod p
are plain ``int`` in ``[0, p)``.

Matrices are immutable.  They are stored as a tuple of sparse rows
(``{column: nonzero value}``) because the telescope complexes produce
matrices with thousands of rows and a handful of nonzeros per row;
``Matrix.entries`` gives the dense row-major view.
"""

from __future__ import annotations

import heapq
import random
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

DEFAULT_PRIME = 1000003


class Field:
    """Base class for the two supported ground fields."""

    characteristic: int = 0
    name: str = ""

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def inv(self, a):
        raise NotImplementedError

    def random_element(self, rng: random.Random, bound: int = 5):
        return self(rng.randint(-bound, bound))

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


class RationalField(Field):
    characteristic = 0
    name = "QQ"

    def __call__(self, x):
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        if isinstance(x, Fraction):
            return gmpy2.mpq(x.numerator, x.denominator)
        return gmpy2.mpq(x)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a


class PrimeField(Field):
    def __init__(self, p: int):
        if p < 2 or not gmpy2.is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.characteristic = int(p)
        self.name = f"GF({p})"

    def __call__(self, x):
        p = self.characteristic
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        if isinstance(x, int):
            return x % p
        if isinstance(x, Fraction) or type(x).__name__ == "mpq":
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            return num * pow(den, -1, p) % p
        return int(x) % p

    def inv(self, a):
        if a % self.characteristic == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.characteristic)

    def random_element(self, rng: random.Random, bound: int = 5):
        return rng.randrange(self.characteristic)


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_string(text: str) -> Field:
    """Parse ``q`` / ``QQ`` or ``p:PRIME`` / ``GF(PRIME)``."""
    t = text.strip()
    if t.lower() in ("q", "qq", "rational"):
        return QQ
    if t.lower().startswith("p:"):
        return GF(int(t[2:]))
    if t.upper().startswith("GF(") and t.endswith(")"):
        return GF(int(t[3:-1]))
    raise ValueError(f"unknown field {text!r}")


# ---------------------------------------------------------------------------
# elimination kernel


def _sub_scaled(v: dict, f, row: dict, p: int, heap=None, inheap=None) -> None:
    """v -= f * row, in place, dropping zeros."""
    for col, val in row.items():
        nv = v.get(col, 0) - f * val
        if p:
            nv %= p
        if nv:
            v[col] = nv
            if heap is not None and col not in inheap:
                inheap.add(col)
                heapq.heappush(heap, col)
        else:
            v.pop(col, None)


def _echelon(rows: Iterable[dict], field: Field, limit: int | None = None):
    """Reduced row echelon form of a list of sparse rows.

    Returns ``(pivot_cols, pivot_rows)`` where ``pivot_rows[c]`` has a 1 at
    column c and zeros at every other pivot column.  With ``limit`` set,
    leading entries at columns >= limit signal an inconsistent system and
    raise ``ValueError`` (used by ``solve``).
    """
    p = field.characteristic
    pivots: dict[int, dict] = {}
    for r in rows:
        if not r:
            continue
        v = dict(r)
        heap = list(v)
        heapq.heapify(heap)
        inheap = set(heap)
        lead = None
        while heap:
            c = heapq.heappop(heap)
            inheap.discard(c)
            a = v.get(c)
            if not a:
                continue
            pr = pivots.get(c)
            if pr is None:
                lead = c
                break
            _sub_scaled(v, a, pr, p, heap, inheap)
        if lead is None:
            continue
        if limit is not None and lead >= limit:
            raise ValueError("inconsistent linear system")
        a = v[lead]
        if a != 1:
            ia = field.inv(a)
            if p:
                v = {k: x * ia % p for k, x in v.items()}
            else:
                v = {k: x * ia for k, x in v.items()}
        pivots[lead] = v
    cols = sorted(pivots)
    for c in reversed(cols):
        row = pivots[c]
        hits = [k for k in row if k != c and k in pivots]
        for k in sorted(hits):
            f = row.get(k)
            if f:
                _sub_scaled(row, f, pivots[k], p)
    return cols, pivots


# ---------------------------------------------------------------------------


class Matrix:
    """Immutable matrix over a ``Field``.

    ``rows`` is a sequence of dicts mapping column index to a nonzero field
    element.  Use the classmethod constructors rather than building the
    dicts by hand.
    """

    __slots__ = ("field", "nrows", "ncols", "_rows", "_ech")

    def __init__(self, field: Field, nrows: int, ncols: int, rows: Sequence[dict]):
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._rows = tuple(rows)
        self._ech = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        out = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            d = {}
            for j, x in enumerate(r):
                y = field(x)
                if y:
                    d[j] = y
            out.append(d)
        return cls(field, len(rows), ncols, out)

    @classmethod
    def from_entries(cls, field: Field, nrows: int, ncols: int, entries: Sequence) -> "Matrix":
        if len(entries) != nrows * ncols:
            raise ValueError("entries length must equal rows * cols")
        return cls.from_rows(field, [entries[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def from_columns(cls, field: Field, nrows: int, columns: Sequence[dict]) -> "Matrix":
        rows: list[dict] = [dict() for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    rows[i][j] = x
        return cls(field, nrows, len(columns), rows)

    @classmethod
    def from_dict(cls, field: Field, nrows: int, ncols: int, entries: dict) -> "Matrix":
        rows: list[dict] = [dict() for _ in range(nrows)]
        p = field.characteristic
        for (i, j), x in entries.items():
            if p:
                x %= p
            if x:
                rows[i][j] = x
        return cls(field, nrows, ncols, rows)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, nrows, ncols, [dict() for _ in range(nrows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one = field.one
        return cls(field, n, n, [{i: one} for i in range(n)])

    # -- views ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def entries(self) -> tuple:
        """Dense row-major entries."""
        z = self.field.zero
        return tuple(r.get(j, z) for r in self._rows for j in range(self.ncols))

    def to_lists(self) -> list[list]:
        z = self.field.zero
        return [[r.get(j, z) for j in range(self.ncols)] for r in self._rows]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i].get(j, self.field.zero)

    def column(self, j: int) -> dict:
        return {i: r[j] for i, r in enumerate(self._rows) if j in r}

    def columns(self) -> list[dict]:
        cols: list[dict] = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- arithmetic -------------------------------------------------------
    def _check_field(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise ValueError("matrices over different fields")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        p = self.field.characteristic
        orows = other._rows
        out = []
        for r in self._rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            if p:
                acc = {j: x % p for j, x in acc.items() if x % p}
            else:
                acc = {j: x for j, x in acc.items() if x}
            out.append(acc)
        return Matrix(self.field, self.nrows, other.ncols, out)

    def _combine(self, other: "Matrix", sign: int) -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        p = self.field.characteristic
        out = []
        for a, b in zip(self._rows, other._rows):
            d = dict(a)
            for j, x in b.items():
                y = d.get(j, 0) + sign * x
                if p:
                    y %= p
                if y:
                    d[j] = y
                else:
                    d.pop(j, None)
            out.append(d)
        return Matrix(self.field, self.nrows, self.ncols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, 1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, -1)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        if not c:
            return Matrix.zeros(self.field, self.nrows, self.ncols)
        p = self.field.characteristic
        if p:
            rows = [{j: x * c % p for j, x in r.items()} for r in self._rows]
        else:
            rows = [{j: x * c for j, x in r.items()} for r in self._rows]
        return Matrix(self.field, self.nrows, self.ncols, rows)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows, self.columns())

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, len(idx), self.ncols, [self._rows[i] for i in idx])

    def select_cols(self, idx: Sequence[int]) -> "Matrix":
        pos = {j: k for k, j in enumerate(idx)}
        rows = [{pos[j]: x for j, x in r.items() if j in pos} for r in self._rows]
        return Matrix(self.field, self.nrows, len(idx), rows)

    @staticmethod
    def hstack(field: Field, nrows: int, blocks: Sequence["Matrix"]) -> "Matrix":
        rows: list[dict] = [dict() for _ in range(nrows)]
        off = 0
        for b in blocks:
            if b.nrows != nrows:
                raise ValueError("hstack row mismatch")
            for i, r in enumerate(b._rows):
                for j, x in r.items():
                    rows[i][off + j] = x
            off += b.ncols
        return Matrix(field, nrows, off, rows)

    @staticmethod
    def vstack(field: Field, ncols: int, blocks: Sequence["Matrix"]) -> "Matrix":
        rows: list[dict] = []
        for b in blocks:
            if b.ncols != ncols:
                raise ValueError("vstack column mismatch")
            rows.extend(b._rows)
        return Matrix(field, len(rows), ncols, rows)

    @staticmethod
    def block(field: Field, row_dims: Sequence[int], col_dims: Sequence[int], blocks: dict) -> "Matrix":
        """Assemble from ``{(bi, bj): Matrix}``; missing blocks are zero."""
        roff = [0]
        for d in row_dims:
            roff.append(roff[-1] + d)
        coff = [0]
        for d in col_dims:
            coff.append(coff[-1] + d)
        rows: list[dict] = [dict() for _ in range(roff[-1])]
        p = field.characteristic
        for (bi, bj), m in blocks.items():
            if m.shape != (row_dims[bi], col_dims[bj]):
                raise ValueError(f"block {(bi, bj)} has shape {m.shape}")
            r0, c0 = roff[bi], coff[bj]
            for i, r in enumerate(m._rows):
                tgt = rows[r0 + i]
                for j, x in r.items():
                    y = tgt.get(c0 + j, 0) + x
                    if p:
                        y %= p
                    if y:
                        tgt[c0 + j] = y
                    else:
                        tgt.pop(c0 + j, None)
        return Matrix(field, roff[-1], coff[-1], rows)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        p = self.field.characteristic
        rows = []
        for ra in self._rows:
            for rb in other._rows:
                d = {}
                for ja, a in ra.items():
                    base = ja * other.ncols
                    for jb, b in rb.items():
                        x = a * b
                        if p:
                            x %= p
                        if x:
                            d[base + jb] = x
                rows.append(d)
        return Matrix(self.field, self.nrows * other.nrows, self.ncols * other.ncols, rows)

    def power(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("power of a non-square matrix")
        out = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    # -- linear algebra ---------------------------------------------------
    def echelon(self):
        """Cached RREF of the row space: ``(pivot_cols, pivot_rows)``."""
        if self._ech is None:
            self._ech = _echelon(self._rows, self.field)
        return self._ech

    def pivot_columns(self) -> list[int]:
        return list(self.echelon()[0])

    def rank(self) -> int:
        return len(self.echelon()[0])


def rank(m: Matrix) -> int:
    return m.rank()


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the right kernel; ``cols - rank`` of them."""
    cols, piv = m.echelon()
    pset = set(cols)
    free = [j for j in range(m.ncols) if j not in pset]
    p = m.field.characteristic
    one = m.field.one
    basis = []
    for f in free:
        v = {f: one}
        for c in cols:
            x = piv[c].get(f)
            if x:
                v[c] = (-x) % p if p else -x
        basis.append(v)
    return Matrix.from_columns(m.field, m.ncols, basis)


def image_basis(m: Matrix) -> Matrix:
    """The first linearly independent columns of m (a column-space basis)."""
    return m.select_cols(column_pivots(m))


def column_pivots(m: Matrix) -> list[int]:
    return m.pivot_columns()


def quotient_dim(sub: Matrix, ambient_dim: int) -> int:
    if sub.nrows != ambient_dim:
        raise ValueError(f"subspace generators have {sub.nrows} rows, ambient is {ambient_dim}")
    return ambient_dim - sub.rank()


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Some X with ``a @ X == b``; free variables are set to zero.

    Raises ``ValueError`` when the system is inconsistent.
    """
    if a.nrows != b.nrows:
        raise ValueError("solve: row mismatch")
    k = a.ncols
    aug = []
    for ra, rb in zip(a.rows, b.rows):
        d = dict(ra)
        for j, x in rb.items():
            d[k + j] = x
        aug.append(d)
    cols, piv = _echelon(aug, a.field, limit=k)
    rows: list[dict] = [dict() for _ in range(k)]
    for c in cols:
        rows[c] = {j - k: x for j, x in piv[c].items() if j >= k}
    return Matrix(a.field, k, b.ncols, rows)


class Quotient:
    """Coordinates on ``F^n / span(generators)``.

    The basis of the quotient is the set of non-pivot coordinates of the
    reduced echelon form of the generators (the deterministic complement).
    ``project`` is the ``q x n`` matrix sending an ambient vector to its
    quotient coordinates; ``lift`` sends quotient coordinates to the chosen
    ambient representatives.
    """

    __slots__ = ("field", "ambient_dim", "pivots", "rows", "basis", "_proj", "_lift")

    def __init__(self, field: Field, ambient_dim: int, generators: Iterable[dict]):
        self.field = field
        self.ambient_dim = ambient_dim
        cols, piv = _echelon(generators, field)
        self.pivots = cols
        self.rows = piv
        pset = set(cols)
        self.basis = [j for j in range(ambient_dim) if j not in pset]
        self._proj = None
        self._lift = None

    @classmethod
    def of_columns(cls, sub: Matrix) -> "Quotient":
        return cls(sub.field, sub.nrows, sub.columns())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def sub_dim(self) -> int:
        return len(self.pivots)

    @property
    def project(self) -> Matrix:
        if self._proj is None:
            p = self.field.characteristic
            one = self.field.one
            pos = {q: k for k, q in enumerate(self.basis)}
            rows: list[dict] = [{pos[q]: one} if q in pos else {} for q in range(self.ambient_dim)]
            for c, r in self.rows.items():
                d = {}
                for j, x in r.items():
                    if j in pos:
                        d[pos[j]] = (-x) % p if p else -x
                rows[c] = d
            # rows[i] currently holds the image of e_i; transpose to q x n
            self._proj = Matrix(self.field, self.ambient_dim, self.dim, rows).T
        return self._proj

    @property
    def lift(self) -> Matrix:
        if self._lift is None:
            one = self.field.one
            self._lift = Matrix.from_columns(self.field, self.ambient_dim, [{q: one} for q in self.basis])
        return self._lift

    def reduce(self, v: dict) -> dict:
        """Quotient coordinates of one sparse ambient vector."""
        p = self.field.characteristic
        out = {}
        pos = {q: k for k, q in enumerate(self.basis)}
        for j, x in v.items():
            if j in pos:
                out[pos[j]] = out.get(pos[j], 0) + x
            else:
                r = self.rows.get(j)
                if r is None:
                    continue
                for jj, y in r.items():
                    if jj != j and jj in pos:
                        out[pos[jj]] = out.get(pos[jj], 0) - x * y
        if p:
            return {k: x % p for k, x in out.items() if x % p}
        return {k: x for k, x in out.items() if x}


def random_matrix(field: Field, nrows: int, ncols: int, rng: random.Random,
                  density: float = 1.0, bound: int = 5) -> Matrix:
    rows = []
    for _ in range(nrows):
        d = {}
        for j in range(ncols):
            if rng.random() < density:
                x = field.random_element(rng, bound)
                if x:
                    d[j] = x
        rows.append(d)
    return Matrix(field, nrows, ncols, rows)


def random_invertible(field: Field, n: int, rng: random.Random, bound: int = 3) -> Matrix:
    """Product of random unit triangular matrices; invertible by construction."""
    one = field.one
    lower = []
    upper = []
    for i in range(n):
        lo = {i: one}
        up = {i: one}
        for j in range(n):
            if j < i:
                x = field.random_element(rng, bound)
                if x:
                    lo[j] = x
            elif j > i:
                x = field.random_element(rng, bound)
                if x:
                    up[j] = x
        lower.append(lo)
        upper.append(up)
    return Matrix(field, n, n, lower) @ Matrix(field, n, n, upper)


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    x = solve(m, Matrix.identity(m.field, m.nrows))
    if m.rank() != m.nrows:
        raise ValueError("matrix is singular")
    return x
