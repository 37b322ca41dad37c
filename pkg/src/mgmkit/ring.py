"""Positively graded polynomial rings modulo monomial ideals.

Monomials are exponent tuples in the declared variable order.  A monomial is
*standard* when no ideal generator divides it; the standard monomials of a
fixed weighted degree form the basis of that graded piece, listed in graded
lexicographic order (largest first in the declared variable order).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .linalg import QQ, Field, Matrix

Monomial = tuple


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _minimalize(gens: Iterable[Monomial]) -> tuple:
    uniq = sorted(set(tuple(g) for g in gens), key=lambda g: (sum(g), tuple(-x for x in g)))
    kept: list[Monomial] = []
    for g in uniq:
        if not any(_divides(h, g) for h in kept):
            kept.append(g)
    return tuple(sorted(kept, key=lambda g: (sum(g), tuple(-x for x in g))))


class MonomialQuotientRing:
    """``field[variables] / (monomial ideal)`` with positive integer weights."""

    def __init__(self, field: Field, variables: Sequence[str], weights: Sequence[int] | None = None,
                 ideal: Iterable[Sequence[int]] = ()):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        if weights is None:
            weights = (1,) * len(variables)
        weights = tuple(int(w) for w in weights)
        if len(weights) != len(variables):
            raise ValueError("one weight per variable")
        if any(w < 1 for w in weights):
            raise ValueError("weights must be positive")
        gens = []
        for g in ideal:
            g = tuple(int(e) for e in g)
            if len(g) != len(variables) or any(e < 0 for e in g):
                raise ValueError(f"bad ideal exponent vector {g}")
            gens.append(g)
        self.field = field
        self.variables = variables
        self.weights = weights
        self.ideal_generators = _minimalize(gens)
        self._basis_cache: dict[int, tuple] = {}
        self._index_cache: dict[int, dict] = {}

    # -- identity -------------------------------------------------------------
    def _key(self):
        return (self.field.name, self.variables, self.weights, self.ideal_generators)

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialQuotientRing) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        rel = ", ".join(self.monomial_str(g) for g in self.ideal_generators)
        base = f"{self.field}[{', '.join(self.variables)}]"
        return f"{base}/({rel})" if rel else base

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def is_free(self) -> bool:
        return not self.ideal_generators

    # -- monomials ------------------------------------------------------------
    def degree(self, mono: Monomial) -> int:
        return sum(w * e for w, e in zip(self.weights, mono))

    def is_standard(self, mono: Monomial) -> bool:
        return not any(_divides(g, mono) for g in self.ideal_generators)

    def monomial_str(self, mono: Monomial) -> str:
        parts = []
        for v, e in zip(self.variables, mono):
            if e == 1:
                parts.append(v)
            elif e > 1:
                parts.append(f"{v}^{e}")
        return "*".join(parts) if parts else "1"

    def degree_basis(self, d: int) -> tuple:
        """Standard monomials of weighted degree d, grlex order."""
        if d in self._basis_cache:
            return self._basis_cache[d]
        out: list[Monomial] = []
        if d >= 0:
            n = self.nvars
            w = self.weights
            cur = [0] * n

            def rec(i: int, rem: int) -> None:
                if i == n - 1:
                    if rem % w[i] == 0:
                        cur[i] = rem // w[i]
                        m = tuple(cur)
                        if self.is_standard(m):
                            out.append(m)
                        cur[i] = 0
                    return
                for e in range(rem // w[i], -1, -1):
                    cur[i] = e
                    rec(i + 1, rem - e * w[i])
                cur[i] = 0

            rec(0, d)
        res = tuple(out)
        self._basis_cache[d] = res
        return res

    def dim(self, d: int) -> int:
        return len(self.degree_basis(d))

    def index(self, d: int) -> dict:
        if d not in self._index_cache:
            self._index_cache[d] = {m: i for i, m in enumerate(self.degree_basis(d))}
        return self._index_cache[d]

    # -- elements ---------------------------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: 1})

    def monomial(self, mono: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(mono): coeff})

    def var(self, name: str) -> "Polynomial":
        i = self.variables.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(e)

    def gens(self) -> list["Polynomial"]:
        return [self.var(v) for v in self.variables]

    def mult_map(self, f: "Polynomial", d: int, degree: int | None = None) -> Matrix:
        return mult_map(self, f, d, degree)

    def with_field(self, field: Field) -> "MonomialQuotientRing":
        return MonomialQuotientRing(field, self.variables, self.weights, self.ideal_generators)


class Polynomial:
    """An element of a ``MonomialQuotientRing`` in normal form.

    Terms whose monomial lies in the ideal are dropped on construction, so
    equality is coefficientwise equality.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: MonomialQuotientRing, terms: Mapping[Monomial, object]):
        self.ring = ring
        f = ring.field
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != ring.nvars:
                raise ValueError("monomial length does not match the ring")
            if any(e < 0 for e in m):
                raise ValueError("negative exponent")
            c = f(c)
            if c and ring.is_standard(m):
                clean[m] = c
        self.terms = dict(sorted(clean.items(), key=lambda t: (ring.degree(t[0]), t[0]), reverse=True))

    # -- structure --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int | None:
        """Weighted degree if homogeneous and nonzero, else None."""
        degs = {self.ring.degree(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self) -> bool:
        return self.is_zero() or self.degree is not None

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- arithmetic -------------------------------------------------------------
    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError("polynomials over different rings")
            return other
        return Polynomial(self.ring, {(0,) * self.ring.nvars: other})

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._lift(other)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Polynomial(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.terms.items():
            ms = self.ring.monomial_str(m)
            cs = str(c)
            if ms == "1":
                term = cs
            elif cs == "1":
                term = ms
            elif cs == "-1":
                term = "-" + ms
            else:
                term = f"{cs}*{ms}"
            out.append(term)
        s = " + ".join(out)
        return s.replace("+ -", "- ")

    __repr__ = __str__


HomogeneousElement = Polynomial


class GeneratingSequence:
    """A finite sequence of homogeneous elements of positive degree."""

    def __init__(self, ring: MonomialQuotientRing, elements: Sequence[Polynomial]):
        elements = tuple(elements)
        if not elements:
            raise ValueError("generating sequence must be nonempty")
        for e in elements:
            if e.ring != ring:
                raise ValueError("sequence element over a different ring")
            if e.is_zero():
                raise ValueError("sequence elements must be nonzero")
            if e.degree is None:
                raise ValueError(f"sequence element {e} is not homogeneous")
            if e.degree <= 0:
                raise ValueError(f"sequence element {e} must have positive degree")
        self.ring = ring
        self.elements = elements

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> Polynomial:
        return self.elements[i]

    @property
    def degrees(self) -> tuple:
        return tuple(e.degree for e in self.elements)

    def power(self, n: int) -> "GeneratingSequence":
        return bracket_power_ideal(self, n)

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneratingSequence) and self.ring == other.ring and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.ring, self.elements))

    def __repr__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.elements) + ")"


# ---------------------------------------------------------------------------


def degree_basis(ring: MonomialQuotientRing, d: int) -> tuple:
    return ring.degree_basis(d)


def mult_map(ring: MonomialQuotientRing, f: Polynomial, d: int, degree: int | None = None) -> Matrix:
    """Matrix of ``g -> f*g`` from R_d to R_{d + deg f}.

    The zero element has no degree of its own; pass ``degree`` for it.
    """
    if f.ring != ring:
        raise ValueError("element over a different ring")
    if f.is_zero():
        if degree is None:
            raise ValueError("mult_map of 0 needs an explicit degree")
        return Matrix.zeros(ring.field, ring.dim(d + degree), ring.dim(d))
    e = f.degree
    if e is None:
        raise ValueError(f"{f} is not homogeneous")
    if degree is not None and degree != e:
        raise ValueError(f"{f} has degree {e}, not {degree}")
    return _mult_map_cached(ring, f, d, e)


@lru_cache(maxsize=4096)
def _mult_map_cached(ring: MonomialQuotientRing, f: Polynomial, d: int, e: int) -> Matrix:
    src = ring.degree_basis(d)
    tgt = ring.index(d + e)
    rows: list[dict] = [dict() for _ in range(len(tgt))]
    p = ring.field.characteristic
    for j, m in enumerate(src):
        for u, c in f.terms.items():
            prod = tuple(a + b for a, b in zip(m, u))
            i = tgt.get(prod)
            if i is None:
                continue
            x = rows[i].get(j, 0) + c
            if p:
                x %= p
            if x:
                rows[i][j] = x
            else:
                rows[i].pop(j, None)
    return Matrix(ring.field, len(tgt), len(src), rows)


def bracket_power_ideal(s: GeneratingSequence, n: int) -> GeneratingSequence:
    if n < 1:
        raise ValueError("bracket power needs n >= 1")
    return GeneratingSequence(s.ring, [e ** n for e in s.elements])


def ideal_power_generators(s: GeneratingSequence, n: int) -> list[Polynomial]:
    """All nonzero products of n elements of s (generators of I^n)."""
    out = []
    for combo in combinations_with_replacement(range(len(s)), n):
        p = s.ring.one()
        for j in combo:
            p = p * s[j]
        if not p.is_zero():
            out.append(p)
    return out


def polynomial_ring(field: Field, variables: Sequence[str], weights: Sequence[int] | None = None) -> MonomialQuotientRing:
    return MonomialQuotientRing(field, variables, weights)


def counterexample_ring(num_vars: int, field: Field = QQ):
    """Truncation of the non-weakly-proregular example to x_1..x_N and s.

    Relations: x_i x_j for all i, j and s^i x_i.  Returns the ring and the
    one-element sequence (s).
    """
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    n = num_vars
    names = [f"x{i}" for i in range(1, n + 1)] + ["s"]
    gens = []
    for i in range(n):
        for j in range(i, n):
            e = [0] * (n + 1)
            e[i] += 1
            e[j] += 1
            gens.append(e)
    for i in range(n):
        e = [0] * (n + 1)
        e[i] = 1
        e[n] = i + 1
        gens.append(e)
    ring = MonomialQuotientRing(field, names, ideal=gens)
    return ring, GeneratingSequence(ring, [ring.var("s")])
