"""Inverse and direct systems indexed by levels 1..N.

Levels are 1-indexed in every public function.  ``Tower.transitions[k]``
maps level k+2 to level k+1; ``CoTower.transitions[k]`` maps level k+1 to
level k+2.  Every verdict here is about the finite window of levels that
was computed and says so.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .linalg import Field, Matrix


@dataclass
class Tower:
    levels: list
    transitions: list

    def __post_init__(self):
        if len(self.transitions) != max(len(self.levels) - 1, 0):
            raise ValueError("a tower of N levels needs N-1 transitions")

    @property
    def N(self) -> int:
        return len(self.levels)

    def level(self, n: int):
        return self.levels[n - 1]


@dataclass
class CoTower:
    levels: list
    transitions: list

    def __post_init__(self):
        if len(self.transitions) != max(len(self.levels) - 1, 0):
            raise ValueError("a cotower of N levels needs N-1 transitions")

    @property
    def N(self) -> int:
        return len(self.levels)

    def level(self, n: int):
        return self.levels[n - 1]


class VectorTower:
    """Inverse system of finite-dimensional spaces: maps[k] is V_{k+2} -> V_{k+1}."""

    def __init__(self, field: Field, dims: Sequence[int], maps: Sequence[Matrix], bases: Sequence | None = None):
        dims = list(dims)
        maps = list(maps)
        if len(maps) != max(len(dims) - 1, 0):
            raise ValueError("N levels need N-1 maps")
        for k, m in enumerate(maps):
            if m.shape != (dims[k], dims[k + 1]):
                raise ValueError(f"map {k + 2}->{k + 1} has shape {m.shape}")
        self.field = field
        self.dims = dims
        self.maps = maps
        self.bases = list(bases) if bases is not None else None
        self._comp: dict = {}

    @property
    def N(self) -> int:
        return len(self.dims)

    def compose(self, n: int, l: int) -> Matrix:
        """The composite V_n -> V_l for n >= l."""
        if n < l:
            raise ValueError("compose needs n >= l")
        if (n, l) in self._comp:
            return self._comp[(n, l)]
        if n == l:
            out = Matrix.identity(self.field, self.dims[l - 1])
        else:
            out = self.maps[l - 1] @ self.compose(n, l + 1)
        self._comp[(n, l)] = out
        return out

    @classmethod
    def constant(cls, field: Field, dim: int, N: int, matrix: Matrix | None = None) -> "VectorTower":
        m = matrix if matrix is not None else Matrix.identity(field, dim)
        return cls(field, [dim] * N, [m] * (N - 1))


class VectorCoTower:
    """Direct system: maps[k] is V_{k+1} -> V_{k+2}."""

    def __init__(self, field: Field, dims: Sequence[int], maps: Sequence[Matrix], bases: Sequence | None = None):
        dims = list(dims)
        maps = list(maps)
        if len(maps) != max(len(dims) - 1, 0):
            raise ValueError("N levels need N-1 maps")
        for k, m in enumerate(maps):
            if m.shape != (dims[k + 1], dims[k]):
                raise ValueError(f"map {k + 1}->{k + 2} has shape {m.shape}")
        self.field = field
        self.dims = dims
        self.maps = maps
        self.bases = list(bases) if bases is not None else None
        self._comp: dict = {}

    @property
    def N(self) -> int:
        return len(self.dims)

    def compose(self, l: int, n: int) -> Matrix:
        """The composite V_l -> V_n for l <= n."""
        if n < l:
            raise ValueError("compose needs l <= n")
        if (l, n) in self._comp:
            return self._comp[(l, n)]
        if n == l:
            out = Matrix.identity(self.field, self.dims[l - 1])
        else:
            out = self.maps[n - 2] @ self.compose(l, n - 1)
        self._comp[(l, n)] = out
        return out


# ---------------------------------------------------------------------------


def homology_tower(t: Tower, i: int, d: int | None = None) -> VectorTower:
    """Levelwise H^i (at internal degree d) with the induced transitions."""
    hs = [lvl.homology(i, d) for lvl in t.levels]
    maps = [hs[k].induced(t.transitions[k], hs[k + 1], i, d) for k in range(len(t.transitions))]
    field = t.levels[0].field
    return VectorTower(field, [h.dim for h in hs], maps, bases=hs)


def homology_cotower(c: CoTower, i: int, d: int | None = None) -> VectorCoTower:
    hs = [lvl.homology(i, d) for lvl in c.levels]
    maps = [hs[k + 1].induced(c.transitions[k], hs[k], i, d) for k in range(len(c.transitions))]
    field = c.levels[0].field
    return VectorCoTower(field, [h.dim for h in hs], maps, bases=hs)


# ---------------------------------------------------------------------------
# pro-zero


CERTIFIED = "certified-pro-zero"
NOT_PRO_ZERO = "not-pro-zero-in-window"
INCONCLUSIVE = "inconclusive"


@dataclass
class ProZeroVerdict:
    """Outcome of a pro-zero search.

    Each certificate is a dict.  ``{"level": l, "kind": "zero", "source": n}``
    says the composite V_n -> V_l is zero.  ``{"kind": "nonzero", ...}``
    carries a witness basis vector of V_source and its (nonzero) image.
    """

    status: str
    certificates: list
    N: int
    lag_bound: int
    max_lag: int | None = None
    qualification: dict = field(default_factory=dict)

    def recheck(self, t: VectorTower) -> bool:
        for c in self.certificates:
            comp = t.compose(c["source"], c["level"])
            if c["kind"] == "zero":
                if not comp.is_zero():
                    return False
            elif c["kind"] == "nonzero":
                v = Matrix.from_columns(t.field, t.dims[c["source"] - 1], [dict(c["vector"])])
                img = comp @ v
                if img.is_zero() or img.column(0) != dict(c["image"]):
                    return False
            elif c["kind"] in ("lag-exceeded", "untestable"):
                if comp.is_zero() != c["top_zero"]:
                    return False
        return True


def pro_zero_check(t: VectorTower, lag_bound: int, qualification: dict | None = None) -> ProZeroVerdict:
    """Search, for every level l < N, a source n in (l, l+lag] with V_n -> V_l zero.

    Only levels with l + lag_bound <= N are testable: higher levels cannot
    see their whole lag budget, so a miss there is recorded as
    ``untestable`` and does not enter the verdict.  A nonzero composite from
    the top level N to a testable l rules out every n <= N, because
    V_N -> V_l factors through V_n -> V_l; that is the window-level negative.
    """
    N = t.N
    certs = []
    negative = False
    open_levels = False
    untestable = False
    max_lag = 0
    for l in range(1, N):
        found = None
        for n in range(l + 1, min(l + lag_bound, N) + 1):
            if t.compose(n, l).is_zero():
                found = n
                break
        if found is not None:
            certs.append({"level": l, "kind": "zero", "source": found})
            max_lag = max(max_lag, found - l)
            continue
        top = t.compose(N, l)
        if l + lag_bound > N:
            untestable = True
            certs.append({"level": l, "kind": "untestable", "source": N, "top_zero": top.is_zero()})
        elif not top.is_zero():
            negative = True
            j = min(c for r in top.rows for c in r)
            vec = {j: t.field.one}
            img = top.column(j)
            certs.append({"level": l, "kind": "nonzero", "source": N,
                          "vector": sorted(vec.items()), "image": sorted(img.items())})
        else:
            open_levels = True
            certs.append({"level": l, "kind": "lag-exceeded", "source": N, "top_zero": True})
    testable = N - 1 - lag_bound >= 0
    if negative:
        status = NOT_PRO_ZERO
    elif open_levels or N < 2 or (untestable and not testable):
        status = INCONCLUSIVE
    else:
        status = CERTIFIED
    return ProZeroVerdict(status, certs, N, lag_bound, max_lag if status == CERTIFIED else None,
                          dict(qualification or {}))


# ---------------------------------------------------------------------------
# limits


@dataclass
class LimitResult:
    """Mittag-Leffler data of an inverse system of finite-dimensional spaces.

    ``eventual_image[l-1]`` is the rank of V_N -> V_l; ``image_lag[l-1]`` is
    the least k with rank(V_{l+k} -> V_l) already equal to it.  ``status`` is
    ``stabilized`` (limit dimension known), ``non-stabilizing`` (the
    eventual images keep growing inside the window) or ``inconclusive``.
    lim^1 vanishes for such towers, so ``lim1_zero`` is always True.
    """

    status: str
    limit_dim: int | None
    stabilization_level: int | None
    eventual_image: list
    image_lag: list
    trusted_levels: int
    lim1_zero: bool = True


def image_ranks(t: VectorTower) -> list[list[int]]:
    """img[l-1][n-l] = rank(V_n -> V_l)."""
    out = []
    for l in range(1, t.N + 1):
        out.append([t.compose(n, l).rank() for n in range(l, t.N + 1)])
    return out


def ml_limit(t: VectorTower) -> LimitResult:
    N = t.N
    img = image_ranks(t)
    eventual = [row[-1] for row in img]
    lags = []
    for row in img:
        k = 0
        while row[k] != row[-1]:
            k += 1
        lags.append(k)
    # a level is trusted once its image rank did not move between N-1 and N
    trusted = 0
    for l in range(1, N + 1):
        row = img[l - 1]
        if len(row) >= 2 and row[-2] == row[-1]:
            trusted = l
        else:
            break
    if trusted < 2:
        return LimitResult("inconclusive", None, None, eventual, lags, trusted)
    top = trusted
    if eventual[top - 1] != eventual[top - 2]:
        return LimitResult("non-stabilizing", None, None, eventual, lags, trusted)
    l0 = top - 1
    while l0 > 1 and eventual[l0 - 2] == eventual[l0 - 1]:
        l0 -= 1
    return LimitResult("stabilized", eventual[top - 1], l0, eventual, lags, trusted)


@dataclass
class ColimResult:
    """Colimit data of a direct system.

    ``method`` is ``iso-tail`` when every transition from ``level`` on is an
    isomorphism, ``surviving-rank`` when the dimension comes from the ranks
    of V_l -> V_N once those have settled (this handles nilpotent
    transitions, where the colimit is smaller than every level).
    """

    status: str
    dim: int | None
    level: int | None
    profile: list
    method: str | None
    surviving: list | None = None


def colim_stabilized(c: VectorCoTower) -> ColimResult:
    N = c.N
    dims = c.dims
    if N == 1:
        return ColimResult("non-stabilizing", None, None, dims, None)
    iso = [dims[k] == dims[k + 1] and c.maps[k].rank() == dims[k] for k in range(N - 1)]
    n0 = None
    for start in range(N - 1, 0, -1):
        if iso[start - 1]:
            n0 = start
        else:
            break
    if n0 is not None:
        return ColimResult("stabilized", dims[n0 - 1], n0, dims, "iso-tail")
    surv = [c.compose(l, N).rank() for l in range(1, N + 1)]
    before = [c.compose(l, N - 1).rank() for l in range(1, N)]
    trusted = 0
    for l in range(1, N):
        if before[l - 1] == surv[l - 1]:
            trusted = l
        else:
            break
    # classes born at the top are only covered by extrapolation once the level dims stop growing
    if trusted >= 2 and surv[trusted - 1] == surv[trusted - 2] and dims[-1] <= dims[-2]:
        r = surv[trusted - 1]
        l0 = trusted - 1
        while l0 > 1 and surv[l0 - 2] == r:
            l0 -= 1
        return ColimResult("stabilized", r, l0, dims, "surviving-rank", surv)
    return ColimResult("non-stabilizing", None, None, dims, None, surv)
