"""Problem files: sections of ``key = value`` lines, plus a polynomial parser.

::

    # comments start with '#'
    [ring]
    field = q                  # or p:101
    variables = x, y
    weights = 1, 1             # optional, default all 1
    ideal = x^2, y^2           # optional monomials

    [sequence]
    elements = x, y

    [module]
    kind = free                # free | quotient | findim | monomial-quotient
    degrees = 0, 1             # free: generator degrees
    monomials = x^2            # quotient (graded R/(m)) and monomial-quotient (findim)
    dim = 2                    # findim only
    action.x = 0 0 ; 1 0       # findim: rows separated by ';'

    [params]
    window = -6:6
    levels = 5
    lag = 3

Every error carries ``path:line:col``.  Numbers are integers; floats are
rejected so that all data stays exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .linalg import QQ, Field, Matrix, field_from_string
from .modules import FinDimModule, GradedFPModule
from .ring import GeneratingSequence, MonomialQuotientRing, Polynomial


class SpecError(ValueError):
    def __init__(self, message: str, path: str = "<input>", line: int = 0, col: int = 0):
        super().__init__(f"{path}:{line}:{col}: {message}")
        self.path, self.line, self.col, self.message = path, line, col, message


SECTIONS = {
    "ring": {"field", "variables", "weights", "ideal"},
    "sequence": {"elements"},
    "module": {"kind", "degrees", "monomials", "dim"},
    "params": {"window", "levels", "lag", "n", "powers", "num_vars", "model", "direction", "seed", "count",
               "compact_levels"},
    "extension": {"variables", "weights", "ideal", "map"},
}


@dataclass
class Entry:
    value: str
    line: int
    col: int


@dataclass
class ProblemSpec:
    path: str
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str) -> Entry | None:
        return self.sections.get(section, {}).get(key)

    def has(self, section: str) -> bool:
        return section in self.sections

    def error(self, message: str, entry: Entry | None = None, offset: int = 0) -> SpecError:
        if entry is None:
            return SpecError(message, self.path, 0, 0)
        return SpecError(message, self.path, entry.line, entry.col + offset)


_FLOAT = re.compile(r"\d\.\d*|\.\d|\d[eE][+-]?\d")


def parse_text(text: str, path: str = "<input>") -> ProblemSpec:
    spec = ProblemSpec(path)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise SpecError("unterminated section header", path, lineno, indent + 1)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise SpecError(f"unknown section [{name}]", path, lineno, indent + 2)
            if name in spec.sections:
                raise SpecError(f"duplicate section [{name}]", path, lineno, indent + 2)
            spec.sections[name] = {}
            current = name
            continue
        if current is None:
            raise SpecError("key outside of any section", path, lineno, indent + 1)
        if "=" not in line:
            raise SpecError("expected 'key = value'", path, lineno, indent + 1)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        vcol = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        allowed = SECTIONS[current]
        if not (key in allowed or (current == "module" and key.startswith("action."))):
            raise SpecError(f"unknown key '{key}' in [{current}]", path, lineno, indent + 1)
        if key in spec.sections[current]:
            raise SpecError(f"duplicate key '{key}'", path, lineno, indent + 1)
        value = value_part.strip()
        m = _FLOAT.search(value)
        if m:
            raise SpecError("floating-point numbers are not accepted; use integers", path, lineno, vcol + m.start())
        spec.sections[current][key] = Entry(value, lineno, vcol)
    return spec


def parse_file(path: str) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read file: {exc.strerror}", path, 0, 0) from None
    return parse_text(text, path)


# ---------------------------------------------------------------------------
# polynomials


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class _PolyParser:
    def __init__(self, text: str, ring: MonomialQuotientRing):
        self.text = text
        self.ring = ring
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            kind = "int" if m.group(1) else "name" if m.group(2) else "op"
            val = m.group(1) or m.group(2) or m.group(3)
            self.toks.append((kind, val, m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg: str, pos: int):
        raise _ParseFailure(msg, pos)

    def parse(self) -> Polynomial:
        if not self.toks:
            self.fail("empty polynomial", 0)
        p = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            self.fail(f"unexpected '{val}'", pos)
        return p

    def expr(self) -> Polynomial:
        kind, val, pos = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        p = self.term() * sign
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                p = p + t if val == "+" else p - t
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            elif kind in ("int", "name") or (kind == "op" and val == "("):
                p = p * self.factor()          # implicit product: 2x, x y
            else:
                return p

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                self.fail("exponent must be a non-negative integer", pos)
            return base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "int":
            return self.ring.one() * int(val)
        if kind == "name":
            if val not in self.ring.variables:
                self.fail(f"unknown variable '{val}'", pos)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            k2, v2, p2 = self.take()
            if v2 != ")":
                self.fail("expected ')'", p2)
            return p
        if kind is None:
            self.fail("unexpected end of polynomial", pos)
        self.fail(f"unexpected '{val}'", pos)


class _ParseFailure(Exception):
    def __init__(self, msg: str, pos: int):
        super().__init__(msg)
        self.msg, self.pos = msg, pos


def parse_polynomial(text: str, ring: MonomialQuotientRing) -> Polynomial:
    """Parse ``text`` (variables, integers, + - * ^ and parentheses)."""
    try:
        return _PolyParser(text, ring).parse()
    except _ParseFailure as exc:
        raise SpecError(exc.msg, "<polynomial>", 1, exc.pos + 1) from None


def _split(entry: Entry, sep: str = ",") -> list[tuple[str, int]]:
    """Split a value at top-level separators, keeping each piece's column."""
    out, depth, start = [], 0, 0
    s = entry.value
    for k, ch in enumerate(s + sep):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if (ch == sep and depth == 0) or k == len(s):
            piece = s[start:k]
            lead = len(piece) - len(piece.lstrip())
            if piece.strip():
                out.append((piece.strip(), entry.col + start + lead))
            start = k + 1
    return out


def _int(spec: ProblemSpec, entry: Entry, text: str, col: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecError(f"expected an integer, got '{text}'", spec.path, entry.line, col) from None


def _poly(spec: ProblemSpec, entry: Entry, text: str, col: int, ring) -> Polynomial:
    try:
        return _PolyParser(text, ring).parse()
    except _ParseFailure as exc:
        raise SpecError(exc.msg, spec.path, entry.line, col + exc.pos) from None


def _monomial(spec: ProblemSpec, entry: Entry, text: str, col: int, ring) -> tuple:
    p = _poly(spec, entry, text, col, _free_version(ring))
    if not p.is_monomial() or any(c != 1 for c in p.terms.values()):
        raise SpecError(f"'{text}' is not a monomial", spec.path, entry.line, col)
    return next(iter(p.terms))


def _free_version(ring: MonomialQuotientRing) -> MonomialQuotientRing:
    return MonomialQuotientRing(ring.field, ring.variables, ring.weights)


# ---------------------------------------------------------------------------
# building objects


def build_ring(spec: ProblemSpec, field_override: Field | None = None, section: str = "ring") -> MonomialQuotientRing:
    sec = spec.sections.get(section)
    if sec is None:
        raise spec.error(f"missing [{section}] section")
    fe = sec.get("field")
    if field_override is not None:
        fld = field_override
    elif fe is None:
        fld = QQ
    else:
        try:
            fld = field_from_string(fe.value)
        except ValueError as exc:
            raise spec.error(str(exc), fe) from None
    ve = sec.get("variables")
    if ve is None:
        raise spec.error(f"[{section}] needs 'variables'")
    names = [t for t, _ in _split(ve)]
    for t, c in _split(ve):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", t):
            raise SpecError(f"bad variable name '{t}'", spec.path, ve.line, c)
    if len(set(names)) != len(names):
        raise spec.error("repeated variable name", ve)
    we = sec.get("weights")
    weights = None
    if we is not None:
        weights = [_int(spec, we, t, c) for t, c in _split(we)]
        if len(weights) != len(names):
            raise spec.error("one weight per variable", we)
        if any(w <= 0 for w in weights):
            raise spec.error("weights must be positive", we)
    base = MonomialQuotientRing(fld, names, weights)
    ie = sec.get("ideal")
    ideal = [_monomial(spec, ie, t, c, base) for t, c in _split(ie)] if ie is not None else []
    return MonomialQuotientRing(fld, names, weights, ideal)


def build_sequence(spec: ProblemSpec, ring: MonomialQuotientRing) -> GeneratingSequence:
    ee = spec.get("sequence", "elements")
    if ee is None:
        raise spec.error("missing [sequence] elements")
    elems = [_poly(spec, ee, t, c, ring) for t, c in _split(ee)]
    try:
        return GeneratingSequence(ring, elems)
    except ValueError as exc:
        raise spec.error(str(exc), ee) from None


def build_module(spec: ProblemSpec, ring: MonomialQuotientRing):
    sec = spec.sections.get("module")
    if sec is None:
        return GradedFPModule.free(ring, [0])
    ke = sec.get("kind")
    kind = ke.value if ke is not None else "free"
    if kind == "free":
        de = sec.get("degrees")
        degs = [_int(spec, de, t, c) for t, c in _split(de)] if de is not None else [0]
        return GradedFPModule.free(ring, degs)
    if kind in ("quotient", "monomial-quotient"):
        me = sec.get("monomials")
        if me is None:
            raise spec.error(f"module kind '{kind}' needs 'monomials'", ke)
        monos = [_monomial(spec, me, t, c, ring) for t, c in _split(me)]
        if kind == "quotient":
            return GradedFPModule.monomial_quotient(ring, monos)
        try:
            return FinDimModule.monomial_quotient(ring, monos)
        except ValueError as exc:
            raise spec.error(str(exc), me) from None
    if kind == "findim":
        de = sec.get("dim")
        if de is None:
            raise spec.error("findim module needs 'dim'", ke)
        n = _int(spec, de, de.value, de.col)
        mats = []
        for v in ring.variables:
            ae = sec.get(f"action.{v}")
            if ae is None:
                raise spec.error(f"findim module needs 'action.{v}'", ke)
            rows = []
            for rtext, rc in _split(ae, ";"):
                rows.append([ring.field(_int(spec, ae, t, rc)) for t in rtext.split()])
            if len(rows) != n or any(len(r) != n for r in rows):
                raise spec.error(f"action.{v} must be a {n}×{n} matrix", ae)
            mats.append(Matrix.from_rows(ring.field, rows, ncols=n))
        for key in sec:
            if key.startswith("action.") and key[7:] not in ring.variables:
                raise spec.error(f"action for unknown variable '{key[7:]}'", sec[key])
        try:
            return FinDimModule(ring, n, mats)
        except ValueError as exc:
            raise spec.error(str(exc), de) from None
    raise spec.error(f"unknown module kind '{kind}'", ke)


def param(spec: ProblemSpec, key: str, default: Any = None, kind: str = "int"):
    e = spec.get("params", key)
    if e is None:
        return default
    if kind == "int":
        return _int(spec, e, e.value, e.col)
    if kind == "window":
        return parse_window(e.value, spec, e)
    if kind == "ints":
        return [_int(spec, e, t, c) for t, c in _split(e)]
    return e.value


def parse_window(text: str, spec: ProblemSpec | None = None, entry: Entry | None = None) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", text)
    if m is None or int(m.group(1)) > int(m.group(2)):
        msg = f"window must be LO:HI with LO <= HI, got '{text}'"
        if spec is not None:
            raise spec.error(msg, entry)
        raise ValueError(msg)
    return int(m.group(1)), int(m.group(2))


def build_extension(spec: ProblemSpec, ring: MonomialQuotientRing) -> tuple[MonomialQuotientRing, dict]:
    sec = spec.sections.get("extension")
    if sec is None:
        raise spec.error("flat-base-change needs an [extension] section")
    ve = sec.get("variables")
    if ve is None:
        raise spec.error("[extension] needs 'variables'")
    names = [t for t, _ in _split(ve)]
    we = sec.get("weights")
    weights = [_int(spec, we, t, c) for t, c in _split(we)] if we is not None else None
    base = MonomialQuotientRing(ring.field, names, weights)
    ie = sec.get("ideal")
    ideal = [_monomial(spec, ie, t, c, base) for t, c in _split(ie)] if ie is not None else []
    target = MonomialQuotientRing(ring.field, names, weights, ideal)
    me = sec.get("map")
    phi = {}
    if me is None:
        phi = {v: v for v in ring.variables}
    else:
        for t, c in _split(me):
            if ":" not in t:
                raise SpecError("map entries look like 'x:x'", spec.path, me.line, c)
            a, b = (u.strip() for u in t.split(":", 1))
            phi[a] = b
    return target, phi
