"""Command-line driver: ``mgmkit <task> [problem-file] [flags]``.

Exit codes: 0 certified / all checks passed, 1 verified negative (the
records carry the certificate), 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import mgm
from .coalg import coalg_suite
from .linalg import GF, Field, field_from_string
from .modules import FinDimModule
from .parse import (ProblemSpec, SpecError, build_extension, build_module, build_ring, build_sequence, param,
                    parse_file, parse_window)
from .towers import CERTIFIED, INCONCLUSIVE, NOT_PRO_ZERO

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3
DEFAULT_SEED = 20240601

TASKS = ("wpr-check", "local-cohomology", "completion", "mgm-verify", "dedualizing-check",
         "radical-invariance", "flat-base-change", "counterexample", "coalg-verify")
NEEDS_FILE = set(TASKS) - {"counterexample", "coalg-verify"}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# records


def plain(x):
    """JSON-ready copy: field elements become strings, tuples become lists."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    return str(x)


def _slot(v):
    return (0, 0) if v is None else (1, v)


def record_key(rec: dict) -> tuple:
    return (rec["task"], _slot(rec.get("i")), _slot(rec.get("d")), _slot(rec.get("level")))


def render_records(records: list[dict]) -> str:
    lines = [(record_key(r), json.dumps(plain(r), sort_keys=True, separators=(",", ":"), ensure_ascii=False))
             for r in records]
    lines.sort()
    return "".join(text + "\n" for _, text in lines)


def parse_record(line: str) -> dict:
    """Inverse of one line of ``render_records``; checks the required keys."""
    rec = json.loads(line)
    for key in ("task", "i", "d", "level", "qualification"):
        if key not in rec:
            raise ValueError(f"record lacks '{key}'")
    return rec


# ---------------------------------------------------------------------------
# shared setup


class Context:
    def __init__(self, args, spec: ProblemSpec | None):
        self.args = args
        self.spec = spec
        self.out: list[str] = []

    def say(self, line: str = "") -> None:
        self.out.append(line)

    @property
    def field(self) -> Field | None:
        if self.args.field is None:
            return None
        try:
            return field_from_string(self.args.field)
        except ValueError as exc:
            raise InputError(f"--field: {exc}") from None

    def ring(self):
        return build_ring(self.spec, self.field)

    def window(self, default):
        if self.args.window is not None:
            try:
                return parse_window(self.args.window)
            except ValueError as exc:
                raise InputError(f"--window: {exc}") from None
        if self.spec is not None:
            return param(self.spec, "window", default, "window")
        return default

    def levels(self, default=mgm.DEFAULT_LEVELS):
        if self.args.levels is not None:
            return self.args.levels
        return param(self.spec, "levels", default) if self.spec is not None else default

    def lag(self, default=mgm.DEFAULT_LAG):
        if self.args.lag is not None:
            return self.args.lag
        return param(self.spec, "lag", default) if self.spec is not None else default


def _verdict_exit(verdict: str) -> int:
    return {CERTIFIED: EXIT_OK, NOT_PRO_ZERO: EXIT_NEGATIVE}.get(verdict, EXIT_INCONCLUSIVE)


def _window_text(w) -> str:
    return "none" if w is None else f"[{w[0]}, {w[1]}]"


# ---------------------------------------------------------------------------
# tasks


def task_wpr(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    w, N, lag = ctx.window(mgm.DEFAULT_WINDOW), ctx.levels(), ctx.lag()
    rep = mgm.weak_proregularity_check(ring, s, w, N, lag)
    ctx.say(f"weak proregularity of {rep.sequence} over {ring}")
    ctx.say(f"  window {_window_text(w)}, N={N}, lag={lag}")
    bad = [(i, d) for (i, d), v in sorted(rep.cells.items()) if v.status != CERTIFIED]
    nonzero = sum(1 for (i, d), (z, dims) in rep.zero_towers.items() if not z)
    ctx.say(f"  {len(rep.cells)} towers H_i, i > 0; {nonzero} not identically zero")
    for i, d in bad[:12]:
        ctx.say(f"  H_{i} at degree {d}: {rep.cells[(i, d)].status}, dims {rep.zero_towers[(i, d)][1]}")
    ctx.say(f"verdict: {rep.verdict}")
    return rep.records(), _verdict_exit(rep.verdict)


def task_local_cohomology(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    M = build_module(ctx.spec, ring)
    N = ctx.levels()
    w = None if isinstance(M, FinDimModule) else ctx.window(mgm.DEFAULT_WINDOW)
    tab = mgm.local_cohomology_table(ring, s, M, w, N)
    ctx.say(f"local cohomology over {ring}, sequence {s}, window {_window_text(w)}, N={N}")
    for (i, d), c in sorted(tab.cells.items(), key=lambda kv: (kv[0][0], _slot(kv[0][1]))):
        if c.colim.dim or c.colim.status != "stabilized":
            where = "" if d is None else f"_{d}"
            ctx.say(f"  H^{i}{where} = {c.colim.dim} ({c.colim.status}, level {c.colim.level})")
    if tab.gamma_inclusion_match is not None:
        ctx.say(f"  H^0 against the torsion submodule: {'match' if tab.gamma_inclusion_match else 'MISMATCH'}")
    stable = all(c.colim.status == "stabilized" for c in tab.cells.values())
    if tab.gamma_inclusion_match is False:
        code = EXIT_NEGATIVE
    else:
        code = EXIT_OK if stable else EXIT_INCONCLUSIVE
    ctx.say("all cells stabilized" if stable else "some cells did not stabilize in the window")
    recs = tab.records()
    recs.append({"task": "local-cohomology", "i": None, "d": None, "level": None, "stabilized": stable,
                 "gamma_match": tab.gamma_inclusion_match, "qualification": mgm.qualification(w, N)})
    return recs, code


def task_completion(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    M = build_module(ctx.spec, ring)
    N, lag = ctx.levels(), ctx.lag()
    w = None if isinstance(M, FinDimModule) else ctx.window((0, 5))
    tab = mgm.derived_completion_table(ring, s, M, N, w, lag)
    ctx.say(f"derived completion over {ring}, sequence {s}, window {_window_text(w)}, N={N}, lag={lag}")
    for (i, d), lim in sorted(tab.limits.items(), key=lambda kv: (kv[0][0], _slot(kv[0][1]))):
        where = "" if d is None else f"_{d}"
        extra = ""
        if (i, d) in tab.completion_match:
            extra = ", matches truncated completion" if tab.completion_match[(i, d)] else ", MISMATCH"
        if (i, d) in tab.pro_zero:
            extra += f", tower {tab.pro_zero[(i, d)].status}"
        ctx.say(f"  lim H_{i}{where} = {lim.limit_dim} ({lim.status}){extra}")
    unstable = any(lim.status != "stabilized" for lim in tab.limits.values())
    negative = (any(v is False for v in tab.completion_match.values())
                or any(v.status == NOT_PRO_ZERO for v in tab.pro_zero.values()))
    open_ = any(v.status == INCONCLUSIVE for v in tab.pro_zero.values())
    code = EXIT_NEGATIVE if negative else EXIT_INCONCLUSIVE if (unstable or open_) else EXIT_OK
    return tab.records(), code


def _default_model(ring) -> str:
    return "telescope" if ring.nvars == 1 else "koszul"


def task_mgm(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    M = build_module(ctx.spec, ring)
    if not isinstance(M, FinDimModule):
        raise InputError("mgm-verify needs a finite-dimensional module (kind = findim or monomial-quotient)")
    n = param(ctx.spec, "n", None)
    lag = ctx.args.lag if ctx.args.lag is not None else param(ctx.spec, "lag", None)
    model = param(ctx.spec, "model", _default_model(ring), "str")
    direction = param(ctx.spec, "direction", "both", "str")
    if direction not in ("both", "torsion", "contra"):
        raise InputError(f"direction must be both, torsion or contra, got '{direction}'")
    if model not in ("telescope", "reduced", "koszul"):
        raise InputError(f"model must be telescope, reduced or koszul, got '{model}'")
    reports = []
    if direction in ("both", "torsion"):
        reports.append(mgm.mgm_duality_verify_torsion(M, s, n, lag, model))
    if direction in ("both", "contra"):
        reports.append(mgm.mgm_duality_verify_contra(M, s, n, lag, model))
    recs = []
    for r in reports:
        ctx.say(f"{r.direction} direction, model {r.model}, n={r.n}, lag={r.lag}, dim M = {r.module_dim}")
        ctx.say(f"  homology dims {r.dims()}")
        ctx.say(f"  comparison map rank {r.comparison_rank}, isomorphism: {r.comparison_iso}")
        ctx.say(f"  {'passed' if r.passed else 'FAILED'}")
        recs.extend(r.records())
    if all(r.passed for r in reports):
        code = EXIT_OK
    elif all(r.stable for r in reports):
        code = EXIT_NEGATIVE
    else:
        code = EXIT_INCONCLUSIVE
    return recs, code


def task_dedualizing(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    w, N, lag = ctx.window((0, 5)), ctx.levels(), ctx.lag()
    wpr = mgm.weak_proregularity_check(ring, s, w, N, lag)
    if wpr.verdict != CERTIFIED:
        ctx.say(f"weak proregularity is {wpr.verdict}; the dedualizing check needs a certified sequence")
        return wpr.records("dedualizing-check"), _verdict_exit(wpr.verdict)
    cl = param(ctx.spec, "compact_levels", [1, 2], "ints")
    rep = mgm.dedualizing_check(ring, s, N, w, lag, tuple(cl))
    ctx.say(f"dedualizing complex for {s} over {ring}, window {_window_text(w)}, N={N}, lag={lag}")
    ctx.say(f"  (i) width {rep.width} <= {rep.width_bound}: {rep.width_ok}")
    dims0 = {d: v["dim"] for (i, d), v in sorted(rep.homothety.items()) if i == 0}
    ctx.say(f"  (ii) H^0 dims by degree {dims0}, homothety isomorphic: {rep.homothety_ok}")
    ctx.say(f"  (iii) compact generators preserved: {rep.compact_ok}")
    ctx.say("passed" if rep.passed else "FAILED")
    unstable = any(v["status"] != "stabilized" for v in rep.homothety.values())
    code = EXIT_OK if rep.passed else EXIT_INCONCLUSIVE if unstable else EXIT_NEGATIVE
    return rep.records(), code


def task_radical(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    w, N, lag = ctx.window(mgm.DEFAULT_WINDOW), ctx.levels(), ctx.lag()
    powers = param(ctx.spec, "powers", [1, 2], "ints")
    if any(p < 1 for p in powers):
        raise InputError("powers must be positive")
    rep = mgm.radical_invariance_suite(ring, s, powers, w, N, lag)
    ctx.say(f"radical invariance for {s} over {ring}, N={N}, lag={lag}")
    for p, v in sorted(rep.verdicts.items()):
        ctx.say(f"  s^[{p}] over window {_window_text(rep.windows[p])}: {v}")
    ctx.say(f"verdicts agree: {rep.agree}")
    if not rep.agree:
        code = EXIT_NEGATIVE
    elif INCONCLUSIVE in rep.verdicts.values():
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    return rep.records(), code


def task_flat(ctx: Context):
    ring = ctx.ring()
    s = build_sequence(ctx.spec, ring)
    target, phi = build_extension(ctx.spec, ring)
    w, N, lag = ctx.window(mgm.DEFAULT_WINDOW), ctx.levels(), ctx.lag()
    rep = mgm.flat_base_change_check(ring, target, phi, s, w, N, lag)
    ctx.say(f"flat base change {ring} -> {target}, window {_window_text(w)}, N={N}, lag={lag}")
    ctx.say(f"  source verdict {rep.source.verdict}, target verdict {rep.target.verdict}")
    ctx.say(f"  implication holds: {rep.implication_holds}; Koszul homology matches: {rep.homology_match}")
    if not (rep.implication_holds and rep.homology_match):
        code = EXIT_NEGATIVE
    elif rep.source.verdict == INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    return rep.records() + rep.source.records("flat-base-change/source") + \
        rep.target.records("flat-base-change/target"), code


def task_counterexample(ctx: Context):
    nv = ctx.args.vars
    if nv is None:
        nv = param(ctx.spec, "num_vars", 8) if ctx.spec is not None else 8
    if nv < 1:
        raise InputError("--vars must be positive")
    w, N, lag = ctx.window(mgm.DEFAULT_WINDOW), ctx.levels(), ctx.lag()
    rep = mgm.counterexample_report(nv, N, w, lag, ctx.field)
    ctx.say(f"counterexample ring with {nv} variables, window {_window_text(w)}, N={N}, lag={lag}")
    for d, dims in sorted(rep.dims.items()):
        if any(dims):
            ctx.say(f"  H_1 at degree {d}: dims by level {dims} (oracle {rep.oracle_dims[d]})")
    ctx.say(f"  dims match the annihilator count: {rep.dims_match}")
    ctx.say(f"  {len(rep.witnesses)} witnesses, all nonzero and as predicted: {rep.witnesses_ok}")
    ctx.say(f"verdict: {rep.verdict}")
    if rep.verdict == NOT_PRO_ZERO and rep.dims_match and rep.witnesses_ok:
        code = EXIT_NEGATIVE
    elif rep.verdict == CERTIFIED:
        code = EXIT_OK
    else:
        code = EXIT_INCONCLUSIVE
    return rep.records() + [r for r in rep.wpr.records("counterexample/wpr") if r["verdict"] == NOT_PRO_ZERO
                            and r["i"] is not None], code


def task_coalg(ctx: Context):
    seed = ctx.args.seed
    if seed is None:
        seed = param(ctx.spec, "seed", DEFAULT_SEED) if ctx.spec is not None else DEFAULT_SEED
    count = ctx.args.count
    if count is None:
        count = param(ctx.spec, "count", 100) if ctx.spec is not None else 100
    if count < 1:
        raise InputError("--count must be positive")
    rep = coalg_suite(seed, count, ctx.field or GF(101))
    ctx.say(f"coalgebra suite: {count} random instances over {rep.field}, seed {seed}")
    for f in rep.failures:
        ctx.say(f"  instance {f['index']} FAILED: {f}")
    ctx.say("all instances passed" if rep.passed else f"{len(rep.failures)} failures")
    return rep.records(), EXIT_OK if rep.passed else EXIT_NEGATIVE


DISPATCH: dict[str, Callable] = {
    "wpr-check": task_wpr,
    "local-cohomology": task_local_cohomology,
    "completion": task_completion,
    "mgm-verify": task_mgm,
    "dedualizing-check": task_dedualizing,
    "radical-invariance": task_radical,
    "flat-base-change": task_flat,
    "counterexample": task_counterexample,
    "coalg-verify": task_coalg,
}


# ---------------------------------------------------------------------------
# entry point


def _common(p: argparse.ArgumentParser, needs_file: bool) -> None:
    if needs_file:
        p.add_argument("problem", help="problem file")
    else:
        p.add_argument("problem", nargs="?", help="optional problem file")
    p.add_argument("--window", metavar="LO:HI", help="degree window")
    p.add_argument("--levels", type=int, metavar="N", help="number of tower levels")
    p.add_argument("--lag", type=int, metavar="L", help="lag bound for pro-zero certificates")
    p.add_argument("--field", metavar="q|p:PRIME", help="override the coefficient field")
    p.add_argument("--seed", type=int, metavar="S", help=f"seed for randomized suites (default {DEFAULT_SEED})")
    p.add_argument("--machine-out", metavar="PATH", help="write result records here ('-' for stdout)")
    p.add_argument("--quiet", action="store_true", help="suppress the human-readable report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mgmkit", description="Exact checks of torsion/completion dualities at desk scale.")
    sub = parser.add_subparsers(dest="task", metavar="task", parser_class=_Parser)
    sub.required = True
    for name in TASKS:
        p = sub.add_parser(name, help=DISPATCH[name].__name__.replace("task_", "").replace("_", " "))
        _common(p, name in NEEDS_FILE)
        if name == "counterexample":
            p.add_argument("--vars", type=int, metavar="V", help="number of variables (default 8)")
        if name == "coalg-verify":
            p.add_argument("--count", type=int, metavar="K", help="number of random instances (default 100)")
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        for flag in ("levels", "count", "vars"):
            if getattr(args, flag, None) is not None and getattr(args, flag) < 1:
                raise InputError(f"--{flag} must be positive")
        if args.lag is not None and args.lag < 1:
            raise InputError("--lag must be positive")
        spec = parse_file(args.problem) if args.problem else None
        ctx = Context(args, spec)
        records, code = DISPATCH[args.task](ctx)
    except (SpecError, InputError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    if not args.quiet:
        stdout.write("".join(line + "\n" for line in ctx.out))
    if args.machine_out:
        text = render_records(records)
        if args.machine_out == "-":
            stdout.write(text)
        else:
            with open(args.machine_out, "w", encoding="utf-8") as fh:
                fh.write(text)
    return code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))

if __name__ == "__main__":
    main()
