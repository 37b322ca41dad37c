import io
import json
from pathlib import Path

import pytest

from mgmkit.cli import DEFAULT_SEED, EXIT_INPUT, TASKS, build_parser, parse_record, record_key, render_records, run

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

FAST = [
    (["wpr-check", "regular_xy.txt"], 0),
    (["local-cohomology", "local_cohomology_x.txt"], 0),
    (["completion", "completion_free.txt"], 0),
    (["mgm-verify", "mgm_x2y2.txt"], 0),
    (["dedualizing-check", "dedualizing_x.txt"], 0),
    (["radical-invariance", "radical_truncated.txt"], 0),
    (["radical-invariance", "radical_counterexample.txt"], 0),
    (["flat-base-change", "flat_base_change.txt"], 0),
    (["counterexample", "--levels", "6"], 1),
    (["coalg-verify", "--count", "5"], 0),
]


def argv_for(args):
    return [str(PROBLEMS / a) if a.endswith(".txt") else a for a in args]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def machine(args, tmp_path):
    path = tmp_path / "records.txt"
    code, _, err = invoke(argv_for(args) + ["--quiet", "--machine-out", str(path)])
    return code, path.read_text(encoding="utf-8"), err


@pytest.mark.parametrize("args,expected", FAST, ids=lambda a: " ".join(a) if isinstance(a, list) else str(a))
def test_exit_codes_and_records(args, expected, tmp_path):
    code, text, err = machine(args, tmp_path)
    assert code == expected, err
    lines = text.splitlines()
    assert lines
    recs = [parse_record(line) for line in lines]
    for r in recs:
        assert r["qualification"]
    keys = [record_key(r) for r in recs]
    assert keys == sorted(keys)
    # rendering the parsed records again gives the same bytes
    assert render_records(recs) == text


@pytest.mark.parametrize("args,expected", FAST[:3] + FAST[8:9])
def test_rerun_is_byte_identical(args, expected, tmp_path):
    a = machine(args, tmp_path)
    b = machine(args, tmp_path)
    assert a == b


def test_counterexample_records_carry_certificates(tmp_path):
    code, text, _ = machine(["counterexample", "--levels", "6"], tmp_path)
    assert code == 1
    recs = [parse_record(line) for line in text.splitlines()]
    witnesses = [r for r in recs if "witness" in r]
    assert len(witnesses) == 15
    assert {(r["level"], r["target"]) for r in witnesses} == {(n, l) for n in range(2, 7) for l in range(1, n)}
    for r in witnesses:
        n, l = r["level"], r["target"]
        assert r["witness"] == f"x{n}"
        assert r["image"] == f"x{n}*s" + ("" if n - l == 1 else f"^{n - l}")
    certs = [r for r in recs if r["task"] == "counterexample/wpr"]
    assert certs
    for r in certs:
        assert r["verdict"] == "not-pro-zero-in-window"
        assert any(c["kind"] == "nonzero" for c in r["certificates"])


def test_human_report_and_stdout_records():
    code, out, _ = invoke(argv_for(["wpr-check", "regular_xy.txt", "--machine-out", "-"]))
    assert code == 0
    report, _, rest = out.partition("verdict: certified-pro-zero\n")
    assert report.startswith("weak proregularity")
    assert all(parse_record(line) for line in rest.splitlines())
    code, out, _ = invoke(argv_for(["wpr-check", "regular_xy.txt", "--quiet"]))
    assert code == 0 and out == ""


def test_flags_override_problem_file(tmp_path):
    code, text, _ = machine(["wpr-check", "regular_xy.txt", "--window", "0:2", "--levels", "4", "--lag", "2"],
                            tmp_path)
    assert code == 0
    recs = [json.loads(line) for line in text.splitlines()]
    assert all(r["qualification"]["window"] == [0, 2] for r in recs)
    assert all(r["qualification"]["N"] == 4 for r in recs)
    code, text, _ = machine(["wpr-check", "regular_xy.txt", "--field", "p:7"], tmp_path)
    assert code == 0


def test_malformed_monomial_is_input_error():
    code, out, err = invoke(argv_for(["wpr-check", "bad_exponent.txt"]))
    assert code == EXIT_INPUT
    assert "bad_exponent.txt:5:14" in err
    assert out == ""


@pytest.mark.parametrize("argv", [
    ["nope"],
    [],
    ["wpr-check"],
    ["counterexample", "--levels", "0"],
    ["counterexample", "--lag", "0"],
    ["counterexample", "--window", "5:1"],
    ["counterexample", "--field", "p:8"],
    ["coalg-verify", "--count", "x"],
    ["wpr-check", "/nonexistent/problem.txt"],
])
def test_bad_invocations_exit_3(argv):
    code, _, err = invoke(argv)
    assert code == EXIT_INPUT
    assert err.startswith("error:")


def test_mgm_verify_needs_findim_module(tmp_path):
    p = tmp_path / "p.txt"
    p.write_text("[ring]\nvariables = x\n[sequence]\nelements = x\n[module]\nkind = free\ndegrees = 0\n")
    code, _, err = invoke(["mgm-verify", str(p)])
    assert code == EXIT_INPUT and "finite-dimensional" in err


def test_parser_lists_every_task():
    parser = build_parser()
    for t in TASKS:
        assert parser.parse_args([t, "f.txt"] if t not in ("counterexample", "coalg-verify") else [t]).task == t
    sub = next(a for a in parser._actions if a.dest == "task").choices["coalg-verify"]
    assert str(DEFAULT_SEED) in sub.format_help()
