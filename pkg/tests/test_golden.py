"""Frozen machine output for the quick fixtures.

Regenerate with ``MGMKIT_REGEN=1 pytest tests/test_golden.py`` after an
intended change to the record format, and review the diff.
"""

import io
import os
from pathlib import Path

import pytest

from mgmkit.cli import run

HERE = Path(__file__).resolve().parent
PROBLEMS = HERE.parent / "problems"
GOLDEN = HERE / "golden"

CASES = {
    "regular_xy": ["wpr-check", "regular_xy.txt"],
    "local_cohomology_x": ["local-cohomology", "local_cohomology_x.txt"],
    "completion_free": ["completion", "completion_free.txt"],
    "mgm_x2y2": ["mgm-verify", "mgm_x2y2.txt"],
    "dedualizing_x": ["dedualizing-check", "dedualizing_x.txt"],
    "radical_truncated": ["radical-invariance", "radical_truncated.txt"],
    "radical_counterexample": ["radical-invariance", "radical_counterexample.txt"],
    "flat_base_change": ["flat-base-change", "flat_base_change.txt"],
    "counterexample_6": ["counterexample", "--levels", "6"],
    "coalg_5": ["coalg-verify", "--count", "5"],
}


def records(args):
    argv = [str(PROBLEMS / a) if a.endswith(".txt") else a for a in args]
    out = io.StringIO()
    run(argv + ["--quiet", "--machine-out", "-"], out, io.StringIO())
    return out.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    path = GOLDEN / f"{name}.jsonl"
    text = records(CASES[name])
    if os.environ.get("MGMKIT_REGEN"):
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")
