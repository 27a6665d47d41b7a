"""Byte-for-byte comparison of CLI output against the stored golden files.

Regenerate with ``python scripts/regen_golden.py`` after an intentional change.
"""

import json
from pathlib import Path

import pytest

from epikit import scenarios
from epikit.cli import main

GOLDEN = Path(__file__).parent / "golden"
CASES = json.loads((GOLDEN / "cases.json").read_text())


@pytest.mark.parametrize("name", sorted(CASES))
def test_cli_output_matches_golden(name, tmp_path):
    argv = CASES[name]
    out = tmp_path / f"{name}.csv"
    extra = ["--stats", str(tmp_path / "stats.json")] if argv[0] == "simulate" else []
    assert main([*argv, "--out", str(out), *extra]) == 0
    assert out.read_bytes() == (GOLDEN / f"{name}.csv").read_bytes()


def test_every_preset_has_a_golden_case():
    covered = {argv[argv.index("--preset") + 1] for argv in CASES.values() if "--preset" in argv}
    assert covered == set(scenarios.PRESETS)
