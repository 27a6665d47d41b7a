"""Regenerate the golden CSV files used by tests/test_golden.py.

Run after an intentional change to numerical output:

    python scripts/regen_golden.py
"""

import json
import sys
from pathlib import Path

from epikit.cli import main

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def regenerate() -> int:
    cases = json.loads((GOLDEN / "cases.json").read_text())
    for name, argv in cases.items():
        out = GOLDEN / f"{name}.csv"
        rc = main([*argv, "--out", str(out), "--stats", "/dev/null"] if argv[0] == "simulate"
                  else [*argv, "--out", str(out)])
        if rc != 0:
            print(f"{name}: exit {rc}", file=sys.stderr)
            return rc
        print(f"{name}: {out.stat().st_size} bytes")
    return 0


if __name__ == "__main__":
    sys.exit(regenerate())
