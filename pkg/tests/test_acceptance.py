"""Acceptance criteria, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are also repeated in
the terminal summary.  Run this file directly to print the lines without
pytest.
"""
import subprocess
import sys

import pytest

from weightlab.suite import CRITERIA, run_criterion

SEED = 42
ACCEPTANCE_LINES: list[str] = []


def _record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number, SEED)
    _record(result.line())
    assert result.passed, result.payload
    assert result.within_time, f"took {result.seconds:.1f} s, limit {result.limit:.0f} s"


def _suite_bytes() -> bytes:
    proc = subprocess.run([sys.executable, "-m", "weightlab.cli", "suite", "--seed", str(SEED)],
                          capture_output=True, check=False)
    assert proc.returncode == 0, proc.stderr.decode()
    return proc.stdout


def test_criterion_8_determinism():
    first, second = _suite_bytes(), _suite_bytes()
    same = first == second
    _record(f"[{'PASS' if same else 'FAIL'}] criterion 8: deterministic suite payload "
            f"({len(first)} bytes, identical={same})")
    assert same


if __name__ == "__main__":
    ok = True
    for n in sorted(CRITERIA):
        res = run_criterion(n, SEED)
        print(res.line())
        ok &= res.passed and res.within_time
    same = _suite_bytes() == _suite_bytes()
    print(f"[{'PASS' if same else 'FAIL'}] criterion 8: deterministic suite payload")
    sys.exit(0 if ok and same else 1)
