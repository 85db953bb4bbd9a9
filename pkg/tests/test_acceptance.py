"""Acceptance gate: criteria 1-11, one PASS/FAIL line each in the terminal summary."""

import subprocess
import sys
import time

import pytest

from alfeld import acceptance

# seconds; criteria without a stated budget get None
LIMITS = {1: 1.0, 2: 60.0, 3: 30.0, 4: 1.0, 8: 120.0}
SEED = 0

RUNNERS = {
    1: acceptance.criterion_1,
    2: acceptance.criterion_2,
    3: acceptance.criterion_3,
    4: acceptance.criterion_4,
    5: acceptance.criterion_5,
    6: lambda: acceptance.criterion_6(SEED),
    7: acceptance.criterion_7,
    8: lambda: acceptance.criterion_8(SEED),
    9: acceptance.criterion_9,
    10: acceptance.criterion_10,
}


def _record(request, number, name, passed, elapsed):
    request.config._acceptance_lines.append(
        f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {name}  ({elapsed:.2f} s)"
    )


@pytest.mark.parametrize("number", sorted(RUNNERS))
def test_criterion(number, request):
    start = time.perf_counter()
    result = RUNNERS[number]()
    elapsed = time.perf_counter() - start
    limit = LIMITS.get(number)
    within = limit is None or elapsed < limit
    _record(request, number, result.name, result.passed and within, elapsed)
    assert result.number == number
    assert result.passed, result.details
    assert within, f"took {elapsed:.2f} s, limit {limit} s"


def test_criterion_11_repeat_runs_identical(request):
    cmd = [sys.executable, "-m", "alfeld", "verify-all", "--suite", "desk", "--seed", str(SEED)]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    elapsed = time.perf_counter() - start
    same = first.stdout == second.stdout and first.returncode == second.returncode == 0
    _record(request, 11, "repeat run serializes identically", same, elapsed)
    assert first.returncode == 0, first.stderr.decode()
    assert first.stdout == second.stdout
