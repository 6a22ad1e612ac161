"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line (also collected into the pytest
terminal summary).  Run directly with ``python3 tests/test_acceptance.py``
for the same lines without pytest.
"""

import sys

import pytest

from curved_dirac import checks

RUNTIME_LIMITS = {1: 1.0, 2: 1.0}  # seconds
SUMMARY: list[str] = []


def criterion_line(number: int):
    passed, rows, secs = checks.run_criterion(number)
    limit = RUNTIME_LIMITS.get(number)
    in_time = limit is None or secs < limit
    ok = passed and in_time
    title = checks.CHECKS[number][0]
    timing = f"{secs:.2f} s" + (f" (limit {limit:.0f} s)" if limit else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} [{timing}]"
    return ok, line, rows


@pytest.mark.parametrize("number", sorted(checks.CHECKS))
def test_criterion(number):
    ok, line, rows = criterion_line(number)
    SUMMARY.append(line)
    print(line)
    for r in rows:
        print("    " + r.line())
    failed = [r.line() for r in rows if not r.passed]
    assert ok, "\n".join([line] + failed)


if __name__ == "__main__":
    results = [criterion_line(n) for n in sorted(checks.CHECKS)]
    for ok, line, _ in results:
        print(line)
    sys.exit(0 if all(ok for ok, _, _ in results) else 1)
