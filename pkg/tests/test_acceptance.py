"""Acceptance criteria 1-11 at their stated tolerances.

Each test prints one PASS/FAIL line; the session summary repeats them in order.
"""

import pytest

from equiforms.verify import CRITERIA, timed_criterion

# runtime budgets in seconds, where the criterion states one
BUDGET = {1: 1.0, 2: 10.0, 3: 30.0, 6: 60.0}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_log):
    title = CRITERIA[n][0]
    records, secs = timed_criterion(n, seed=0, tol=None)
    failed = [r for r in records if not r.passed]
    ok = bool(records) and not failed and secs <= BUDGET.get(n, float("inf"))
    acceptance_log[n] = (title, ok, secs)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(records) - len(failed)}/{len(records)} checks, {secs:.2f}s) {title}")
    for r in failed:
        print(f"  failed: {r.check} deviation={r.deviation} tolerance={r.tolerance}")
    assert records
    assert not failed
    assert secs <= BUDGET.get(n, float("inf"))
