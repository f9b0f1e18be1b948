"""Acceptance gate: one test per criterion plus its wall-time budget.

Each criterion prints a single ``[PASS]``/``[FAIL]`` line, repeated in the
terminal summary.  Correctness checks are exact (zero tolerance); the
budgets below are the only numeric tolerances.
"""
import pytest
from conftest import ACCEPTANCE_LINES

from clusterbraid.suites import CRITERIA, criteria_for_tier, extended_plucker_compatibility

SEED = 0

# seconds; criterion 1 and 2 are budgeted per part, the others as a whole
BUDGETS = {
    1: {"Gr(4,8)": 60, "Gr(3,9)": 600},
    2: 60,
    3: 120,
    4: 60,
    5: 300,
    6: 300,
    7: 300,
    8: None,
}

_results = {}


def result_for(number):
    if number not in _results:
        kwargs = {}
        if number in (6, 7, 8):
            kwargs["seed"] = SEED
        if number in (1, 7):
            kwargs["threads"] = 1
        _results[number] = CRITERIA[number](**kwargs)
    return _results[number]


def report(capsys, line):
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)


@pytest.mark.parametrize("number", criteria_for_tier(2))
def test_criterion(number, capsys):
    result = result_for(number)
    report(capsys, result.line())
    assert result.passed, result.to_json()


def over_budget(number, result):
    budget = BUDGETS[number]
    if budget is None:
        return []
    if isinstance(budget, dict):
        return [(part, t, budget[part]) for part, t in result.timings.items() if t > budget[part]]
    if number == 2:
        return [(part, t, budget) for part, t in result.timings.items() if t > budget]
    return [("total", result.elapsed, budget)] if result.elapsed > budget else []


@pytest.mark.parametrize("number", criteria_for_tier(2))
def test_criterion_time_budget(number, capsys):
    result = result_for(number)
    late = over_budget(number, result)
    status = "PASS" if not late else "FAIL"
    parts = ", ".join(f"{p} {t:.1f}s > {b}s" for p, t, b in late) or "within budget"
    report(capsys, f"[{status}] criterion {number} time budget: {parts}")
    assert not late


def test_tier3_tripod_compatibility(capsys):
    result = extended_plucker_compatibility()
    report(capsys, result.line())
    assert result.passed, result.to_json()
