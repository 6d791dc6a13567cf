"""Headline acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line; the lines are collected and shown
again in the terminal summary.
"""

import pytest

from qbound.checks import CHECKS, _run


@pytest.mark.parametrize("check", CHECKS, ids=[c.key for c in CHECKS])
def test_criterion(check, acceptance_log):
    result = _run(check.key, check.title, check.fn)
    line = result.line()
    print(line)
    acceptance_log.append(line)
    assert result.passed, line
