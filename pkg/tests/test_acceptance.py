"""Acceptance gate: the ten release criteria, one test per criterion.

Each test runs a single criterion end to end at its frozen tolerances and
prints the standard one-line PASS/FAIL summary, so `pytest -v -s` doubles
as the acceptance report.  The same checks back the `verify` CLI mode.
"""

import pytest

from branchedq.acceptance import CRITERIA, run_acceptance

CRITERION_IDS = [cid for cid, _, _ in CRITERIA]


@pytest.mark.parametrize("cid", CRITERION_IDS)
def test_criterion(cid):
    result = run_acceptance([cid])[0]
    print(result.line())
    assert result.passed, result.line()
