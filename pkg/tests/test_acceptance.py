"""One test per acceptance criterion; each prints a single pass/fail line."""

import pytest

from spanwork.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=lambda k: f"criterion_{k}")
def test_criterion(number, acceptance_log):
    result = run_criterion(number)
    line = result.line()
    print(line)
    acceptance_log.append(line)
    assert result.passed, result.detail
