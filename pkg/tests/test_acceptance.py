"""Release gate: every criterion runs at its stated tolerance and prints one
pass/fail line.  Run with ``pytest -s tests/test_acceptance.py`` to see the
lines as they complete, or via the CLI: ``hintedls verify``."""

import pytest

from hintedls import acceptance


@pytest.mark.parametrize("func", acceptance.ALL_CRITERIA,
                         ids=[f.__name__ for f in acceptance.ALL_CRITERIA])
def test_criterion(func):
    result = acceptance.run_criterion(func)
    print(result.line())
    assert result.passed, result.detail
