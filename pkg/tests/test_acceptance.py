import pytest

from kdichotomy import verify

# collected here and echoed by the terminal summary hook in conftest
LINES: list[str] = []


@pytest.mark.slow
@pytest.mark.parametrize("criterion", verify.CRITERIA, ids=lambda fn: f"criterion_{fn.number:02d}")
def test_criterion(criterion):
    result = criterion()
    LINES.append(result.line())
    print(result.line())
    assert result.passed, result.line()
