"""Full-scale formula-versus-brute-force runs, one per acceptance criterion.

Each test prints a single PASS/FAIL line (with case count and wall time) and
fails if any case disagrees or a runtime limit is exceeded.
"""

import pytest

from gaussforms.suites import SUITES, Scale

SCALE = Scale(seed=0)


@pytest.mark.slow
@pytest.mark.parametrize("number,suite", list(enumerate(SUITES, start=1)),
                         ids=[f"criterion-{i:02d}" for i in range(1, len(SUITES) + 1)])
def test_criterion(number, suite, capsys):
    result = suite(SCALE)
    assert result.number == number
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.passed, result.failures[:5]
