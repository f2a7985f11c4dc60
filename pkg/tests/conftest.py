from fractions import Fraction

import pytest

from ppdeconv.process import JanossyProcess, StateSpace


@pytest.fixture
def one_point():
    return StateSpace(("a",))


@pytest.fixture
def bernoulli(one_point):
    """A single point at ``a`` with probability 1/2."""
    return JanossyProcess(one_point, 1, Fraction(1, 2), {(0,): Fraction(1, 2)})


@pytest.fixture
def abc():
    return StateSpace(("a", "b", "c"))


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[2:])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")
