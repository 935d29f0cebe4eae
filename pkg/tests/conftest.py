import numpy as np
import pytest
from hypothesis import strategies as st

from permkernels.perm import Permutation


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def permutations_of(draw, d):
    return Permutation(1 + x for x in draw(st.permutations(range(d))))


@st.composite
def perm_triples(draw, max_d=8):
    d = draw(st.integers(min_value=2, max_value=max_d))
    return draw(permutations_of(d)), draw(permutations_of(d)), draw(permutations_of(d))


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record the one-line verdict for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
