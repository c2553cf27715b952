import numpy as np
import pytest
from hypothesis import strategies as st

from maxplus_games import Capacity, Density, FiniteSpace, Game
from maxplus_games.sampling import monotone_hull

SEED = 20261016


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def ab():
    return FiniteSpace(("a", "b"))


@pytest.fixture
def two_player():
    """Two players on {a, b}; player 1 gets 1 for a and 0 for b, player 2 gets 0."""
    return Game(
        ("P1", "P2"),
        (FiniteSpace(("a", "b")), FiniteSpace(("a", "b"))),
        (np.array([[1.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2))),
    )


def space_of_size(n, prefix="x"):
    return FiniteSpace(tuple(f"{prefix}{k}" for k in range(n)))


unit = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def densities(draw, n=None, prefix="x"):
    if n is None:
        n = draw(st.integers(1, 5))
    w = draw(st.lists(unit, min_size=n, max_size=n))
    w[draw(st.integers(0, n - 1))] = 1.0
    return Density(space_of_size(n, prefix), w)


@st.composite
def capacities(draw, n=None, prefix="x"):
    if n is None:
        n = draw(st.integers(1, 4))
    raw = np.array(draw(st.lists(unit, min_size=1 << n, max_size=1 << n)))
    v = monotone_hull(raw)
    v[0], v[-1] = 0.0, 1.0
    return Capacity(space_of_size(n, prefix), v)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one pass/fail line for an acceptance criterion."""

    def _record(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
