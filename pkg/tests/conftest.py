import numpy as np
import pytest

from lscomp import Assignment, Cost, FieldSpec, bundled_path

EX851_TEXT = """\
0 0 0 0 * * * *
0 0 0 0 * * * *
* * * 0 0 0 0 0
* * * 0 * 0 * *
0 * * * * * * *
"""

FOOTNOTE3_TEXT = """\
0 0 0 * *
0 0 0 * 0
* * * 0 *
"""


@pytest.fixture(scope="session")
def ex851():
    return Assignment.parse(EX851_TEXT)


@pytest.fixture(scope="session")
def footnote3():
    return Assignment.parse(FOOTNOTE3_TEXT)


@pytest.fixture(scope="session")
def default_field():
    return FieldSpec()


@pytest.fixture(scope="session")
def small_field():
    return FieldSpec(10007, allow_small=True)


@pytest.fixture(scope="session")
def tiny_field():
    return FieldSpec(7, allow_small=True)


def test_bundled_files_match_fixtures(ex851, footnote3):
    assert Assignment.load(bundled_path("ex851")) == ex851
    assert Assignment.load(bundled_path("footnote3")) == footnote3


def random_assignment(rng: np.random.Generator, n: int, k: int,
                      min_max_support: int = 1) -> Assignment:
    """Random valid assignment: every dataset held somewhere, and at least one
    worker holding min_max_support datasets (so costs up to that are in range)."""
    while True:
        pattern = (rng.integers(0, 2, size=(n, k)) == 1)
        for col in range(k):
            if not pattern[:, col].any():
                pattern[int(rng.integers(0, n)), col] = True
        a = Assignment([list(row) for row in pattern])
        if a.max_support_size() >= min_max_support:
            return a


STANDARD_COSTS = [Cost(1, 2), Cost(1), Cost(3, 2), Cost(2)]
