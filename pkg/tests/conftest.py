import json
from pathlib import Path

import pytest

from taiko_search.core import Parity, from_cells

FIXTURES = Path(__file__).parent / "fixtures"

# Example 2.6: the 4x4 even partition with four color classes and exact
# girth pair (3,3).
EXAMPLE26_CELLS = [
    [(1, 1), (2, 2)], [(1, 2), (3, 3)], [(2, 1), (3, 2)], [(1, 3), (4, 4)],
    [(2, 3), (4, 1)], [(1, 4), (3, 1)], [(2, 4), (4, 2)], [(4, 3), (3, 4)],
]

# The three 2-cell search nodes and the five 3-cell search nodes that the
# depth-3 case analysis produces (the third 2-cell node per the worked
# figure: its second cell contains the forced edge (1,2)).
LEVEL2_NODES = [
    (((1, 1), (2, 2)), ((1, 2), (2, 3))),
    (((1, 1), (2, 2)), ((1, 2), (3, 3))),
    (((1, 1), (2, 2)), ((1, 2), (3, 1))),
]
LEVEL3_NODES = [
    (((1, 1), (2, 2)), ((1, 2), (2, 3)), ((2, 1), (3, 4))),
    (((1, 1), (2, 2)), ((1, 2), (3, 3)), ((1, 4), (2, 1))),
    (((1, 1), (2, 2)), ((1, 2), (3, 3)), ((2, 1), (4, 2))),
    (((1, 1), (2, 2)), ((1, 2), (3, 3)), ((2, 1), (4, 4))),
    (((1, 1), (2, 2)), ((1, 2), (3, 1)), ((2, 1), (4, 3))),
]


@pytest.fixture(scope="session")
def example26():
    return from_cells(4, 4, Parity.EVEN, EXAMPLE26_CELLS)


@pytest.fixture(scope="session")
def example26_fixture_path():
    return str(FIXTURES / "example26.json")


@pytest.fixture(scope="session")
def broken2x2_fixture_path():
    return str(FIXTURES / "broken2x2.json")


@pytest.fixture(scope="session")
def fold_fixture_path():
    return str(FIXTURES / "fold4cell.json")


def subpartition(m, n, cells, parity=Parity.EVEN):
    return from_cells(m, n, parity, cells)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
