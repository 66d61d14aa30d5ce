import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from trifree.graph import EdgeSet, Graph


@pytest.fixture
def k3() -> Graph:
    return Graph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def c4() -> Graph:
    return Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def k4() -> Graph:
    return Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def bowtie() -> Graph:
    # triangles {0,1,2} and {2,3,4} sharing node 2
    return Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])


@pytest.fixture
def pendants() -> tuple[Graph, EdgeSet]:
    # triangle {0,1,2} with pendant edges 0-3 and 1-4; the matching
    # {0-3, 0-1, 1-4} admits a closed augmenting trail but no augmenting path
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])
    m = EdgeSet.of(g, [3, 0, 4])
    return g, m
