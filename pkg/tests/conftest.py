import pytest

from expander_routing.graph import Digraph, UndirectedGraph


@pytest.fixture
def triangle():
    return Digraph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def k4():
    return UndirectedGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def c8():
    return UndirectedGraph(8, [(i, (i + 1) % 8) for i in range(8)])
