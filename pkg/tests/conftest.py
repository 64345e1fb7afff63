import numpy as np
import pytest

from cliquewalk import generators
from cliquewalk.graph_core import Graph, validate


def cycle_square(n):
    """C_n^2: distance-1 and distance-2 chords; 4-regular, edges as cliques.

    For odd n this is a clustered expander whose second eigenvalue exceeds
    2 sqrt((d-1)(l-1)), landing in the large-lambda2 comparison case.
    """
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((i, (i + 2) % n))
    graph = Graph.from_edges(n, edges)
    return validate(graph, graph.edges())


@pytest.fixture(scope="session")
def petersen():
    return generators.petersen()


@pytest.fixture(scope="session")
def rook3():
    return generators.rook_graph(3)


@pytest.fixture(scope="session")
def rook4():
    return generators.rook_graph(4)


@pytest.fixture(scope="session")
def latin4():
    return generators.latin_square_graph(generators.latin_square_cyclic(4))


@pytest.fixture(scope="session")
def latin5():
    return generators.latin_square_graph(generators.latin_square_cyclic(5))


@pytest.fixture(scope="session")
def octahedron():
    return generators.line_graph(generators.complete_graph(4))


@pytest.fixture(scope="session")
def ols73():
    return generators.ols_graph(generators.mols_prime(7, 3))


def lapack_spectrum(crg):
    """Independent eigenvalue oracle for tests."""
    return np.sort(np.linalg.eigvalsh(crg.graph.adjacency_matrix(dtype=float)))[::-1]
