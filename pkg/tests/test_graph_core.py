import json

import numpy as np
import pytest

from cliquewalk import generators
from cliquewalk.errors import (
    EdgeDoubleCovered,
    EdgeUncovered,
    GraphFileError,
    IrregularCliqueMembership,
    MixedCliqueOrder,
    NotAClique,
    TooLarge,
    ValidationError,
)
from cliquewalk.graph_core import (
    Graph,
    check_incidence_identity,
    from_json_dict,
    graph_sha256,
    incidence_matrix,
    load_graph_json,
    save_graph_json,
    structural_flags,
    to_json_dict,
    validate,
)


def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def five_cycle():
    return Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])


def rook4_cliques():
    rows = [[i * 4 + j for j in range(4)] for i in range(4)]
    cols = [[i * 4 + j for i in range(4)] for j in range(4)]
    return rows + cols


def rook4_graph():
    edges = set()
    for c in rook4_cliques():
        for i in range(4):
            for j in range(i + 1, 4):
                edges.add((min(c[i], c[j]), max(c[i], c[j])))
    return Graph.from_edges(16, sorted(edges))


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            Graph.from_edges(2, [(0, 0)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValidationError):
            Graph.from_edges(2, [(0, 1), (1, 0)])

    def test_adjacency_matrix_symmetric(self):
        g = five_cycle()
        a = g.adjacency_matrix()
        assert np.array_equal(a, a.T)
        assert a.sum() == 2 * g.edge_count()


class TestValidate:
    def test_triangle_single_clique(self):
        crg = validate(triangle(), [[0, 1, 2]])
        assert (crg.d, crg.l) == (1, 3)
        assert crg.flags.complete

    def test_five_cycle_edges_as_cliques(self):
        g = five_cycle()
        crg = validate(g, g.edges())
        assert (crg.d, crg.l) == (2, 2)
        assert not crg.flags.bipartite

    def test_rook4(self):
        crg = validate(rook4_graph(), rook4_cliques())
        assert (crg.d, crg.l) == (2, 4)
        assert crg.degree == 6
        assert all(deg == 6 for deg in crg.graph.degrees())

    def test_clique_edge_budget(self):
        # sum over cliques of C(l,2) equals |E| for every valid partition
        for crg in (generators.petersen(), generators.rook_graph(3)):
            total = len(crg.cliques) * crg.l * (crg.l - 1) // 2
            assert total == crg.graph.edge_count()

    def test_not_a_clique(self):
        g = five_cycle()
        with pytest.raises(NotAClique):
            validate(g, [[0, 1, 2], [2, 3, 4]])

    def test_edge_uncovered(self):
        g = five_cycle()
        with pytest.raises(EdgeUncovered):
            validate(g, [list(e) for e in g.edges()][:-1])

    def test_edge_double_covered(self):
        g = five_cycle()
        with pytest.raises(EdgeDoubleCovered):
            validate(g, [list(e) for e in g.edges()] + [[0, 1]])

    def test_mixed_clique_order(self):
        crg = validate(rook4_graph(), rook4_cliques())
        bad = [list(c) for c in crg.cliques[:-1]] + [[0, 1]]
        with pytest.raises(MixedCliqueOrder):
            validate(crg.graph, bad)

    def test_irregular_membership(self):
        # triangle plus a pendant triangle sharing vertex 0 unevenly
        g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
        with pytest.raises(IrregularCliqueMembership):
            validate(g, [[0, 1, 2], [0, 3, 4]])

    def test_empty_cliques_rejected(self):
        with pytest.raises(ValidationError):
            validate(triangle(), [])


class TestIncidence:
    def test_triangle_column_of_ones(self):
        crg = validate(triangle(), [[0, 1, 2]])
        n = incidence_matrix(crg)
        assert n.shape == (3, 1)
        assert np.all(n == 1)

    def test_five_cycle_vertex_edge_incidence(self):
        g = five_cycle()
        crg = validate(g, g.edges())
        n = incidence_matrix(crg)
        assert n.shape == (5, 5)
        assert np.all(n.sum(axis=0) == 2)
        assert np.all(n.sum(axis=1) == 2)

    def test_rook4_row_column_sums(self):
        crg = validate(rook4_graph(), rook4_cliques())
        n = incidence_matrix(crg)
        assert np.all(n.sum(axis=1) == 2)  # every vertex in d = 2 cliques
        assert np.all(n.sum(axis=0) == 4)  # every clique has l = 4 vertices

    def test_identity_holds_on_generators(self):
        for crg in (
            validate(triangle(), [[0, 1, 2]]),
            generators.petersen(),
            generators.rook_graph(4),
            generators.latin_square_graph(generators.latin_square_cyclic(4)),
        ):
            assert check_incidence_identity(crg)

    def test_identity_integer_oracle(self):
        # N N^T - d I recomputed with plain integer matmul
        crg = validate(rook4_graph(), rook4_cliques())
        n = incidence_matrix(crg)
        lhs = n @ n.T - crg.d * np.eye(16, dtype=np.int64)
        assert np.array_equal(lhs, crg.graph.adjacency_matrix())


class TestStructuralFlags:
    def test_even_cycle_bipartite(self):
        g = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
        assert structural_flags(g).bipartite

    def test_complete_graph(self):
        flags = structural_flags(generators.complete_graph(5))
        assert flags.complete and flags.connected

    def test_petersen(self, petersen):
        assert petersen.flags.connected
        assert not petersen.flags.bipartite
        assert not petersen.flags.complete

    def test_disconnected(self):
        g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert not structural_flags(g).connected


class TestJsonInterchange:
    def test_round_trip(self, tmp_path, petersen):
        path = tmp_path / "g.json"
        save_graph_json(petersen, str(path), meta={"family": "petersen"})
        back = load_graph_json(str(path))
        assert back.graph.adj == petersen.graph.adj
        assert (back.d, back.l) == (petersen.d, petersen.l)

    def test_sha_is_stable(self, petersen):
        doc = to_json_dict(petersen)
        assert graph_sha256(doc) == graph_sha256(json.loads(json.dumps(doc)))

    def test_edges_must_match_cliques(self, petersen):
        doc = to_json_dict(petersen)
        doc["edges"] = doc["edges"][:-1]
        with pytest.raises(GraphFileError):
            from_json_dict(doc)

    def test_stored_d_checked(self, petersen):
        doc = to_json_dict(petersen)
        doc["d"] = 7
        with pytest.raises(GraphFileError):
            from_json_dict(doc)

    def test_vertex_cap(self, petersen, monkeypatch):
        monkeypatch.setenv("CLIQUEWALK_MAX_N", "5")
        with pytest.raises(TooLarge):
            from_json_dict(to_json_dict(petersen))


class TestValidateIsTotal:
    def test_random_inputs_never_half_validate(self):
        # arbitrary clique lists either validate fully or raise a package error
        from cliquewalk.errors import CliqueWalkError
        rng = np.random.default_rng(0)
        g5 = five_cycle()
        rook = rook4_graph()
        for host in (g5, rook):
            for _ in range(200):
                k = rng.integers(1, 7)
                cliques = [
                    sorted(rng.choice(host.n, size=rng.integers(2, 5), replace=False))
                    for _ in range(k)
                ]
                try:
                    crg = validate(host, cliques)
                except CliqueWalkError:
                    continue
                assert crg.d >= 1 and crg.l >= 2
                assert check_incidence_identity(crg)
