"""Graphs carrying an edge partition into uniform-order cliques.

A valid instance is a simple d(l-1)-regular graph whose edge set is
partitioned into cliques of order l, every vertex lying in exactly d of
them.  All validation is exact integer arithmetic; floating point enters
only downstream (spectra, rates).  Vertices are 0-indexed, edges are
canonicalized as (min, max) pairs.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    EdgeDoubleCovered,
    EdgeUncovered,
    GraphFileError,
    IrregularCliqueMembership,
    MixedCliqueOrder,
    NotAClique,
    NotRegular,
    TooLarge,
    ValidationError,
)

Edge = tuple[int, int]

DEFAULT_MAX_N = 2000


def max_vertex_cap() -> int:
    """Dense-matrix vertex cap; override with CLIQUEWALK_MAX_N."""
    raw = os.environ.get("CLIQUEWALK_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"CLIQUEWALK_MAX_N is not an integer: {raw!r}") from exc


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Undirected simple graph on vertices 0..n-1 with sorted neighbor lists."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adjacency):
        if n < 1:
            raise ValidationError("graph needs at least one vertex")
        if len(adjacency) != n:
            raise ValidationError("adjacency length does not match n")
        adj = []
        for v, nbrs in enumerate(adjacency):
            seen = sorted(nbrs)
            for i, w in enumerate(seen):
                if not 0 <= w < n:
                    raise ValidationError(f"neighbor {w} of {v} out of range")
                if w == v:
                    raise ValidationError(f"self-loop at vertex {v}")
                if i > 0 and seen[i - 1] == w:
                    raise ValidationError(f"duplicate edge ({v},{w})")
            adj.append(tuple(seen))
        self.n = n
        self.adj = tuple(adj)
        for v in range(n):
            for w in self.adj[v]:
                # bisect would be O(log) but neighbor lists are short
                if v not in self.adj[w]:
                    raise ValidationError(f"asymmetric edge ({v},{w})")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[Edge]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def regular_degree(self) -> int | None:
        """Common degree, or None if the graph is irregular."""
        degs = set(self.degrees())
        return degs.pop() if len(degs) == 1 else None

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u in range(self.n):
            for v in self.adj[u]:
                a[u, v] = 1
        return a


@dataclass(frozen=True)
class StructuralFlags:
    connected: bool
    bipartite: bool
    complete: bool


@dataclass(frozen=True)
class CliquePartition:
    cliques: tuple[tuple[int, ...], ...]
    vertex_to_cliques: tuple[tuple[int, ...], ...]
    l: int
    d: int


@dataclass(frozen=True)
class CliqueRegularGraph:
    graph: Graph
    partition: CliquePartition
    d: int
    l: int
    edge_to_clique: dict
    flags: StructuralFlags

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degree(self) -> int:
        return self.d * (self.l - 1)

    @property
    def cliques(self) -> tuple[tuple[int, ...], ...]:
        return self.partition.cliques


def structural_flags(graph: Graph) -> StructuralFlags:
    """Connectivity via BFS, bipartiteness via 2-coloring, completeness by edge count."""
    n = graph.n
    color = [-1] * n
    color[0] = 0
    queue = [0]
    bipartite = True
    seen = 1
    while queue:
        nxt = []
        for v in queue:
            for w in graph.adj[v]:
                if color[w] == -1:
                    color[w] = color[v] ^ 1
                    nxt.append(w)
                    seen += 1
                elif color[w] == color[v]:
                    bipartite = False
        queue = nxt
    connected = seen == n
    complete = graph.edge_count() == n * (n - 1) // 2
    return StructuralFlags(connected=connected, bipartite=bipartite, complete=complete)


def validate(graph: Graph, cliques) -> CliqueRegularGraph:
    """Check a proposed clique partition against its host graph.

    Infers the clique order l and the per-vertex clique count d, verifies
    that every clique induces a complete subgraph, that every edge lies in
    exactly one clique, and that membership counts are uniform.  Raises a
    specific ValidationError subclass on the first violation found.
    """
    cliques = [tuple(sorted(c)) for c in cliques]
    if not cliques:
        raise ValidationError("empty clique list")

    l = len(cliques[0])
    for c in cliques:
        if len(c) != l:
            raise MixedCliqueOrder(f"clique orders {l} and {len(c)} both present")
    if l < 2:
        raise NotAClique("cliques of order < 2 cover no edges")

    edge_to_clique: dict[Edge, int] = {}
    member_count = [0] * graph.n
    for ci, c in enumerate(cliques):
        if len(set(c)) != l:
            raise NotAClique(f"clique {ci} repeats a vertex: {c}")
        for v in c:
            if not 0 <= v < graph.n:
                raise ValidationError(f"clique {ci} names vertex {v} out of range")
            member_count[v] += 1
        for i in range(l):
            for j in range(i + 1, l):
                u, v = c[i], c[j]
                if v not in graph.adj[u]:
                    raise NotAClique(f"clique {ci} contains non-edge ({u},{v})")
                e = edge_key(u, v)
                if e in edge_to_clique:
                    raise EdgeDoubleCovered(
                        f"edge {e} in cliques {edge_to_clique[e]} and {ci}"
                    )
                edge_to_clique[e] = ci

    if len(edge_to_clique) != graph.edge_count():
        missing = next(e for e in graph.edges() if e not in edge_to_clique)
        raise EdgeUncovered(f"edge {missing} not covered by any clique")

    d = member_count[0]
    for v, m in enumerate(member_count):
        if m != d:
            raise IrregularCliqueMembership(
                f"vertex 0 lies in {d} cliques but vertex {v} in {m}"
            )

    # implied by the checks above; kept as a cheap guard
    want = d * (l - 1)
    for v, deg in enumerate(graph.degrees()):
        if deg != want:
            raise NotRegular(f"vertex {v} has degree {deg}, expected {want}")
    assert len(cliques) * l == d * graph.n

    vtc: list[list[int]] = [[] for _ in range(graph.n)]
    for ci, c in enumerate(cliques):
        for v in c:
            vtc[v].append(ci)
    partition = CliquePartition(
        cliques=tuple(cliques),
        vertex_to_cliques=tuple(tuple(x) for x in vtc),
        l=l,
        d=d,
    )
    return CliqueRegularGraph(
        graph=graph,
        partition=partition,
        d=d,
        l=l,
        edge_to_clique=edge_to_clique,
        flags=structural_flags(graph),
    )


def incidence_matrix(crg: CliqueRegularGraph) -> np.ndarray:
    """0/1 vertex-by-clique membership matrix."""
    n = crg.n
    k = len(crg.partition.cliques)
    m = np.zeros((n, k), dtype=np.int64)
    for ci, c in enumerate(crg.partition.cliques):
        for v in c:
            m[v, ci] = 1
    return m


def check_incidence_identity(crg: CliqueRegularGraph) -> bool:
    """A == N N^T - d I, checked entrywise in integers."""
    n_mat = incidence_matrix(crg)
    a = crg.graph.adjacency_matrix()
    lhs = n_mat @ n_mat.T - crg.d * np.eye(crg.n, dtype=np.int64)
    return bool(np.array_equal(lhs, a))


# --- JSON interchange -----------------------------------------------------

def to_json_dict(crg: CliqueRegularGraph, meta: dict | None = None) -> dict:
    return {
        "n": crg.n,
        "edges": [list(e) for e in sorted(crg.graph.edges())],
        "cliques": sorted([list(c) for c in crg.partition.cliques]),
        "d": crg.d,
        "l": crg.l,
        "meta": meta if meta is not None else {},
    }


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def graph_sha256(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def from_json_dict(doc: dict) -> CliqueRegularGraph:
    """Rebuild and re-validate a graph from its JSON document.

    The edge list is redundant with the cliques; the two must agree
    exactly, as must the stored d and l once re-inferred.
    """
    try:
        n = int(doc["n"])
        edges = [edge_key(int(u), int(v)) for u, v in doc["edges"]]
        cliques = [[int(v) for v in c] for c in doc["cliques"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFileError(f"malformed graph document: {exc}") from exc

    cap = max_vertex_cap()
    if n > cap:
        raise TooLarge(f"graph has {n} vertices; cap is {cap}")

    derived = set()
    for c in cliques:
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                derived.add(edge_key(c[i], c[j]))
    if derived != set(edges):
        raise GraphFileError("edge list does not match the edges spanned by the cliques")

    graph = Graph.from_edges(n, edges)
    crg = validate(graph, cliques)
    for name, stored, inferred in (("d", doc.get("d"), crg.d), ("l", doc.get("l"), crg.l)):
        if stored is not None and int(stored) != inferred:
            raise GraphFileError(f"stored {name}={stored} but partition implies {inferred}")
    return crg


def save_graph_json(crg: CliqueRegularGraph, path: str, meta: dict | None = None) -> dict:
    doc = to_json_dict(crg, meta)
    with open(path, "w") as fh:
        fh.write(canonical_json(doc))
        fh.write("\n")
    return doc


def load_graph_json(path: str) -> CliqueRegularGraph:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphFileError(f"cannot read graph file {path}: {exc}") from exc
    return from_json_dict(doc)
