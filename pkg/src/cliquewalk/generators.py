"""Built-in graph families, each delivered with its natural clique partition.

Randomness comes from numpy's PCG64 generator seeded with a single 64-bit
integer, so identical (family, params, seed) calls reproduce identical
graphs on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, InvalidParams, NotOrthogonal, NotPrime, NotRegular
from .graph_core import CliqueRegularGraph, Graph, edge_key, validate

CONFIG_MODEL_MAX_RETRIES = 1000


def _from_cliques(n: int, cliques) -> CliqueRegularGraph:
    edges = set()
    for c in cliques:
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                edges.add(edge_key(c[i], c[j]))
    graph = Graph.from_edges(n, sorted(edges))
    return validate(graph, cliques)


def cycle(n: int) -> CliqueRegularGraph:
    """n-cycle with its edges as 2-cliques (d=2, l=2)."""
    if n < 3:
        raise InvalidParams("cycle needs n >= 3")
    cliques = [(i, (i + 1) % n) for i in range(n)]
    return _from_cliques(n, cliques)


def prism(n: int) -> CliqueRegularGraph:
    """Circular ladder C_n x K_2: 3-regular on 2n vertices, edges as cliques."""
    if n < 3:
        raise InvalidParams("prism needs n >= 3")
    cliques = []
    for i in range(n):
        j = (i + 1) % n
        cliques.append((i, j))          # outer cycle
        cliques.append((n + i, n + j))  # inner cycle
        cliques.append((i, n + i))      # rung
    return _from_cliques(2 * n, cliques)


def petersen() -> CliqueRegularGraph:
    """The Petersen graph, edges as cliques (d=3, l=2)."""
    cliques = []
    for i in range(5):
        cliques.append((i, (i + 1) % 5))          # outer pentagon
        cliques.append((5 + i, 5 + (i + 2) % 5))  # inner pentagram
        cliques.append((i, 5 + i))                # spokes
    return _from_cliques(10, cliques)


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise InvalidParams("complete graph needs n >= 2")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_regular(n: int, d: int, seed: int) -> CliqueRegularGraph:
    """Random simple d-regular graph via the configuration model.

    Stubs are shuffled and paired; attempts producing a loop or a repeated
    edge are rejected wholesale.  Deterministic for a fixed seed; raises
    GenerationFailed after 1000 rejected attempts.
    """
    if d < 1 or d >= n:
        raise InvalidParams("need 1 <= d < n")
    if (n * d) % 2 != 0:
        raise InvalidParams("n*d must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(CONFIG_MODEL_MAX_RETRIES):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                ok = False
                break
            e = edge_key(u, v)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return _from_cliques(n, sorted(edges))
    raise GenerationFailed(
        f"no simple {d}-regular graph on {n} vertices after "
        f"{CONFIG_MODEL_MAX_RETRIES} pairing attempts"
    )


def rook_graph(m: int) -> CliqueRegularGraph:
    """Rook's graph on an m x m grid: rows and columns as m-cliques (d=2, l=m)."""
    if m < 2:
        raise InvalidParams("rook grid side must be >= 2")
    cliques = []
    for i in range(m):
        cliques.append(tuple(i * m + j for j in range(m)))  # row i
    for j in range(m):
        cliques.append(tuple(i * m + j for i in range(m)))  # column j
    return _from_cliques(m * m, cliques)


@dataclass(frozen=True)
class LatinSquare:
    """l x l array with every symbol 0..l-1 exactly once per row and column."""

    order: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        l = self.order
        want = set(range(l))
        if len(self.cells) != l:
            raise InvalidParams("cell grid does not match the declared order")
        for row in self.cells:
            if set(row) != want:
                raise InvalidParams(f"row {row} is not a permutation of 0..{l - 1}")
        for j in range(l):
            if {row[j] for row in self.cells} != want:
                raise InvalidParams(f"column {j} is not a permutation of 0..{l - 1}")


def latin_square_cyclic(l: int) -> LatinSquare:
    """Cyclic square: cell (i, j) holds (i + j) mod l."""
    if l < 2:
        raise InvalidParams("latin square order must be >= 2")
    cells = tuple(tuple((i + j) % l for j in range(l)) for i in range(l))
    return LatinSquare(order=l, cells=cells)


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    """True when superimposing yields all l^2 ordered symbol pairs."""
    if a.order != b.order:
        return False
    l = a.order
    pairs = {
        (a.cells[i][j], b.cells[i][j]) for i in range(l) for j in range(l)
    }
    return len(pairs) == l * l


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def mols_prime(l: int, t: int) -> list[LatinSquare]:
    """t mutually orthogonal squares of prime order l: L_a(i,j) = a*i + j mod l."""
    if not _is_prime(l):
        raise NotPrime(f"{l} is not prime")
    if not 1 <= t <= l - 1:
        raise InvalidParams("need 1 <= t <= l-1")
    squares = []
    for a in range(1, t + 1):
        cells = tuple(tuple((a * i + j) % l for j in range(l)) for i in range(l))
        squares.append(LatinSquare(order=l, cells=cells))
    for i in range(t):
        for j in range(i + 1, t):
            if not are_orthogonal(squares[i], squares[j]):
                raise NotOrthogonal(f"squares {i} and {j} failed the orthogonality check")
    return squares


def _latin_cliques(squares: list[LatinSquare]) -> tuple[int, list[tuple[int, ...]]]:
    l = squares[0].order
    n = l * l
    cliques = []
    for i in range(l):
        cliques.append(tuple(i * l + j for j in range(l)))  # row
    for j in range(l):
        cliques.append(tuple(i * l + j for i in range(l)))  # column
    for sq in squares:
        for s in range(l):
            cliques.append(
                tuple(i * l + j for i in range(l) for j in range(l) if sq.cells[i][j] == s)
            )
    return n, cliques


def latin_square_graph(ls: LatinSquare) -> CliqueRegularGraph:
    """Cells adjacent when they share a row, a column, or a symbol (d=3, l=order)."""
    if ls.order < 2:
        raise InvalidParams("latin square order must be >= 2")
    n, cliques = _latin_cliques([ls])
    return _from_cliques(n, cliques)


def ols_graph(squares: list[LatinSquare]) -> CliqueRegularGraph:
    """Point graph of t pairwise-orthogonal squares: d = t + 2, clique order l.

    Cliques are the rows, the columns, and each square's symbol classes.
    """
    if not squares:
        raise InvalidParams("need at least one square")
    l = squares[0].order
    for sq in squares:
        if sq.order != l:
            raise InvalidParams("squares must share one order")
    for i in range(len(squares)):
        for j in range(i + 1, len(squares)):
            if not are_orthogonal(squares[i], squares[j]):
                raise NotOrthogonal(f"squares {i} and {j} are not orthogonal")
    n, cliques = _latin_cliques(squares)
    return _from_cliques(n, cliques)


def line_graph(h: Graph) -> CliqueRegularGraph:
    """Line graph of an r-regular graph; edge stars become r-cliques (d=2, l=r)."""
    r = h.regular_degree()
    if r is None or r < 2:
        raise NotRegular("host graph must be regular of degree >= 2")
    edges = h.edges()
    index = {e: i for i, e in enumerate(edges)}
    cliques = []
    for v in range(h.n):
        star = tuple(sorted(index[edge_key(v, w)] for w in h.adj[v]))
        cliques.append(star)
    return _from_cliques(len(edges), cliques)


# --- Latin square text format: l lines of l whitespace-separated integers --

def save_latin_square(ls: LatinSquare, path: str) -> None:
    with open(path, "w") as fh:
        for row in ls.cells:
            fh.write(" ".join(str(x) for x in row))
            fh.write("\n")


def load_latin_square(path: str) -> LatinSquare:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(tuple(int(x) for x in line.split()))
    if not rows:
        raise InvalidParams(f"no rows in latin square file {path}")
    return LatinSquare(order=len(rows), cells=tuple(rows))
