"""Simple undirected graphs stored as dense 0/1 adjacency matrices.

Vertices are labelled ``1..n`` in every public function; the adjacency
matrix itself is indexed from zero.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np


class GraphError(ValueError):
    """Invalid graph input (bad vertex index, self-loop, malformed file)."""


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adj: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.int64, copy=True)
        if self.n < 1:
            raise GraphError(f"vertex count must be positive, got {self.n}")
        if adj.shape != (self.n, self.n):
            raise GraphError(f"adjacency shape {adj.shape} does not match n={self.n}")
        if not np.isin(adj, (0, 1)).all():
            raise GraphError("adjacency entries must be 0 or 1")
        if not (adj == adj.T).all():
            raise GraphError("adjacency matrix is not symmetric")
        if adj.diagonal().any():
            raise GraphError("adjacency matrix has a nonzero diagonal (self-loop)")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and bool((self.adj == other.adj).all())

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    @property
    def num_edges(self) -> int:
        return int(self.adj.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted 1-indexed pairs ``(u, v)`` with ``u < v``."""
        rows, cols = np.nonzero(np.triu(self.adj))
        return [(int(u) + 1, int(v) + 1) for u, v in zip(rows, cols)]

    def neighbors(self, i: int) -> list[int]:
        _check_vertex(self, i)
        return [int(v) + 1 for v in np.flatnonzero(self.adj[i - 1])]

    def renamed(self, name: str) -> "Graph":
        return Graph(self.n, self.adj, name)


@dataclass(frozen=True)
class DistanceReport:
    pair: tuple[int, int]
    distance: Union[int, float]  # math.inf when unreachable
    diameter: Union[int, float]


def _check_vertex(g: Graph, i: int) -> None:
    if not (1 <= i <= g.n):
        raise GraphError(f"vertex {i} out of range 1..{g.n}")


def from_edge_list(n: int, edges: Iterable[Sequence[int]], name: str = "") -> Graph:
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    adj = np.zeros((n, n), dtype=np.int64)
    for pair in edges:
        if len(pair) != 2:
            raise GraphError(f"edge {tuple(pair)} does not have two endpoints")
        u, v = (int(x) for x in pair)
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge {(u, v)} has an endpoint outside 1..{n}")
        if u == v:
            raise GraphError(f"edge {(u, v)} is a self-loop")
        adj[u - 1, v - 1] = adj[v - 1, u - 1] = 1
    return Graph(n, adj, name)


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs at least one vertex")
    return from_edge_list(n, [(i, i + 1) for i in range(1, n)], f"P{n}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs at least 3 vertices, got {n}")
    return from_edge_list(n, [(i, i % n + 1) for i in range(1, n + 1)], f"C{n}")


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graph needs at least one vertex")
    return from_edge_list(
        n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)], f"K{n}"
    )


def complete_bipartite(p: int, q: int) -> Graph:
    """K_{p,q}; vertices ``1..p`` form one side, ``p+1..p+q`` the other."""
    if p < 1 or q < 1:
        raise GraphError("both sides of a complete bipartite graph need a vertex")
    edges = [(i, p + j) for i in range(1, p + 1) for j in range(1, q + 1)]
    return from_edge_list(p + q, edges, f"K{p},{q}")


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Cartesian product with row-major numbering ``(i, j) -> (i-1)*|V2| + j``.

    ``(i, j) ~ (k, l)`` iff ``i == k`` and ``j ~ l`` in ``g2``, or ``j == l``
    and ``i ~ k`` in ``g1``. In matrix form this is ``A1 (x) I + I (x) A2``.
    """
    adj = np.kron(g1.adj, np.eye(g2.n, dtype=np.int64)) + np.kron(
        np.eye(g1.n, dtype=np.int64), g2.adj
    )
    name = f"{g1.name}x{g2.name}" if g1.name and g2.name else ""
    return Graph(g1.n * g2.n, adj, name)


def power_product(g: Graph, k: int) -> Graph:
    if k < 1:
        raise GraphError(f"product power must be positive, got {k}")
    out = g
    for _ in range(k - 1):
        out = cartesian_product(out, g)
    return out.renamed(f"{g.name}^{k}" if g.name and k > 1 else g.name)


def bfs_distances(g: Graph, source: int) -> list[Union[int, float]]:
    """Distances from ``source`` to every vertex (index ``v-1``); inf if unreachable."""
    _check_vertex(g, source)
    dist: list[Union[int, float]] = [math.inf] * g.n
    dist[source - 1] = 0
    queue = deque([source - 1])
    nbrs = [np.flatnonzero(row) for row in g.adj]
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if dist[v] == math.inf:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distance(g: Graph, i: int, j: int) -> Union[int, float]:
    _check_vertex(g, j)
    return bfs_distances(g, i)[j - 1]


def diameter(g: Graph) -> Union[int, float]:
    """Largest pairwise distance; ``math.inf`` for a disconnected graph."""
    return max(max(bfs_distances(g, s)) for s in range(1, g.n + 1))


def is_connected(g: Graph) -> bool:
    return max(bfs_distances(g, 1)) != math.inf


def distance_report(g: Graph, i: int, j: int) -> DistanceReport:
    return DistanceReport((i, j), distance(g, i, j), diameter(g))


def antipodal_pairs(g: Graph) -> list[tuple[int, int]]:
    dia = diameter(g)
    out = []
    for i in range(1, g.n + 1):
        d = bfs_distances(g, i)
        out.extend((i, j + 1) for j in range(i, g.n) if d[j] == dia)
    return out


def degree_sequence(g: Graph) -> list[int]:
    return [int(d) for d in g.adj.sum(axis=1)]


def is_regular(g: Graph) -> Optional[int]:
    """Common degree ``k`` if every vertex has degree ``k``, else None."""
    degrees = set(degree_sequence(g))
    return degrees.pop() if len(degrees) == 1 else None


def max_degree(g: Graph) -> int:
    return max(degree_sequence(g))


def bipartition(g: Graph) -> Optional[list[int]]:
    """A proper 2-colouring (0/1 per vertex) or None if the graph has an odd cycle."""
    color = [-1] * g.n
    nbrs = [np.flatnonzero(row) for row in g.adj]
    for start in range(g.n):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return color


# -- edge-list files ---------------------------------------------------------

def parse_edge_list(text: str, name: str = "") -> Graph:
    """Parse the edge-list text format.

    Lines starting with ``#`` and blank lines are skipped. The first data line
    holds the vertex count, every following data line one ``u v`` pair.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise GraphError("edge list is empty")
    lineno, head = rows[0]
    if len(head) != 1:
        raise GraphError(f"line {lineno}: expected the vertex count, got {' '.join(head)!r}")
    try:
        n = int(head[0])
        edges = []
        for lineno, fields in rows[1:]:
            if len(fields) != 2:
                raise GraphError(f"line {lineno}: expected 'u v', got {' '.join(fields)!r}")
            edges.append((int(fields[0]), int(fields[1])))
    except ValueError as exc:
        raise GraphError(f"line {lineno}: {exc}") from None
    return from_edge_list(n, edges, name)


def serialize_edge_list(g: Graph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def read_edge_list(path_: Union[str, Path]) -> Graph:
    p = Path(path_)
    return parse_edge_list(p.read_text(), name=p.stem)


def write_edge_list(g: Graph, path_: Union[str, Path]) -> None:
    Path(path_).write_text(serialize_edge_list(g))


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``v`` renamed to ``perm[v-1]`` (a permutation of 1..n)."""
    if sorted(perm) != list(range(1, g.n + 1)):
        raise GraphError("relabelling is not a permutation of 1..n")
    idx = np.asarray(perm) - 1
    adj = np.zeros_like(g.adj)
    adj[np.ix_(idx, idx)] = g.adj
    return Graph(g.n, adj, g.name)
