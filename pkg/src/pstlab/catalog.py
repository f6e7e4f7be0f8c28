"""Named graphs: the thirteen connected cubic integral graphs and a few extras.

Every catalog constructor checks the exact spectrum of what it built against
the expected one, so a wrong edge aborts construction instead of silently
producing a different graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .graph import (
    Graph,
    GraphError,
    cartesian_product,
    complete,
    complete_bipartite,
    cycle,
    from_edge_list,
    is_connected,
    is_regular,
    path,
    power_product,
)
from .spectral import integer_root_factorization, integral_certificate

Spectrum = tuple[tuple[int, int], ...]


class CatalogError(RuntimeError):
    """A catalog graph failed its construction gate."""


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    graph: Graph
    expected_spectrum: Optional[Spectrum]  # None marks a graph expected to be non-integral
    source_note: str


def _spec(*pairs: tuple[int, int]) -> Spectrum:
    return tuple(sorted(pairs, reverse=True))


def _pm(lam: int, m: int) -> list[tuple[int, int]]:
    return [(lam, m), (-lam, m)]


def check_spectrum(g: Graph, expected: Optional[Spectrum]) -> None:
    cert = integral_certificate(g)
    if expected is None:
        if cert is not None:
            raise CatalogError(f"{g.name}: expected a non-integral graph, got {cert.roots}")
        return
    if cert is None:
        _, residual = integer_root_factorization(g)
        raise CatalogError(f"{g.name}: not integral (residual degree {len(residual) - 1})")
    if cert.roots != expected:
        raise CatalogError(f"{g.name}: spectrum {cert.roots} differs from expected {expected}")


# -- constructors ------------------------------------------------------------

def generalized_petersen(n: int, k: int) -> Graph:
    """GP(n, k): outer cycle ``1..n``, inner vertices ``n+1..2n`` joined with step k, spokes i ~ n+i."""
    if n < 3 or not (1 <= k and 2 * k < n):
        raise GraphError(f"GP({n},{k}) needs n >= 3 and 1 <= k < n/2")
    edges = []
    for i in range(n):
        edges.append((i + 1, (i + 1) % n + 1))
        edges.append((n + i + 1, n + (i + k) % n + 1))
        edges.append((i + 1, n + i + 1))
    return from_edge_list(2 * n, edges, f"GP({n},{k})")


def prism(n: int) -> Graph:
    """C_n x K_2 numbered so that ``1..n`` and ``n+1..2n`` are the two n-cycles."""
    return cartesian_product(path(2), cycle(n)).renamed(f"C{n}xK2")


def z_graph() -> Graph:
    """K_{3,3} with two vertices of one side each blown up into a triangle.

    Vertex 1 is the surviving vertex of that side, 2-4 the other side, and
    each triangle vertex keeps exactly one of the deleted vertex's edges.
    """
    edges = [(1, 2), (1, 3), (1, 4)]
    for base in (5, 8):
        tri = (base, base + 1, base + 2)
        edges += [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])]
        edges += [(tri[0], 2), (tri[1], 3), (tri[2], 4)]
    return from_edge_list(10, edges, "Z")


def truncated_tetrahedron() -> Graph:
    """L(S(K4)): vertex ``3a + b`` (a = 0..3) is the corner of triangle a facing K4 vertex b."""
    corners = {}
    for a in range(4):
        for idx, b in enumerate(x for x in range(4) if x != a):
            corners[a, b] = 3 * a + idx + 1
    edges = []
    for a in range(4):
        tri = [corners[a, b] for b in range(4) if b != a]
        edges += list(combinations(tri, 2))
    for a, b in combinations(range(4), 2):
        edges.append((corners[a, b], corners[b, a]))
    return from_edge_list(12, edges, "L(S(K4))")


def dk23() -> Graph:
    """Two copies of K_{2,3} with their degree-2 vertices matched.

    Vertices 1-2 and 9-10 are the degree-3 pairs, 3-5 and 6-8 the matched
    degree-2 triples (3~6, 4~7, 5~8).
    """
    edges = [(i, j) for i in (1, 2) for j in (3, 4, 5)]
    edges += [(i, j) for i in (9, 10) for j in (6, 7, 8)]
    edges += [(3, 6), (4, 7), (5, 8)]
    return from_edge_list(10, edges, "DK2,3")


# Biadjacency of the 20-vertex cospectral mate of the Desargues graph:
# row r (vertex 10+r) is joined to the listed vertices of 1..10.
_MATE_ROWS = (
    (1, 2, 3),
    (1, 4, 6),
    (1, 7, 8),
    (2, 4, 8),
    (2, 5, 9),
    (3, 5, 6),
    (3, 7, 9),
    (4, 5, 10),
    (6, 7, 10),
    (8, 9, 10),
)


def mate_desargues() -> Graph:
    edges = [(c, 10 + r) for r, row in enumerate(_MATE_ROWS, start=1) for c in row]
    return from_edge_list(20, edges, "H'5,2")


def tutte_coxeter() -> Graph:
    """Incidence graph of duads and synthemes of a 6-set (the Tutte 8-cage).

    The k-th 2-subset of {1..6} (lexicographic) is vertex 2k-1 and the k-th
    perfect matching of K6 (lexicographic) is vertex 2k, so odd and even
    labels are the two colour classes. A duad is joined to every matching
    containing it.
    """
    duads = list(combinations(range(1, 7), 2))

    def matchings(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for idx, other in enumerate(rest):
            for tail in matchings(rest[:idx] + rest[idx + 1:]):
                yield ((first, other),) + tail

    synthemes = list(matchings(tuple(range(1, 7))))
    edges = [
        (2 * duads.index(d) + 1, 2 * s + 2)
        for s, syn in enumerate(synthemes)
        for d in syn
    ]
    return from_edge_list(30, edges, "Tutte-Coxeter")


def w_graph() -> Graph:
    """Vertices 1 and 8 both joined to each of 2..7 (so K_{2,6})."""
    edges = [(1, i) for i in range(2, 8)] + [(j, 8) for j in range(2, 8)]
    return from_edge_list(8, edges, "W")


# -- the catalog -------------------------------------------------------------

_CUBIC: list[tuple[str, Callable[[], Graph], Spectrum, str]] = [
    ("k4", lambda: complete(4), _spec((3, 1), (-1, 3)), "complete graph K4"),
    ("k33", lambda: complete_bipartite(3, 3), _spec((3, 1), (0, 4), (-3, 1)),
     "complete bipartite K3,3; sides 1-3 and 4-6"),
    ("prism3", lambda: prism(3), _spec((3, 1), (1, 1), (0, 2), (-2, 2)),
     "triangular prism C3 x K2"),
    ("prism6", lambda: prism(6),
     _spec((3, 1), (2, 2), (1, 1), (0, 4), (-1, 1), (-2, 2), (-3, 1)),
     "hexagonal prism C6 x K2"),
    ("cube", lambda: power_product(path(2), 3).renamed("Q3"),
     _spec((3, 1), (1, 3), (-1, 3), (-3, 1)), "3-cube P2^3, row-major numbering"),
    ("petersen", lambda: generalized_petersen(5, 2).renamed("Petersen"),
     _spec((3, 1), (1, 5), (-2, 4)), "generalized Petersen GP(5,2)"),
    ("z10", z_graph, _spec((3, 1), (2, 1), (1, 3), (-1, 2), (-2, 3)),
     "K3,3 with two same-side vertices replaced by triangles"),
    ("trunctet", truncated_tetrahedron, _spec((3, 1), *_pm(2, 3), (0, 2), (-1, 3)),
     "truncated tetrahedron L(S(K4))"),
    ("dk23", dk23, _spec(*_pm(3, 1), *_pm(2, 1), *_pm(1, 2), (0, 2)),
     "two K2,3 joined by a matching on degree-2 vertices"),
    ("desargues", lambda: generalized_petersen(10, 3).renamed("Desargues"),
     _spec(*_pm(3, 1), *_pm(2, 4), *_pm(1, 5)), "generalized Petersen GP(10,3)"),
    ("desargues-mate", mate_desargues, _spec(*_pm(3, 1), *_pm(2, 4), *_pm(1, 5)),
     "hard-coded cospectral mate of the Desargues graph"),
    ("nauru", lambda: generalized_petersen(12, 5).renamed("Nauru"),
     _spec(*_pm(3, 1), *_pm(2, 6), *_pm(1, 3), (0, 4)), "generalized Petersen GP(12,5)"),
    ("tutte-coxeter", tutte_coxeter, _spec(*_pm(3, 1), *_pm(2, 9), (0, 10)),
     "duads (odd labels) vs synthemes (even labels) of a 6-set"),
]

CUBIC_KEYS = tuple(key for key, *_ in _CUBIC)
CATALOG_KEYS = CUBIC_KEYS + ("w8",)


def _build(key: str, make: Callable[[], Graph], spectrum: Optional[Spectrum], note: str) -> CatalogEntry:
    g = make()
    g = g.renamed(g.name or key)
    if not is_connected(g):
        raise CatalogError(f"{key}: graph is disconnected")
    if spectrum is not None and is_regular(g) != 3:
        raise CatalogError(f"{key}: graph is not cubic")
    check_spectrum(g, spectrum)
    if key == "desargues-mate":
        desargues = generalized_petersen(10, 3)
        if not certify_non_isomorphic(g, desargues):
            raise CatalogError("desargues-mate is isomorphic to the Desargues graph")
    return CatalogEntry(key, g, spectrum, note)


@lru_cache(maxsize=None)
def entry(key: str) -> CatalogEntry:
    if key == "w8":
        return _build("w8", w_graph, None, "K2,6 drawn with hubs 1 and 8; not integral")
    for k, make, spectrum, note in _CUBIC:
        if k == key:
            return _build(k, make, spectrum, note)
    raise KeyError(f"unknown catalog graph {key!r}; known: {', '.join(CATALOG_KEYS)}")


def thirteen() -> list[CatalogEntry]:
    """All connected cubic integral graphs, in a fixed order."""
    return [entry(k) for k in CUBIC_KEYS]


# -- isomorphism gate for the cospectral mate ---------------------------------

def cycle_counts(g: Graph, length: int) -> list[int]:
    """Number of cycles of the given length through each vertex (brute-force path walk)."""
    nbrs = [list(np.flatnonzero(row)) for row in g.adj]
    counts = []
    for start in range(g.n):
        closed = 0
        stack = [(start, (start,))]
        while stack:
            v, walk = stack.pop()
            for w in nbrs[v]:
                if len(walk) == length:
                    if w == start:
                        closed += 1
                elif w not in walk:
                    stack.append((w, walk + (w,)))
        counts.append(closed // 2)  # each cycle is walked in both directions
    return counts


def find_isomorphism(g: Graph, h: Graph) -> Optional[list[int]]:
    """Backtracking search for ``phi`` with ``g.adj[u, v] == h.adj[phi[u], phi[v]]``.

    Candidates are pruned by degree and 6-cycle counts. Meant for the small
    graphs in this catalog; the search is exponential in general.
    """
    if g.n != h.n or g.num_edges != h.num_edges:
        return None
    key_g = list(zip(g.adj.sum(axis=1), cycle_counts(g, 6)))
    key_h = list(zip(h.adj.sum(axis=1), cycle_counts(h, 6)))
    if sorted(key_g) != sorted(key_h):
        return None
    # visit g's vertices in BFS order so each new vertex has mapped neighbours
    order, seen = [], set()
    for root in range(g.n):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in np.flatnonzero(g.adj[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(int(v))
    phi = [-1] * g.n
    used = [False] * h.n

    def extend(pos: int) -> bool:
        if pos == g.n:
            return True
        u = order[pos]
        for x in range(h.n):
            if used[x] or key_h[x] != key_g[u]:
                continue
            if all(g.adj[u, order[p]] == h.adj[x, phi[order[p]]] for p in range(pos)):
                phi[u], used[x] = x, True
                if extend(pos + 1):
                    return True
                phi[u], used[x] = -1, False
        return False

    return phi if extend(0) else None


def certify_non_isomorphic(g: Graph, h: Graph) -> bool:
    """True when ``g`` and ``h`` are provably non-isomorphic.

    The per-vertex 6-cycle counts are compared first; when they agree the
    full backtracking search decides.
    """
    if sorted(cycle_counts(g, 6)) != sorted(cycle_counts(h, 6)):
        return True
    return find_isomorphism(g, h) is None
