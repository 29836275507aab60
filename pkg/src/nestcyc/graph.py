"""Undirected simple graphs and the BFS primitives the rest of the package uses.

Vertices are dense integers ``0..n-1``.  Graph values are immutable; every
function here is pure.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "GraphError",
    "Graph",
    "build_graph",
    "degree_stats",
    "average_degree",
    "bfs_layers",
    "sphere",
    "ball",
    "distances",
    "shortest_cycle",
    "girth",
    "shortest_path_between_sets",
    "canonical_cycle",
    "cycle_edges",
    "is_path",
    "is_cycle",
    "parse_edge_list",
    "format_edge_list",
    "read_edge_list",
    "write_edge_list",
]


class GraphError(ValueError):
    """Malformed graph input (bad labels, self-loops, parse errors)."""


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "edges", "_nbrsets")

    def __init__(self, n: int, adj: tuple[tuple[int, ...], ...], edges: frozenset):
        self.n = n
        self.adj = adj
        self.edges = edges
        self._nbrsets = tuple(frozenset(a) for a in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def neighbor_set(self, v: int) -> frozenset:
        return self._nbrsets[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbrsets[u]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph relabelled to ``0..len-1``.

        Returns the subgraph and the new->old label map (sorted old labels).
        """
        old = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(old)}
        pairs = []
        for u in old:
            iu = index[u]
            for w in self.adj[u]:
                if w > u and w in index:
                    pairs.append((iu, index[w]))
        return build_graph(len(old), pairs), old

    def without(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        drop = set(vertices)
        return self.induced(v for v in range(self.n) if v not in drop)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Build a graph, deduplicating parallel pairs.

    Out-of-range labels and self-loops raise :class:`GraphError`.
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    edges = set()
    for pair in edge_list:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        edges.add((u, v) if u < v else (v, u))
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    adj = tuple(tuple(sorted(a)) for a in nbrs)
    return Graph(n, adj, frozenset(edges))


def average_degree(G: Graph) -> Fraction:
    if G.n == 0:
        raise GraphError("average degree of the empty graph is undefined")
    return Fraction(2 * G.m, G.n)


def degree_stats(G: Graph) -> tuple[Fraction, int, int]:
    """Exact average degree together with minimum and maximum degree."""
    avg = average_degree(G)
    degs = [len(a) for a in G.adj]
    return avg, min(degs), max(degs)


def bfs_layers(
    G: Graph,
    X: Iterable[int],
    avoid: Iterable[int] = (),
    max_radius: Optional[int] = None,
) -> Iterator[list[int]]:
    """Yield the spheres ``N^0(X), N^1(X), ...`` of ``G - avoid`` as sorted lists.

    Stops after ``max_radius`` or when a sphere is empty.
    """
    blocked = set(avoid)
    layer = sorted(set(X))
    if any(x in blocked for x in layer):
        raise GraphError("start set intersects the avoided set")
    seen = set(layer)
    radius = 0
    while layer:
        yield layer
        if max_radius is not None and radius >= max_radius:
            return
        nxt = set()
        for u in layer:
            for w in G.adj[u]:
                if w not in seen and w not in blocked:
                    nxt.add(w)
        seen |= nxt
        layer = sorted(nxt)
        radius += 1


def sphere(G: Graph, X: Iterable[int], i: int, avoid: Iterable[int] = ()) -> frozenset:
    """Vertices at distance exactly ``i`` from ``X`` in ``G - avoid``."""
    if i < 0:
        raise GraphError("radius must be non-negative")
    for r, layer in enumerate(bfs_layers(G, X, avoid, i)):
        if r == i:
            return frozenset(layer)
    return frozenset()


def ball(G: Graph, X: Iterable[int], i: int, avoid: Iterable[int] = ()) -> frozenset:
    """Union of the spheres of radius ``0..i`` around ``X`` in ``G - avoid``."""
    if i < 0:
        raise GraphError("radius must be non-negative")
    out: set[int] = set()
    for layer in bfs_layers(G, X, avoid, i):
        out.update(layer)
    return frozenset(out)


def distances(G: Graph, X: Iterable[int], avoid: Iterable[int] = (), max_radius: Optional[int] = None) -> dict[int, int]:
    dist = {}
    for r, layer in enumerate(bfs_layers(G, X, avoid, max_radius)):
        for v in layer:
            dist[v] = r
    return dist


def canonical_cycle(vertices: Sequence[int]) -> tuple[int, ...]:
    """Rotation/reflection-invariant form: start at the minimum, smaller neighbour second."""
    seq = list(vertices)
    k = len(seq)
    i = seq.index(min(seq))
    fwd = seq[i:] + seq[:i]
    if k > 2 and fwd[-1] < fwd[1]:
        fwd = [fwd[0]] + fwd[:0:-1]
    return tuple(fwd)


def cycle_edges(cycle: Sequence[int]) -> set[tuple[int, int]]:
    k = len(cycle)
    out = set()
    for i in range(k):
        u, v = cycle[i], cycle[(i + 1) % k]
        out.add((u, v) if u < v else (v, u))
    return out


def is_path(G: Graph, vertices: Sequence[int]) -> bool:
    if not vertices or len(set(vertices)) != len(vertices):
        return False
    if any(not 0 <= v < G.n for v in vertices):
        return False
    return all(G.has_edge(vertices[i], vertices[i + 1]) for i in range(len(vertices) - 1))


def is_cycle(G: Graph, vertices: Sequence[int]) -> bool:
    return len(vertices) >= 3 and is_path(G, vertices) and G.has_edge(vertices[-1], vertices[0])


def girth(G: Graph, upper: Optional[int] = None) -> Optional[int]:
    """Length of a shortest cycle, or None for forests.

    BFS from every vertex; a non-tree edge ``uw`` closes a closed walk of
    length ``d(u) + d(w) + 1`` that contains a cycle at most that long, and
    the minimum over all roots is exact.
    """
    best = upper + 1 if upper is not None else None
    n = G.n
    adj = G.adj
    for s in range(n):
        if len(adj[s]) < 2:
            continue
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if best is not None and 2 * du + 1 >= best:
                break
            for w in adj[u]:
                if w == parent[u]:
                    continue
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                else:
                    length = du + dw + 1
                    if best is None or length < best:
                        best = length
        if best == 3:
            break
    if best is None or (upper is not None and best > upper):
        return None
    return best


def _smallest_cycle_of_length(G: Graph, g: int) -> Optional[tuple[int, ...]]:
    # Lexicographic DFS from each start s over vertices > s; the first closed
    # sequence with seq[1] < seq[-1] is the lexicographically least canonical cycle.
    adj = G.adj
    for s in range(G.n):
        allowed = lambda v: v > s  # noqa: E731
        dist = {}
        for r, layer in enumerate(bfs_layers(G, [s], [v for v in range(s)], g // 2 + 1)):
            for v in layer:
                dist[v] = r
        path = [s]
        on_path = {s}

        def dfs() -> Optional[tuple[int, ...]]:
            u = path[-1]
            depth = len(path)
            if depth == g:
                if G.has_edge(u, s) and path[1] < path[-1]:
                    return tuple(path)
                return None
            remaining = g - depth
            for w in adj[u]:
                if not allowed(w) or w in on_path:
                    continue
                if dist.get(w, g + 1) > remaining:
                    continue
                path.append(w)
                on_path.add(w)
                found = dfs()
                path.pop()
                on_path.discard(w)
                if found is not None:
                    return found
            return None

        found = dfs()
        if found is not None:
            return found
    return None


def shortest_cycle(G: Graph) -> Optional[tuple[int, ...]]:
    """A girth-length cycle in canonical form, lexicographically least among ties."""
    g = girth(G)
    if g is None:
        return None
    cyc = _smallest_cycle_of_length(G, g)
    assert cyc is not None, "girth computed but no cycle of that length recovered"
    return cyc


def shortest_path_between_sets(
    G: Graph,
    X1: Iterable[int],
    X2: Iterable[int],
    avoid: Iterable[int] = (),
) -> Optional[tuple[int, ...]]:
    """Lexicographically least shortest path from ``X1`` to ``X2`` in ``G - avoid``.

    Returns None when the sets are disconnected after avoidance.
    """
    S1, S2 = set(X1), set(X2)
    blocked = set(avoid)
    if not S1 or not S2:
        raise GraphError("both endpoint sets must be non-empty")
    if S1 & blocked or S2 & blocked:
        raise GraphError("endpoint sets must be disjoint from the avoided set")
    common = S1 & S2
    if common:
        return (min(common),)
    # distances to X2, stopping at the first layer that meets X1
    dist: dict[int, int] = {}
    hit = None
    for r, layer in enumerate(bfs_layers(G, S2, blocked)):
        for v in layer:
            dist[v] = r
        reached = [v for v in layer if v in S1]
        if reached:
            hit = r
            start = min(reached)
            break
    if hit is None:
        return None
    path = [start]
    u = start
    for r in range(hit - 1, -1, -1):
        u = min(w for w in G.adj[u] if dist.get(w) == r)
        path.append(u)
    return tuple(path)


def format_edge_list(G: Graph) -> str:
    lines = [f"{G.n} {G.m}"]
    lines.extend(f"{u} {v}" for u, v in G.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list format; errors carry line and column."""
    lines = text.splitlines()
    if not lines:
        raise GraphError("line 1: missing header 'n m'")

    def ints(lineno: int, line: str, count: int) -> list[int]:
        fields = line.split()
        if len(fields) != count:
            raise GraphError(f"line {lineno}: expected {count} integers, got {len(fields)}")
        out = []
        col = 1
        for f in fields:
            col = line.index(f, col - 1) + 1
            try:
                val = int(f)
            except ValueError:
                raise GraphError(f"line {lineno}, column {col}: not an integer: {f!r}") from None
            if val < 0:
                raise GraphError(f"line {lineno}, column {col}: negative value {val}")
            out.append(val)
            col += len(f)
        return out

    n, m = ints(1, lines[0], 2)
    body = [(i + 2, ln) for i, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges but {len(body)} edge lines follow")
    seen = set()
    pairs = []
    for lineno, ln in body:
        u, v = ints(lineno, ln, 2)
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        if u >= n or v >= n:
            raise GraphError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u > v:
            raise GraphError(f"line {lineno}: edges must be written with u < v")
        if (u, v) in seen:
            raise GraphError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
        pairs.append((u, v))
    return build_graph(n, pairs)


def read_edge_list(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(G: Graph, path) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, format_edge_list(G))
