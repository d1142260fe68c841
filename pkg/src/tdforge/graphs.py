"""Immutable simple graphs and the tree primitives everything else builds on.

Vertex identifiers are opaque tokens; they only need to be hashable and
mutually order-comparable (strings throughout this package). All operations
are deterministic: ties are broken by sorting identifiers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

Vertex = object  # opaque, order-comparable token; str in practice
Edge = Tuple[Vertex, Vertex]


def edge(u: Vertex, v: Vertex) -> Edge:
    """Canonical form of an undirected edge: endpoints sorted, loops rejected."""
    if u == v:
        raise ValueError(f"loop edge at {u!r}")
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph, immutable after construction.

    Vertex order is preserved as given; duplicate vertices, loops, and edges
    with undeclared endpoints are rejected. Parallel edges collapse (edges
    form a set). Optional labels map vertices to strings.
    """

    __slots__ = ("_vertices", "_vset", "_edges", "_adj", "_labels")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable = (),
                 labels: Optional[Dict[Vertex, str]] = None):
        vs = tuple(vertices)
        if not vs:
            raise ValueError("graph needs at least one vertex")
        vset = set()
        for v in vs:
            if v in vset:
                raise ValueError(f"duplicate vertex {v!r}")
            vset.add(v)
        es = set()
        adj: Dict[Vertex, set] = {v: set() for v in vs}
        for pair in edges:
            u, v = pair
            e = edge(u, v)
            if e[0] not in vset or e[1] not in vset:
                raise ValueError(f"edge {e!r} has an undeclared endpoint")
            es.add(e)
            adj[e[0]].add(e[1])
            adj[e[1]].add(e[0])
        lab = dict(labels) if labels else {}
        for v in lab:
            if v not in vset:
                raise ValueError(f"label for undeclared vertex {v!r}")
        self._vertices = vs
        self._vset = frozenset(vset)
        self._edges = frozenset(es)
        self._adj = {v: tuple(sorted(adj[v])) for v in vs}
        self._labels = lab

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self._vertices

    @property
    def vertex_set(self) -> FrozenSet[Vertex]:
        return self._vset

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def labels(self) -> Dict[Vertex, str]:
        return dict(self._labels)

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v: Vertex) -> bool:
        return v in self._vset

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        return self._adj[v]

    def degree(self, v: Vertex) -> int:
        return len(self._adj[v])

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return edge(u, v) in self._edges

    def subgraph(self, keep: Iterable[Vertex]) -> "Graph":
        """Induced subgraph on the given vertices, preserving vertex order."""
        ks = set(keep)
        missing = ks - self._vset
        if missing:
            raise ValueError(f"not vertices of this graph: {sorted(missing)!r}")
        vs = [v for v in self._vertices if v in ks]
        es = [e for e in self._edges if e[0] in ks and e[1] in ks]
        lab = {v: s for v, s in self._labels.items() if v in ks}
        return Graph(vs, es, lab)

    def relabel(self, fn) -> "Graph":
        """New graph with every vertex v renamed to fn(v); fn must be injective."""
        vs = [fn(v) for v in self._vertices]
        es = [(fn(u), fn(v)) for u, v in self._edges]
        lab = {fn(v): s for v, s in self._labels.items()}
        return Graph(vs, es, lab)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self._vset == other._vset and self._edges == other._edges
                and self._labels == other._labels)

    def __hash__(self) -> int:
        return hash((self._vset, self._edges))

    def __repr__(self) -> str:
        return f"Graph({len(self._vertices)} vertices, {len(self._edges)} edges)"


@dataclass(frozen=True)
class RootedTree:
    """A tree with a distinguished root and explicit child-to-parent map."""

    graph: Graph
    root: Vertex
    parent: Dict[Vertex, Vertex]

    def __post_init__(self):
        if not is_tree(self.graph):
            raise ValueError("underlying graph is not a tree")
        if self.root not in self.graph:
            raise ValueError(f"root {self.root!r} not a vertex")
        if set(self.parent) != self.graph.vertex_set - {self.root}:
            raise ValueError("parent map must cover exactly the non-root vertices")
        for c, p in self.parent.items():
            if not self.graph.has_edge(c, p):
                raise ValueError(f"parent entry {c!r} -> {p!r} is not an edge")

    def depth(self, v: Vertex) -> int:
        d = 0
        while v != self.root:
            v = self.parent[v]
            d += 1
        return d

    def height(self) -> int:
        return max(self.depth(v) for v in self.graph.vertices)

    def children(self, v: Vertex) -> Tuple[Vertex, ...]:
        return tuple(c for c in self.graph.neighbors(v) if self.parent.get(c) == v)

    def leaves(self) -> Tuple[Vertex, ...]:
        return tuple(v for v in self.graph.vertices if not self.children(v))


@dataclass(frozen=True)
class Matching:
    """A set of edges with pairwise distinct endpoints."""

    edges: FrozenSet[Edge]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(edge(u, v) for u, v in self.edges))
        seen = set()
        for u, v in self.edges:
            if u in seen or v in seen:
                raise ValueError(f"edges share endpoint at {u!r} or {v!r}")
            seen.add(u)
            seen.add(v)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    @property
    def vertices(self) -> FrozenSet[Vertex]:
        return frozenset(v for e in self.edges for v in e)


def is_connected(g: Graph) -> bool:
    """True iff g has exactly one connected component (empty graph: false)."""
    if len(g) == 0:
        return False
    start = g.vertices[0]
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(g)


def is_tree(g: Graph) -> bool:
    return is_connected(g) and len(g.edges) == len(g) - 1


def is_spanning_tree(g: Graph, t: Graph) -> bool:
    """True iff t is a tree on exactly V(g) using only edges of g."""
    return (t.vertex_set == g.vertex_set and t.edges <= g.edges and is_tree(t))


def tree_path(t: Graph, a: Vertex, b: Vertex) -> List[Vertex]:
    """The unique path from a to b in the tree t, as a vertex list.

    tree_path(t, a, a) is [a].
    """
    if not is_tree(t):
        raise ValueError("tree_path needs a tree")
    if a not in t or b not in t:
        raise ValueError(f"{a!r} or {b!r} not in the tree")
    parent = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for w in t.neighbors(v):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def path_edges(path: List[Vertex]) -> FrozenSet[Edge]:
    """Edge set of a vertex path."""
    return frozenset(edge(u, v) for u, v in zip(path, path[1:]))


@dataclass(frozen=True)
class Cycle:
    """A cycle given by its vertex set and edge set."""

    vertices: FrozenSet[Vertex]
    edges: FrozenSet[Edge]


def fundamental_cycle(g: Graph, t: Graph, e) -> Cycle:
    """The unique cycle closed by non-tree edge e over the spanning tree t."""
    u, v = edge(*e)
    if not is_spanning_tree(g, t):
        raise ValueError("t is not a spanning tree of g")
    if (u, v) not in g.edges:
        raise ValueError(f"{(u, v)!r} is not an edge of g")
    if (u, v) in t.edges:
        raise ValueError(f"{(u, v)!r} is a tree edge")
    path = tree_path(t, u, v)
    return Cycle(frozenset(path), path_edges(path) | {(u, v)})


def enumerate_induced_subtrees(t: Graph, anchor: Vertex) -> Iterator[FrozenSet[Vertex]]:
    """Yield every vertex set containing anchor that induces a subtree of t.

    Each set is emitted exactly once, in a deterministic order. On an m-vertex
    path anchored at an end this emits exactly m sets.
    """
    if not is_tree(t):
        raise ValueError("enumerate_induced_subtrees needs a tree")
    if anchor not in t:
        raise ValueError(f"{anchor!r} not in the tree")

    def rec(current: FrozenSet[Vertex], banned: FrozenSet[Vertex]):
        frontier = sorted({w for v in current for w in t.neighbors(v)}
                          - current - banned)
        if not frontier:
            yield current
            return
        c = frontier[0]
        yield from rec(current | {c}, banned)
        yield from rec(current, banned | {c})

    yield from rec(frozenset([anchor]), frozenset())


def tree_diameter(t: Graph) -> int:
    """Length in edges of a longest path in the tree t."""
    if not is_tree(t):
        raise ValueError("tree_diameter needs a tree")

    def farthest(start):
        dist = {start: 0}
        queue = deque([start])
        far = start
        while queue:
            v = queue.popleft()
            for w in t.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    if dist[w] > dist[far]:
                        far = w
                    queue.append(w)
        return far, dist[far]

    a, _ = farthest(t.vertices[0])
    _, d = farthest(a)
    return d


def path_graph(n: int, prefix: str = "p") -> Graph:
    """The canonical n-vertex path p00 - p01 - ... (zero-padded ids)."""
    if n < 1:
        raise ValueError("need n >= 1")
    width = max(2, len(str(n - 1)))
    vs = [f"{prefix}{i:0{width}d}" for i in range(n)]
    return Graph(vs, zip(vs, vs[1:]))


def cycle_graph(n: int, prefix: str = "c") -> Graph:
    if n < 3:
        raise ValueError("need n >= 3")
    width = max(2, len(str(n - 1)))
    vs = [f"{prefix}{i:0{width}d}" for i in range(n)]
    return Graph(vs, list(zip(vs, vs[1:])) + [(vs[-1], vs[0])])


def complete_graph(n: int, prefix: str = "k") -> Graph:
    if n < 1:
        raise ValueError("need n >= 1")
    width = max(2, len(str(n - 1)))
    vs = [f"{prefix}{i:0{width}d}" for i in range(n)]
    return Graph(vs, [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)])
