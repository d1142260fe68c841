"""Exact search engines.

Spanning-tree enumeration, counting, and uniform sampling; an exact decider
for width-budgeted (optionally anchored) decompositions on a fixed host
tree; exact treewidth at desk scale; and the long-path threshold checks.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .decomposition import TreeDecomposition, from_subtrees, is_anchored, validate
from .errors import CapExceeded
from .graphs import (Graph, Vertex, edge, is_connected, is_spanning_tree,
                     path_graph, tree_diameter)

SAT = "SAT"
UNSAT = "UNSAT"


@dataclass(frozen=True)
class DeciderResult:
    status: str
    witness: Optional[TreeDecomposition]
    budget: int
    anchored: bool
    nodes: int
    seconds: float

    @property
    def is_sat(self) -> bool:
        return self.status == SAT


# ------------------------------------------------------- spanning trees

def enumerate_spanning_trees(g: Graph) -> Iterator[Graph]:
    """Stream every spanning tree of g exactly once, deterministically.

    Branches on including or excluding each edge in a fixed order; the
    exclude branch is taken only when the remaining edges can still connect
    the graph, so no dead subtree is ever entered.
    """
    if not is_connected(g):
        raise ValueError("need a connected graph")
    verts = g.vertices
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    edges = sorted(g.edges)
    pairs = [(index[a], index[b]) for a, b in edges]
    m = len(edges)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    def connectable(start: int, merges_left: int) -> bool:
        if merges_left == 0:
            return True
        if m - start < merges_left:
            return False
        p2 = parent.copy()

        def find2(x):
            while p2[x] != x:
                x = p2[x]
            return x

        for j in range(start, m):
            ra, rb = find2(pairs[j][0]), find2(pairs[j][1])
            if ra != rb:
                p2[ra] = rb
                merges_left -= 1
                if merges_left == 0:
                    return True
        return False

    chosen: List = []

    def rec(i: int):
        if len(chosen) == n - 1:
            yield Graph(verts, chosen)
            return
        if i == m:
            return
        a, b = pairs[i]
        ra, rb = find(a), find(b)
        if ra == rb:
            yield from rec(i + 1)
            return
        parent[ra] = rb
        chosen.append(edges[i])
        yield from rec(i + 1)
        chosen.pop()
        parent[ra] = ra
        if connectable(i + 1, n - 1 - len(chosen)):
            yield from rec(i + 1)

    yield from rec(0)


def _det_bareiss(mat: List[List[int]]) -> int:
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            row = m[i]
            rik = row[k]
            base = m[k]
            for j in range(k + 1, n):
                row[j] = (row[j] * pk - rik * base[j]) // prev
            row[k] = 0
        prev = pk
    return sign * m[n - 1][n - 1]


def count_spanning_trees(g: Graph, pivot_order: Optional[List[Vertex]] = None) -> int:
    """Exact spanning-tree count via an integer Laplacian-minor determinant.

    pivot_order fixes the vertex order of the matrix; any order gives the
    same count, which the tests exploit as a second independent evaluation.
    """
    if not is_connected(g):
        raise ValueError("need a connected graph")
    verts = list(pivot_order) if pivot_order is not None else list(g.vertices)
    if set(verts) != g.vertex_set:
        raise ValueError("pivot_order must be a permutation of the vertices")
    if len(verts) == 1:
        return 1
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    lap = [[0] * (n - 1) for _ in range(n - 1)]
    for a, b in g.edges:
        ia, ib = index[a], index[b]
        if ia > 0:
            lap[ia - 1][ia - 1] += 1
        if ib > 0:
            lap[ib - 1][ib - 1] += 1
        if ia > 0 and ib > 0:
            lap[ia - 1][ib - 1] -= 1
            lap[ib - 1][ia - 1] -= 1
    return _det_bareiss(lap)


def sample_spanning_tree(g: Graph, rng: random.Random) -> Graph:
    """One uniformly random spanning tree (loop-erased random walk)."""
    if not is_connected(g):
        raise ValueError("need a connected graph")
    verts = g.vertices
    in_tree = {verts[0]}
    parent: Dict[Vertex, Vertex] = {}
    for v in verts[1:]:
        if v in in_tree:
            continue
        nxt: Dict[Vertex, Vertex] = {}
        u = v
        while u not in in_tree:
            nxt[u] = rng.choice(g.neighbors(u))
            u = nxt[u]
        u = v
        while u not in in_tree:
            in_tree.add(u)
            parent[u] = nxt[u]
            u = nxt[u]
    return Graph(verts, [(c, p) for c, p in parent.items()])


def sample_spanning_trees(g: Graph, count: int, seed: int = 0) -> Iterator[Graph]:
    rng = random.Random(seed)
    for _ in range(count):
        yield sample_spanning_tree(g, rng)


# -------------------------------------------------------------- decider

def min_width_on_tree(g: Graph, host: Graph, budget: int,
                      anchored: bool = False) -> DeciderResult:
    """Decide whether g has a width-<= budget decomposition on this host.

    Exact. Searches edge by edge over the shared host node each edge's
    endpoint subtrees must meet, growing each subtree as the minimal one
    spanning its chosen nodes. Any satisfying assignment can be shrunk to
    that form (replace each subtree by the union of host paths from the
    vertex, or its first node, to one shared node per incident edge), so
    restricting the search loses nothing.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if not is_spanning_tree(g, host):
        raise ValueError("host is not a spanning tree of g")
    t0 = time.perf_counter()
    verts = sorted(g.vertices)
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    cap = budget + 1

    par = [-1] * n
    depth = [0] * n
    hadj: List[List[int]] = [[] for _ in range(n)]
    for a, b in host.edges:
        ia, ib = index[a], index[b]
        hadj[ia].append(ib)
        hadj[ib].append(ia)
    seen = [False] * n
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        for y in hadj[x]:
            if not seen[y]:
                seen[y] = True
                par[y] = x
                depth[y] = depth[x] + 1
                stack.append(y)

    path_cache: Dict[Tuple[int, int], int] = {}

    def path_mask(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        got = path_cache.get(key)
        if got is not None:
            return got
        x, y = a, b
        mask = 0
        while depth[x] > depth[y]:
            mask |= 1 << x
            x = par[x]
        while depth[y] > depth[x]:
            mask |= 1 << y
            y = par[y]
        while x != y:
            mask |= (1 << x) | (1 << y)
            x = par[x]
            y = par[y]
        mask |= 1 << x
        path_cache[key] = mask
        return mask

    deg = {v: g.degree(v) for v in verts}
    edge_order = sorted(g.edges, key=lambda e: (-(deg[e[0]] + deg[e[1]]), e))
    epairs = [(index[a], index[b]) for a, b in edge_order]
    m = len(epairs)

    if anchored:
        sub = [1 << i for i in range(n)]
        rep = list(range(n))
        loads = [1] * n
    else:
        sub = [0] * n
        rep = [-1] * n
        loads = [0] * n
    le1 = 0  # nodes that can take one more guest
    le2 = 0  # nodes that can take two more guests
    for i in range(n):
        if loads[i] <= cap - 1:
            le1 |= 1 << i
        if loads[i] <= cap - 2:
            le2 |= 1 << i

    state = {"nodes": 0, "le1": le1, "le2": le2}
    witness_holder: List[TreeDecomposition] = []

    def bump(i: int, d: int) -> None:
        loads[i] += d
        bit = 1 << i
        if loads[i] > cap - 1:
            state["le1"] &= ~bit
        if loads[i] > cap - 2:
            state["le2"] &= ~bit

    def drop(i: int, d: int) -> None:
        loads[i] -= d
        bit = 1 << i
        if loads[i] <= cap - 1:
            state["le1"] |= bit
        if loads[i] <= cap - 2:
            state["le2"] |= bit

    def future_ok(start: int) -> bool:
        if state["le2"]:
            return True
        le1_now = state["le1"]
        for j in range(start, m):
            a, b = epairs[j]
            sa, sb = sub[a], sub[b]
            if sa & sb:
                continue
            if (sa | sb) & le1_now:
                continue
            return False
        return True

    def finish() -> bool:
        placed: List[int] = []
        for i in range(n):
            if sub[i]:
                continue
            cands = [x for x in range(n) if loads[x] < cap]
            if not cands:
                for j in placed:
                    drop(rep[j], 1)
                    sub[j] = 0
                    rep[j] = -1
                return False
            x = min(cands, key=lambda x: (loads[x], x))
            sub[i] = 1 << x
            rep[i] = x
            bump(x, 1)
            placed.append(i)
        assignment = {verts[i]: frozenset(verts[j] for j in range(n)
                                          if sub[i] >> j & 1)
                      for i in range(n)}
        td = from_subtrees(host, assignment)
        assert validate(g, td)
        assert td.width() <= budget
        if anchored:
            assert is_anchored(g, td)
        witness_holder.append(td)
        return True

    def rec(j: int) -> bool:
        while j < m and sub[epairs[j][0]] & sub[epairs[j][1]]:
            j += 1
        if j == m:
            return finish()
        a, b = epairs[j]
        sa, sb = sub[a], sub[b]
        for x in range(n):
            bit = 1 << x
            extra = (0 if sa & bit else 1) + (0 if sb & bit else 1)
            if loads[x] + extra > cap:
                continue
            ga = 0 if sa & bit else ((path_mask(x, rep[a]) & ~sa) if sa else bit)
            gb = 0 if sb & bit else ((path_mask(x, rep[b]) & ~sb) if sb else bit)
            both = ga | gb
            touched: List[Tuple[int, int]] = []
            ok = True
            y = both
            while y:
                yb = y & -y
                yi = yb.bit_length() - 1
                d = (1 if ga & yb else 0) + (1 if gb & yb else 0)
                if loads[yi] + d > cap:
                    ok = False
                    break
                touched.append((yi, d))
                y ^= yb
            if not ok:
                continue
            state["nodes"] += 1
            old_rep_a, old_rep_b = rep[a], rep[b]
            sub[a] = sa | ga
            sub[b] = sb | gb
            if rep[a] < 0:
                rep[a] = x
            if rep[b] < 0:
                rep[b] = x
            for yi, d in touched:
                bump(yi, d)
            if future_ok(j + 1) and rec(j + 1):
                return True
            for yi, d in touched:
                drop(yi, d)
            sub[a], sub[b] = sa, sb
            rep[a], rep[b] = old_rep_a, old_rep_b
        return False

    sat = rec(0)
    seconds = time.perf_counter() - t0
    if sat:
        return DeciderResult(SAT, witness_holder[0], budget, anchored,
                             state["nodes"], seconds)
    return DeciderResult(UNSAT, None, budget, anchored, state["nodes"], seconds)


def _sweep_worker(args) -> DeciderResult:
    g, tree_edges, budget, anchored = args
    host = Graph(g.vertices, tree_edges)
    res = min_width_on_tree(g, host, budget, anchored)
    # witnesses are dropped in sweep mode to keep results light
    return DeciderResult(res.status, None, res.budget, res.anchored,
                         res.nodes, res.seconds)


def decide_over_trees(g: Graph, trees: Iterable[Graph], budget: int,
                      anchored: bool, jobs: int = 1) -> Iterator[DeciderResult]:
    """Run the decider over many host trees, optionally in a process pool."""
    if jobs <= 1:
        for t in trees:
            yield min_width_on_tree(g, t, budget, anchored)
        return
    tasks = ((g, sorted(t.edges), budget, anchored) for t in trees)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_sweep_worker, tasks, chunksize=16)


def min_anchored_spanning_width(g: Graph, cap_vertices: int = 12
                                ) -> Tuple[int, Graph, TreeDecomposition]:
    """Minimum anchored width over every spanning tree of g, with a witness.

    Exhaustive over spanning trees, so guarded by a vertex cap.
    """
    if not is_connected(g):
        raise ValueError("need a connected graph")
    if len(g) > cap_vertices:
        raise CapExceeded(len(g), cap_vertices, "min anchored spanning width")
    best: Optional[int] = None
    best_host: Optional[Graph] = None
    best_witness: Optional[TreeDecomposition] = None
    for t in enumerate_spanning_trees(g):
        if best is None:
            b = 0
            while True:
                res = min_width_on_tree(g, t, b, anchored=True)
                if res.is_sat:
                    best, best_host, best_witness = b, t, res.witness
                    break
                b += 1
        else:
            if best == 0:
                break
            res = min_width_on_tree(g, t, best - 1, anchored=True)
            if not res.is_sat:
                continue
            b, wit = best - 1, res.witness
            while b > 0:
                res = min_width_on_tree(g, t, b - 1, anchored=True)
                if not res.is_sat:
                    break
                b, wit = b - 1, res.witness
            best, best_host, best_witness = b, t, wit
    return best, best_host, best_witness


# ------------------------------------------------------------ treewidth

def _is_forest(g: Graph) -> bool:
    # acyclic iff every component ships one edge fewer than its vertices
    seen = set()
    components = 0
    for start in g.vertices:
        if start in seen:
            continue
        components += 1
        seen.add(start)
        stack = [start]
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return len(g.edges) == len(g) - components


def _reduces_to_empty(g: Graph) -> bool:
    """Degree-<=1 deletion plus degree-2 suppression empties exactly the
    graphs of treewidth <= 2."""
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    work = set(adj)
    while work:
        v = work.pop()
        if v not in adj:
            continue
        nbrs = adj[v]
        if len(nbrs) > 2:
            continue
        if len(nbrs) == 2:
            a, b = sorted(nbrs)
            adj[a].add(b)
            adj[b].add(a)
        for w in nbrs:
            adj[w].discard(v)
            if len(adj[w]) <= 2:
                work.add(w)
        del adj[v]
    return not adj


def _treewidth_dp(g: Graph) -> int:
    verts = sorted(g.vertices)
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    for a, b in g.edges:
        adj[index[a]] |= 1 << index[b]
        adj[index[b]] |= 1 << index[a]
    full = (1 << n) - 1
    f = [0] * (1 << n)
    f[0] = -1
    for s in range(1, 1 << n):
        best = n
        t = s
        while t:
            vb = t & -t
            t ^= vb
            prev = f[s ^ vb]
            if prev >= best:
                continue
            comp = vb
            nb = 0
            while True:
                nb = 0
                c = comp
                while c:
                    cb = c & -c
                    nb |= adj[cb.bit_length() - 1]
                    c ^= cb
                grown = comp | (nb & s)
                if grown == comp:
                    break
                comp = grown
            q = bin(nb & ~s).count("1")
            cand = prev if prev > q else q
            if cand < best:
                best = cand
        f[s] = best
    return f[full]


def exact_treewidth(g: Graph, cap: int = 14) -> int:
    """Exact treewidth: forest and treewidth-2 recognizers handle any size,
    the general elimination-order search is capped."""
    if not g.edges:
        return 0
    if _is_forest(g):
        return 1
    if _reduces_to_empty(g):
        return 2
    if len(g) > cap:
        raise CapExceeded(len(g), cap, "exact treewidth")
    return _treewidth_dp(g)


# ------------------------------------------------------------ long paths

def longpath_threshold(k: int, h: int) -> int:
    """Vertex count (k+2)^h past which width-k hosts must contain an h-path."""
    if k < 1 or h < 1:
        raise ValueError("need k >= 1 and h >= 1")
    return (k + 2) ** h


def check_longpath_property(n: int, k: int, td: TreeDecomposition) -> bool:
    """Whether the host of a width-<=k decomposition of the n-path has
    diameter at least the largest h with (k+2)^h <= n.

    A false return would be a counterexample to the long-path bound.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    g = path_graph(n)
    report = validate(g, td)
    if not report:
        raise ValueError(f"decomposition invalid for the {n}-path: {report}")
    if td.width() > k:
        raise ValueError(f"width {td.width()} exceeds k={k}")
    h = 0
    while (k + 2) ** (h + 1) <= n:
        h += 1
    return tree_diameter(td.host) >= h
