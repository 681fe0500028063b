"""The middle link graph and girth queries.

The middle link of an oriented skeleton is the undirected graph on
A ⊔ B ⊔ (colors × {in, out}): every directed horizontal edge (x, y) of color i
contributes the edges {x, (i,out)} and {y, (i,in)}.  Side vertices only ever
join middle vertices, so the graph is bipartite and all cycles are even:
half-girth is an integer or infinite.

Girth is computed by breadth-first search from every vertex with cross-edge
detection; acyclic graphs have infinite girth.  Threshold queries bound the
exploration radius so the search never materializes a full girth.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Hashable, Optional, Union

from .core import ConflictPresent, Subpartition
from .horizontal import OrientedSkeleton, Vertex, orient

INFINITE = math.inf
GirthValue = Union[int, float]

# A middle vertex: ("M", color, "in"|"out").
MidVertex = tuple[str, int, str]
Adjacency = dict[Hashable, list]


def girth_text(v: GirthValue) -> str:
    return "inf" if v == INFINITE else str(int(v))


class MiddleLink:
    """Undirected graph on A ⊔ B ⊔ (colors × {in, out})."""

    __slots__ = ("adjacency", "n_colors", "n_vertices", "n_edges")

    def __init__(self, adjacency: Adjacency, n_colors: int):
        self.adjacency = adjacency
        self.n_colors = n_colors
        self.n_vertices = len(adjacency)
        self.n_edges = sum(len(v) for v in adjacency.values()) // 2


def build_middle_link(sk: OrientedSkeleton) -> MiddleLink:
    """Middle link of a conflict-free skeleton.

    Isolated A/B vertices are retained; they can never affect girth.
    """
    if sk.conflict is not None:
        raise ConflictPresent("cannot build the middle link of a conflicted skeleton")
    p = sk.subpartition
    adj: dict[Hashable, set] = {}
    for i in range(1, p.m + 1):
        adj[("A", i)] = set()
    for j in range(1, p.n + 1):
        adj[("B", j)] = set()
    for c in range(sk.n_colors):
        adj[("M", c, "in")] = set()
        adj[("M", c, "out")] = set()
    for source, target, c in sk.directed_edges():
        adj[source].add(("M", c, "out"))
        adj[("M", c, "out")].add(source)
        adj[target].add(("M", c, "in"))
        adj[("M", c, "in")].add(target)
    return MiddleLink({v: sorted(ns) for v, ns in adj.items()}, sk.n_colors)


def l_ab_adjacency(p_or_sk) -> Adjacency:
    """Underlying undirected graph of L_A ⊔ L_B (orientation is ignored for
    girth).  Accepts a subpartition or a skeleton; works on conflicted
    skeletons too, since the edge sets do not depend on directions."""
    sk = p_or_sk if isinstance(p_or_sk, OrientedSkeleton) else orient(p_or_sk)
    adj: dict[Hashable, set] = {}
    for side, u, v in sk.edges:
        adj.setdefault((side, u), set()).add((side, v))
        adj.setdefault((side, v), set()).add((side, u))
    return {v: sorted(ns) for v, ns in adj.items()}


def girth(adjacency: Adjacency, cap: Optional[int] = None) -> GirthValue:
    """Exact girth of a simple undirected graph, INFINITE for forests.

    With `cap`, exploration is cut off as soon as no cycle shorter than `cap`
    can still be found; the return value is then exact when < cap and
    INFINITE otherwise ("at least cap").
    """
    best: GirthValue = INFINITE
    bound = cap if cap is not None else None
    for src in adjacency:
        limit = best if bound is None else min(best, bound)
        # cycles through src seen from src have length dist[u]+dist[w]+1
        dist = {src: 0}
        parent = {src: src}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if limit != INFINITE and 2 * du + 1 >= limit:
                break
            for w in adjacency[u]:
                if w not in dist:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u] and dist[w] >= du:
                    cycle_len = du + dist[w] + 1
                    if cycle_len < best:
                        best = cycle_len
                        limit = best if bound is None else min(best, bound)
    if bound is not None and best >= bound:
        return INFINITE
    return best


def girth_at_least(adjacency: Adjacency, g: int) -> bool:
    """True iff girth(G) >= g, via radius-bounded search only."""
    if g < 3:
        raise ValueError("girth thresholds below 3 are vacuous")
    return girth(adjacency, cap=g) >= g


def shortest_cycle_via(adjacency: Adjacency, probe_edges, cap: int) -> GirthValue:
    """Exact length of the shortest cycle using any of `probe_edges`, or
    INFINITE when none is shorter than `cap`.

    The shortest cycle through an edge {x, y} is 1 plus the shortest x-y
    path avoiding that edge, and shortest paths are exact, so this has none
    of the parity slack of cross-edge detection.  It is the incremental form
    of the decreasing girth conditions: a cycle created by extending a
    subpartition must use a newly added edge or an edge at a merged middle
    vertex, so probing those decides whether the child still clears a
    threshold the parent cleared.
    """
    best: GirthValue = INFINITE
    for x, y in probe_edges:
        if x not in adjacency:
            continue
        limit = min(best, cap) - 2  # need dist(x, y) <= limit
        dist = {x: 0}
        queue = deque([x])
        found = None
        while queue:
            u = queue.popleft()
            du = dist[u]
            if du >= limit:
                break
            for w in adjacency[u]:
                if u == x and w == y:
                    continue
                if w not in dist:
                    if w == y:
                        found = du + 1
                        queue.clear()
                        break
                    dist[w] = du + 1
                    queue.append(w)
        if found is not None and found + 1 < best:
            best = found + 1
    return INFINITE if best >= cap else best


def vertex_probe_edges(adjacency: Adjacency, vertex) -> list:
    """All incident edges of a vertex, as probes for shortest_cycle_via."""
    return [(vertex, w) for w in adjacency.get(vertex, ())]


def l1_adjacency_sparse(sk: OrientedSkeleton) -> Adjacency:
    """Middle-link adjacency without isolated side vertices or sorting;
    the hot-path twin of build_middle_link (isolated vertices and neighbor
    order never affect girth)."""
    if sk.conflict is not None:
        raise ConflictPresent("cannot build the middle link of a conflicted skeleton")
    adj: dict = {}
    for eid, (side, u, v) in enumerate(sk.edges):
        s, t = (u, v) if sk.forward[eid] else (v, u)
        c = sk.color[eid]
        out_v = ("M", c, "out")
        in_v = ("M", c, "in")
        for x, y in (((side, s), out_v), ((side, t), in_v)):
            xs = adj.setdefault(x, [])
            if y not in xs:
                xs.append(y)
            ys = adj.setdefault(y, [])
            if x not in ys:
                ys.append(x)
    return adj


def shortest_cycle(adjacency: Adjacency) -> Optional[list]:
    """A vertex list of one minimum cycle (closed: first == last), or None.

    Every minimum cycle contains some edge {u, w}; removing it leaves a
    shortest u-w path of length girth-1, and a shortest path is always
    simple, so path + edge is a genuine cycle.
    """
    g = girth(adjacency)
    if g == INFINITE:
        return None
    target = int(g)
    for u in adjacency:
        for w in adjacency[u]:
            # BFS from u to w in G minus the edge {u, w}
            dist = {u: 0}
            parent = {u: u}
            queue = deque([u])
            while queue:
                x = queue.popleft()
                if dist[x] + 1 >= target:
                    break
                for y in adjacency[x]:
                    if x == u and y == w:
                        continue
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        parent[y] = x
                        queue.append(y)
            if dist.get(w) == target - 1:
                path = [w]
                while path[-1] != u:
                    path.append(parent[path[-1]])
                path.reverse()          # u .. w
                return path + [u]       # close with the removed edge
    return None


def half_girth(adjacency: Adjacency) -> GirthValue:
    """girth/2; exact for the bipartite middle link, where girth is even."""
    g = girth(adjacency)
    return INFINITE if g == INFINITE else g // 2


def girth_of_l_ab(p_or_sk) -> GirthValue:
    """girth(L_AB) = min(girth(L_A), girth(L_B)); components are disjoint, so
    one pass over the combined adjacency suffices."""
    return girth(l_ab_adjacency(p_or_sk))


def triple_girth_status(p: Subpartition,
                        pairs: tuple[tuple[int, int], ...] = ((6, 3), (4, 4), (3, 6)),
                        theorem1_cap: bool = True) -> dict:
    """Evaluate the triple-girth condition on exact values.

    pair (p, q) holds iff girth(L_AB) >= p and half-girth(L_1) >= q.  With
    theorem1_cap, the (3,6) pair is statically false once the subpartition
    has three or more 2-cells: no orientable structure of that size has
    half-girth above 4.
    """
    sk = orient(p)
    if sk.conflict is not None:
        raise ConflictPresent("triple girth requires an orientable subpartition")
    g_ab = girth_of_l_ab(sk)
    hg = half_girth(build_middle_link(sk).adjacency)
    two_cells = sum(1 for c in p.cells if len(c) == 2)
    status: dict = {"girth_ab": g_ab, "half_girth_l1": hg}
    any_ok = False
    for pp, qq in pairs:
        ok = g_ab >= pp and hg >= qq
        if theorem1_cap and (pp, qq) == (3, 6) and two_cells >= 3:
            ok = False
        status[f"pair{pp}{qq}"] = ok
        any_ok = any_ok or ok
    status["satisfied"] = any_ok
    return status


def midlink_dot(ml: MiddleLink) -> str:
    """DOT text of the middle link; middle vertices labeled c<i>_in / c<i>_out
    and ranked between the B (top) and A (bottom) rows."""

    def name(v) -> str:
        if v[0] == "A":
            return f"a{v[1]}"
        if v[0] == "B":
            return f"b{v[1]}"
        return f"c{v[1]}_{v[2]}"

    from .horizontal import _dot_color  # shared palette

    lines = [
        "graph midlink {",
        "  rankdir=TB;",
        "  node [shape=circle, fontsize=10];",
    ]
    a_vs = sorted(v for v in ml.adjacency if v[0] == "A")
    b_vs = sorted(v for v in ml.adjacency if v[0] == "B")
    m_vs = sorted(v for v in ml.adjacency if v[0] == "M")
    lines.append("  { rank=min; " + " ".join(name(v) + ";" for v in b_vs) + " }")
    lines.append("  { rank=same; " + " ".join(name(v) + ";" for v in m_vs) + " }")
    lines.append("  { rank=max; " + " ".join(name(v) + ";" for v in a_vs) + " }")
    for v in m_vs:
        lines.append(f'  {name(v)} [style=filled, fillcolor="{_dot_color(v[1])}"];')
    seen = set()
    for v, neighbors in ml.adjacency.items():
        for w in neighbors:
            if (w, v) in seen:
                continue
            seen.add((v, w))
            color = _dot_color(v[1] if v[0] == "M" else w[1])
            lines.append(f'  {name(v)} -- {name(w)} [color="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
