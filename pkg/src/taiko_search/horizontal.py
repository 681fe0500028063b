"""Horizontal edges, color classes, and the parity-consistent orientation.

Every 2-cell {(a,b),(a',b')} induces one horizontal edge {a,a'} on the A side
and one {b,b'} on the B side, and couples their directions: a->a' iff b->b'
(pairing a with b and a' with b').  Duplicated unordered pairs are merged into
a single edge with multi-cell provenance.  Direction consistency is a pure
parity constraint between per-edge boolean variables, so orientation is
decided with a union-find carrying parity bits; color (equivalence) classes
fall out of the same union-find, since two horizontal edges are related
exactly when some cell couples them.

The canonical orientation points the first-inserted edge of every class
"forward" (from its smaller endpoint); all downstream checks are invariant
under flipping whole classes.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional

from .core import ConflictPresent, Subpartition, format_cell

# A vertex of the taiko: ("A", i) or ("B", j).
Vertex = tuple[str, int]
# A horizontal edge key: (side, u, v) with u < v.
EdgeKey = tuple[str, int, int]


def _edge_name(key: EdgeKey) -> str:
    side, u, v = key
    return f"{side}{{{u},{v}}}"


@dataclass(frozen=True)
class FoldWitness:
    vertex: Vertex
    color: int
    direction: str            # "in" or "out" at the vertex
    edges: tuple[EdgeKey, EdgeKey]

    def to_json(self) -> dict:
        return {
            "vertex": f"{self.vertex[0].lower()}{self.vertex[1]}",
            "color": self.color,
            "direction": self.direction,
            "edges": [_edge_name(e) for e in self.edges],
        }


@dataclass(frozen=True)
class PatternWitness:
    pattern: tuple[tuple[int, str], tuple[int, str]]  # sorted ((color, dir), ...)
    vertices: tuple[Vertex, Vertex]

    def to_json(self) -> dict:
        return {
            "pattern": [[c, d] for c, d in self.pattern],
            "vertices": [f"{s.lower()}{i}" for s, i in self.vertices],
        }


@dataclass(frozen=True)
class ConflictWitness:
    """A cycle of direction constraints with odd total parity.

    `steps` lists (cell text, edge name, edge name, parity) for a constraint
    path from one edge back to itself; the parities XOR to 1, which is the
    checkable inconsistency.
    """

    steps: tuple[tuple[str, str, str, int], ...]

    def to_json(self) -> dict:
        return {"constraint_cycle": [list(s) for s in self.steps]}


class OrientedSkeleton:
    """Horizontal edges of a subpartition with colors and an orientation.

    Attributes:
        edges: tuple of EdgeKey in first-insertion order.
        provenance: per-edge tuple of cell indices that induced it.
        color: per-edge class id (classes numbered by first appearance).
        n_colors: number of classes.
        forward: per-edge direction flag; True means u -> v for key (_, u, v).
        conflict: ConflictWitness if the constraints are inconsistent, else None.
    """

    __slots__ = ("subpartition", "edges", "provenance", "color", "n_colors",
                 "forward", "conflict", "_index",
                 "last_edge_ids", "last_new_edges", "last_merged")

    def __init__(self, p: Subpartition):
        self.subpartition = p
        index: dict[EdgeKey, int] = {}
        edges: list[EdgeKey] = []
        provenance: list[list[int]] = []
        parent: list[int] = []     # union-find over edge ids
        par: list[int] = []        # parity relative to parent
        constraints: list[tuple[int, int, int, int]] = []  # (e1, e2, parity, cell)
        conflict: Optional[ConflictWitness] = None
        # what the newest cell changed, for incremental girth thresholds:
        # the horizontal edges it introduced, and whether it merged two
        # pre-existing color classes (which rewires the middle link)
        last_ids: tuple[int, ...] = ()
        last_new: list[int] = []
        last_merged = False

        # non-compressing find keeps the parity bookkeeping obvious; the
        # forests here never exceed a few dozen edges
        def find_plain(x: int) -> tuple[int, int]:
            parity = 0
            while parent[x] != x:
                parity ^= par[x]
                x = parent[x]
            return x, parity

        def intern(key: EdgeKey, cell_idx: int) -> int:
            eid = index.get(key)
            if eid is None:
                eid = len(edges)
                index[key] = eid
                edges.append(key)
                provenance.append([cell_idx])
                parent.append(eid)
                par.append(0)
            else:
                provenance[eid].append(cell_idx)
            return eid

        newest = len(p.cells) - 1
        for cell_idx, cell in enumerate(p.cells):
            if len(cell) != 2:
                continue  # 1-cells induce no horizontal edges or constraints
            (a1, b1), (a2, b2) = cell  # a1 < a2 by cell normalization
            ka: EdgeKey = ("A", a1, a2)
            kb: EdgeKey = ("B", min(b1, b2), max(b1, b2))
            if cell_idx == newest:
                known = len(edges)
            ea = intern(ka, cell_idx)
            eb = intern(kb, cell_idx)
            if cell_idx == newest:
                last_ids = (ea, eb)
                last_new = [e for e in (ea, eb) if e >= known]
            parity = 1 if b1 > b2 else 0  # a1->a2 iff b1->b2, in reference order
            constraints.append((ea, eb, parity, cell_idx))
            if conflict is not None:
                continue
            ra, pa = find_plain(ea)
            rb, pb = find_plain(eb)
            if ra != rb:
                if cell_idx == newest and not last_new:
                    last_merged = True
                # attach rb under ra so that parity(ea, eb) == parity
                parent[rb] = ra
                par[rb] = pa ^ parity ^ pb
            elif pa ^ pb != parity:
                conflict = _conflict_witness(p, edges, constraints)

        self.edges = tuple(edges)
        self.provenance = tuple(tuple(c) for c in provenance)
        self._index = index
        self.conflict = conflict
        self.last_edge_ids = last_ids
        self.last_new_edges = tuple(last_new)
        self.last_merged = last_merged

        # color classes and canonical orientation (class representative =
        # first-inserted edge, oriented forward)
        roots: dict[int, int] = {}
        color = []
        forward = []
        rel_to_rep: dict[int, int] = {}
        for eid in range(len(edges)):
            root, parity = find_plain(eid)
            if root not in roots:
                roots[root] = len(roots)
                rel_to_rep[root] = parity  # parity of the representative
            color.append(roots[root])
            forward.append(parity == rel_to_rep[root])
        self.color = tuple(color)
        self.n_colors = len(roots)
        self.forward = tuple(forward)

    # -- queries -------------------------------------------------------------

    def edge_id(self, key: EdgeKey) -> int:
        return self._index[key]

    def directed_edges(self) -> list[tuple[Vertex, Vertex, int]]:
        """(source, target, color) per horizontal edge, under the canonical
        orientation.  Requires a conflict-free skeleton."""
        if self.conflict is not None:
            raise ConflictPresent("skeleton has an orientation conflict")
        out = []
        for eid, (side, u, v) in enumerate(self.edges):
            s, t = (u, v) if self.forward[eid] else (v, u)
            out.append(((side, s), (side, t), self.color[eid]))
        return out

    def color_classes(self) -> list[list[EdgeKey]]:
        classes: list[list[EdgeKey]] = [[] for _ in range(self.n_colors)]
        for eid, key in enumerate(self.edges):
            classes[self.color[eid]].append(key)
        return classes

    def flip_class(self, color_id: int) -> "OrientedSkeleton":
        """Copy of this skeleton with every edge of one class reversed.

        Fold/pattern verdicts and middle-link girth must not change under
        this; the search relies on that to fix the canonical orientation."""
        if self.conflict is not None:
            raise ConflictPresent("skeleton has an orientation conflict")
        clone = object.__new__(OrientedSkeleton)
        clone.subpartition = self.subpartition
        clone.edges = self.edges
        clone.provenance = self.provenance
        clone._index = self._index
        clone.conflict = None
        clone.color = self.color
        clone.n_colors = self.n_colors
        clone.last_edge_ids = self.last_edge_ids
        clone.last_new_edges = self.last_new_edges
        clone.last_merged = self.last_merged
        clone.forward = tuple(
            (not f) if self.color[eid] == color_id else f
            for eid, f in enumerate(self.forward)
        )
        return clone

    def vertex_slots(self) -> dict[Vertex, list[tuple[int, str, int]]]:
        """Per vertex: incident (color, direction at vertex, edge id)."""
        if self.conflict is not None:
            raise ConflictPresent("skeleton has an orientation conflict")
        slots: dict[Vertex, list[tuple[int, str, int]]] = defaultdict(list)
        for eid, (side, u, v) in enumerate(self.edges):
            s, t = (u, v) if self.forward[eid] else (v, u)
            c = self.color[eid]
            slots[(side, s)].append((c, "out", eid))
            slots[(side, t)].append((c, "in", eid))
        return slots


def _conflict_witness(p: Subpartition, edges: list[EdgeKey],
                      constraints: list[tuple[int, int, int, int]]) -> ConflictWitness:
    """Extract a minimal (fewest-constraints) odd cycle of constraints.

    The last constraint closed the cycle; BFS over the previously added
    constraints finds the shortest path between its endpoints.
    """
    e1, e2, parity, cell_idx = constraints[-1]
    adj: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for a, b, q, ci in constraints[:-1]:
        adj[a].append((b, q, ci))
        adj[b].append((a, q, ci))
    prev: dict[int, tuple[int, int, int]] = {e1: (-1, -1, -1)}
    queue = deque([e1])
    while queue:
        x = queue.popleft()
        if x == e2:
            break
        for y, q, ci in adj[x]:
            if y not in prev:
                prev[y] = (x, q, ci)
                queue.append(y)
    path = []
    x = e2
    while x != e1:
        px, q, ci = prev[x]
        path.append((ci, px, x, q))
        x = px
    path.reverse()
    steps = [(format_cell(p.cells[ci]), _edge_name(edges[a]), _edge_name(edges[b]), q)
             for ci, a, b, q in path]
    steps.append((format_cell(p.cells[cell_idx]),
                  _edge_name(edges[e1]), _edge_name(edges[e2]), parity))
    return ConflictWitness(tuple(steps))


def orient(p: Subpartition) -> OrientedSkeleton:
    """Derive horizontal edges, colors, and a parity-consistent orientation.

    A conflict is data, not an error: the returned skeleton carries a witness
    cycle of constraints when the structure is unorientable.
    """
    return OrientedSkeleton(p)


def horizontal_edges(p: Subpartition) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Undirected horizontal edge sets on A and on B, duplicates merged."""
    on_a: set[tuple[int, int]] = set()
    on_b: set[tuple[int, int]] = set()
    for cell in p.cells:
        if len(cell) != 2:
            continue
        (a1, b1), (a2, b2) = cell
        on_a.add((a1, a2))
        on_b.add((min(b1, b2), max(b1, b2)))
    return sorted(on_a), sorted(on_b)


def color_classes(p: Subpartition) -> list[list[EdgeKey]]:
    """Partition of the horizontal edges into color classes.

    Defined for unorientable structures too: the class relation does not
    depend on directions.
    """
    return OrientedSkeleton(p).color_classes()


def find_fold(sk: OrientedSkeleton) -> Optional[FoldWitness]:
    """Two distinct same-color horizontal edges with the same direction at a
    shared vertex, or None.  Invariant under whole-class flips."""
    slots = sk.vertex_slots()
    for vertex in sorted(slots):
        buckets: dict[tuple[int, str], list[int]] = defaultdict(list)
        for c, d, eid in slots[vertex]:
            buckets[(c, d)].append(eid)
        for (c, d), eids in sorted(buckets.items()):
            if len(eids) >= 2:
                eids.sort()
                return FoldWitness(vertex, c, d, (sk.edges[eids[0]], sk.edges[eids[1]]))
    return None


def find_repeated_pattern(sk: OrientedSkeleton) -> Optional[PatternWitness]:
    """Two distinct vertices carrying the same unordered (color, direction)
    pair, or None."""
    slots = sk.vertex_slots()
    seen: dict[tuple, Vertex] = {}
    for vertex in sorted(slots):
        distinct = sorted({(c, d) for c, d, _ in slots[vertex]})
        for i in range(len(distinct)):
            for j in range(i + 1, len(distinct)):
                pattern = (distinct[i], distinct[j])
                if pattern in seen:
                    return PatternWitness(pattern, (seen[pattern], vertex))
                seen[pattern] = vertex
    return None


# -- DOT export ---------------------------------------------------------------

_DOT_PALETTE = [
    "orange", "green3", "royalblue", "mediumorchid", "red3", "turquoise4",
    "gold3", "deeppink3", "chartreuse4", "navy", "brown", "gray40",
]


def _dot_color(c: int) -> str:
    return _DOT_PALETTE[c % len(_DOT_PALETTE)]


def taiko_dot(p: Subpartition) -> str:
    """DOT text of the taiko: A-vertices on the bottom rank, B on the top,
    vertical edges undirected, horizontal edges directed and colored by class.
    Vertical edges of 2-cells inherit their cells' class color."""
    sk = OrientedSkeleton(p)
    if sk.conflict is not None:
        raise ConflictPresent("cannot orient taiko for DOT export")
    cell_color: dict[int, int] = {}
    for eid, cells in enumerate(sk.provenance):
        for ci in cells:
            cell_color[ci] = sk.color[eid]
    lines = [
        "digraph taiko {",
        "  rankdir=TB;",
        "  node [shape=circle, fontsize=10];",
    ]
    a_used = sorted({e[0] for c in p.cells for e in c})
    b_used = sorted({e[1] for c in p.cells for e in c})
    lines.append("  { rank=min; " + " ".join(f"b{j};" for j in b_used) + " }")
    lines.append("  { rank=max; " + " ".join(f"a{i};" for i in a_used) + " }")
    for ci, cell in enumerate(p.cells):
        color = _dot_color(cell_color[ci]) if ci in cell_color else "black"
        for a, b in cell:
            lines.append(f'  a{a} -> b{b} [dir=none, color="{color}"];')
    for (side, s), (_, t), c in sk.directed_edges():
        prefix = "a" if side == "A" else "b"
        lines.append(
            f'  {prefix}{s} -> {prefix}{t} '
            f'[color="{_dot_color(c)}", label="c{c}", constraint=false];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
