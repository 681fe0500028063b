"""Left alignment of candidate cells and de-duplicated child generation.

Left alignment relabels the fresh indices of a candidate 2-cell to the next
unused slots: new A-indices (those above the frontier i_p) map in increasing
order to i_p+1, i_p+2, and new B-indices map *in pairing order* (the B-index
paired with the smaller A-index first) to j_p+1, j_p+2.  Old indices are left
alone.  The aligned copy is isomorphic to the original relative to the
current subpartition, so enumerating aligned representatives directly over
the bounded index window generates all extensions up to isomorphism without
ever scanning the full m*n grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Cell, Edge, IndexOutOfRange, Subpartition, extend, make_cell


@dataclass(frozen=True)
class AlignmentContext:
    i_p: int
    j_p: int
    m: int
    n: int

    @classmethod
    def of(cls, p: Subpartition) -> "AlignmentContext":
        return cls(p.i_p, p.j_p, p.m, p.n)


@dataclass(frozen=True)
class AlignedCell:
    cell: Cell
    used_new_a: int  # 0, 1 or 2 fresh A slots consumed
    used_new_b: int


def left_align(ctx: AlignmentContext, cell: Cell) -> AlignedCell:
    """Left-aligned copy of a 2-cell relative to a frontier (i_p, j_p).

    The cell is given with A-indices increasing: ((i1, j1), (i2, j2)),
    i1 < i2.  New A-indices map in (i1, i2) order to i_p+1, i_p+2; new
    B-indices map in (j1, j2) order (not sorted by value) to j_p+1, j_p+2.
    """
    if len(cell) != 2:
        raise ValueError("left alignment is defined for 2-cells")
    (i1, j1), (i2, j2) = cell
    new_a = [i for i in (i1, i2) if i > ctx.i_p]
    new_b = [j for j in (j1, j2) if j > ctx.j_p]
    if ctx.i_p + len(new_a) > ctx.m:
        raise IndexOutOfRange(
            f"alignment needs A-slot {ctx.i_p + len(new_a)} > m={ctx.m}")
    if ctx.j_p + len(new_b) > ctx.n:
        raise IndexOutOfRange(
            f"alignment needs B-slot {ctx.j_p + len(new_b)} > n={ctx.n}")
    phi_a = {idx: ctx.i_p + 1 + pos for pos, idx in enumerate(new_a)}
    phi_b = {idx: ctx.j_p + 1 + pos for pos, idx in enumerate(new_b)}
    aligned = make_cell(
        (phi_a.get(i1, i1), phi_b.get(j1, j1)),
        (phi_a.get(i2, i2), phi_b.get(j2, j2)),
    )
    return AlignedCell(aligned, len(new_a), len(new_b))


def _is_aligned(cell: Cell, i_p: int, j_p: int) -> bool:
    """True iff a window cell is its own left-aligned copy."""
    (i1, j1), (i2, j2) = cell
    new_a = [i for i in (i1, i2) if i > i_p]
    if new_a != list(range(i_p + 1, i_p + 1 + len(new_a))):
        return False
    new_b = [j for j in (j1, j2) if j > j_p]
    # pairing order: j1 (partner of the smaller A-index) gets the first slot
    return new_b == list(range(j_p + 1, j_p + 1 + len(new_b)))


def candidate_bound(p: Subpartition) -> int:
    """Sanity ceiling on the aligned candidate count after k cells.

    Candidates pick an unordered A-pair and an ordered B-pair inside the
    window, so 2 * C(.,2) * C(.,2) is a true ceiling.  Without the factor 2
    the ceiling actually fails: when both B-indices of a candidate are
    already in use, both pairings with the A-pair are distinct aligned
    cells (e.g. three cells covering (1,1),(2,2),(1,2),(3,3),(4,4),(5,5)
    admit 313 aligned extensions against C(6,2)^2 = 225).
    """
    k = len(p.cells)
    return (2 * math.comb(min(2 * k + 2, p.m), 2)
            * math.comb(min(2 * k + 2, p.n), 2))


def forced_edge(p: Subpartition) -> Edge | None:
    """The uncovered edge a smallest-edge-mode extension must contain.

    Uncovered edges between already-used vertices queue up as vertices come
    into use (each cell's newly reachable edges are appended in one
    lexicographic batch); the front of the queue is forced.  Only when the
    queue is empty does the rule fall back to the lexicographically smallest
    uncovered edge of the grid, which then introduces a fresh vertex.

    Forcing any single uncovered edge into the next cell is complete for
    full partitions: every edge must eventually be covered, and the cell
    covering the forced edge can always be added first.
    """
    used_a: list[int] = []
    used_b: list[int] = []
    queue: list[Edge] = []
    for cell in p.cells:
        cell_a = {a for a, _ in cell}
        cell_b = {b for _, b in cell}
        new_a = sorted(cell_a.difference(used_a))
        new_b = sorted(cell_b.difference(used_b))
        batch = [(a, b) for a in new_a for b in used_b]
        batch += [(a, b) for a in used_a for b in new_b]
        batch += [(a, b) for a in new_a for b in new_b]
        used_a += new_a
        used_b += new_b
        queue = [e for e in queue if e not in cell]
        queue += sorted(e for e in batch if not p.covers(e) and e not in cell)
    if queue:
        return queue[0]
    return p.smallest_uncovered()


def aligned_candidates(p: Subpartition, smallest_edge: bool = False) -> list[Cell]:
    """All de-duplicated aligned 2-cell extensions of p, in lexicographic
    order.

    Enumerates the bounded window [1, min(i_p+2, m)] x [1, min(j_p+2, n)] and
    keeps the cells that are their own aligned copy, avoid covered edges, and
    satisfy the disjoint vertex condition.  With smallest_edge, the forced
    edge (see forced_edge; it always lies in the window) must belong to the
    cell.
    """
    i_p, j_p = p.i_p, p.j_p
    wa = min(i_p + 2, p.m)
    wb = min(j_p + 2, p.n)
    out: list[Cell] = []
    covered = p.covered
    n = p.n
    if smallest_edge:
        target = forced_edge(p)
        if target is None:
            return []
        ta, tb = target
        for a in range(1, wa + 1):
            if a == ta:
                continue
            for b in range(1, wb + 1):
                if b == tb or covered >> ((a - 1) * n + (b - 1)) & 1:
                    continue
                cell = (target, (a, b)) if ta < a else ((a, b), target)
                if _is_aligned(cell, i_p, j_p):
                    out.append(cell)
        out.sort()
        return out
    for a1 in range(1, wa + 1):
        for b1 in range(1, wb + 1):
            if covered >> ((a1 - 1) * n + (b1 - 1)) & 1:
                continue
            for a2 in range(a1 + 1, wa + 1):
                for b2 in range(1, wb + 1):
                    if b2 == b1:
                        continue
                    if covered >> ((a2 - 1) * n + (b2 - 1)) & 1:
                        continue
                    cell = ((a1, b1), (a2, b2))
                    if _is_aligned(cell, i_p, j_p):
                        out.append(cell)
    return out


def child(p: Subpartition, aligned: Cell) -> Subpartition:
    """Extend p by an aligned candidate cell."""
    return extend(p, aligned)
