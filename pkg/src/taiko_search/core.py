"""Value types for the bipartite pairing search: vertical edges, cells,
subpartitions.

Vertices are 1-based indices into the two sides A (size m) and B (size n) of a
complete bipartite graph.  A vertical edge is a pair (a, b).  A cell is one or
two vertical edges; a 2-cell must satisfy the disjoint vertex condition (no
shared endpoint on either side).  A subpartition is an ordered, pairwise
edge-disjoint collection of cells together with its covered-edge set and the
frontier indices i_p / j_p (highest A- and B-index in use).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

Edge = tuple[int, int]
Cell = tuple[Edge, ...]  # length 1 or 2, 2-cells sorted by A-index


class SearchError(Exception):
    """Base class for all structured errors raised by this package."""


class SharedVertex(SearchError):
    """Two edges of a would-be cell share an A- or B-vertex."""


class DuplicateEdge(SearchError):
    """The two edges of a would-be 2-cell are identical."""


class EdgeOverlap(SearchError):
    """A cell reuses a vertical edge already covered by the subpartition."""


class SecondOneCell(SearchError):
    """A second 1-cell, or a 1-cell under even parity."""


class IndexOutOfRange(SearchError):
    """A vertex index outside [1, m] x [1, n] (or a slot beyond it)."""


class ConflictPresent(SearchError):
    """Operation requires a conflict-free orientation, but one is recorded."""


class TooLarge(SearchError):
    """Brute-force guard tripped; the request would be infeasible."""


class PartialReport(SearchError):
    """A budget-truncated report was used where a complete one is required."""


class Mismatch(SearchError):
    """Search output and brute-force ground truth disagree."""


class Parity(Enum):
    EVEN = "even"  # every cell is a 2-cell
    ODD = "odd"    # exactly one 1-cell permitted

    def __str__(self) -> str:
        return self.value


def _check_edge(e: Edge, m: Optional[int], n: Optional[int]) -> None:
    a, b = e
    if not (isinstance(a, int) and isinstance(b, int)) or a < 1 or b < 1:
        raise IndexOutOfRange(f"edge {e!r}: indices must be integers >= 1")
    if m is not None and a > m:
        raise IndexOutOfRange(f"edge {e!r}: A-index exceeds m={m}")
    if n is not None and b > n:
        raise IndexOutOfRange(f"edge {e!r}: B-index exceeds n={n}")


def make_cell(e1: Edge, e2: Optional[Edge] = None,
              m: Optional[int] = None, n: Optional[int] = None) -> Cell:
    """Build a normalized 1- or 2-cell.

    2-cells are stored with the smaller A-index first.  Raises SharedVertex if
    the edges share a vertex, DuplicateEdge if they are equal.
    """
    e1 = (int(e1[0]), int(e1[1]))
    _check_edge(e1, m, n)
    if e2 is None:
        return (e1,)
    e2 = (int(e2[0]), int(e2[1]))
    _check_edge(e2, m, n)
    if e1 == e2:
        raise DuplicateEdge(f"cell edges are identical: {e1}")
    if e1[0] == e2[0] or e1[1] == e2[1]:
        raise SharedVertex(f"edges {e1} and {e2} share a vertex")
    return (e1, e2) if e1[0] < e2[0] else (e2, e1)


@dataclass(frozen=True)
class Subpartition:
    """Immutable ordered collection of pairwise edge-disjoint cells.

    `covered` is a dense bitmask over A x B (bit (a-1)*n + (b-1)); m*n stays
    small in every target run, so membership tests are O(1) int ops.
    """

    m: int
    n: int
    parity: Parity
    cells: tuple[Cell, ...]
    covered: int
    i_p: int
    j_p: int
    one_cells: int

    def __len__(self) -> int:
        return len(self.cells)

    def edge_bit(self, e: Edge) -> int:
        return 1 << ((e[0] - 1) * self.n + (e[1] - 1))

    def covers(self, e: Edge) -> bool:
        return bool(self.covered & self.edge_bit(e))

    def covered_edges(self) -> set[Edge]:
        return {e for cell in self.cells for e in cell}

    def sorted_cells(self) -> tuple[Cell, ...]:
        """Insertion order is meaningful to the search; this is the sorted
        view used for hashing and duplicate detection."""
        return tuple(sorted(self.cells))

    def smallest_uncovered(self) -> Optional[Edge]:
        """Lexicographically smallest uncovered vertical edge, None if full."""
        full = (1 << (self.m * self.n)) - 1
        free = ~self.covered & full
        if free == 0:
            return None
        bit = (free & -free).bit_length() - 1
        return (bit // self.n + 1, bit % self.n + 1)


def empty_subpartition(m: int, n: int, parity: Parity = Parity.EVEN) -> Subpartition:
    if m < 1 or n < 1:
        raise IndexOutOfRange(f"m={m}, n={n}: both sides must be non-empty")
    return Subpartition(m, n, parity, (), 0, 0, 0, 0)


def one_cell_root(m: int, n: int) -> Subpartition:
    """Root for odd-parity searches: the single 1-cell {(1,1)}."""
    return extend(empty_subpartition(m, n, Parity.ODD), make_cell((1, 1)))


def extend(p: Subpartition, cell: Cell) -> Subpartition:
    """Return p with `cell` appended; p itself is never mutated."""
    for e in cell:
        _check_edge(e, p.m, p.n)
    if len(cell) == 1:
        if p.parity is not Parity.ODD:
            raise SecondOneCell("1-cells are only permitted under odd parity")
        if p.one_cells:
            raise SecondOneCell("subpartition already contains a 1-cell")
    mask = 0
    for e in cell:
        mask |= p.edge_bit(e)
    if p.covered & mask:
        overlap = [e for e in cell if p.covers(e)]
        raise EdgeOverlap(f"edges already covered: {overlap}")
    return Subpartition(
        p.m, p.n, p.parity,
        p.cells + (cell,),
        p.covered | mask,
        max(p.i_p, *(e[0] for e in cell)),
        max(p.j_p, *(e[1] for e in cell)),
        p.one_cells + (len(cell) == 1),
    )


def from_cells(m: int, n: int, parity: Parity, cells) -> Subpartition:
    """Build a subpartition by extending from empty; validates everything."""
    p = empty_subpartition(m, n, parity)
    for cell in cells:
        edges = list(cell)
        p = extend(p, make_cell(*edges, m=m, n=n) if len(edges) == 2
                   else make_cell(edges[0], m=m, n=n))
    return p


def is_full_partition(p: Subpartition, m: int, n: int) -> bool:
    """True iff p covers all of A x B with the parity pattern that m*n allows:
    m*n even -> mn/2 2-cells; m*n odd -> one 1-cell plus (mn-1)/2 2-cells."""
    if p.m != m or p.n != n:
        return False
    if p.covered != (1 << (m * n)) - 1:
        return False
    two = sum(1 for c in p.cells if len(c) == 2)
    one = sum(1 for c in p.cells if len(c) == 1)
    if m * n % 2 == 0:
        return one == 0 and two == m * n // 2
    return one == 1 and two == (m * n - 1) // 2


def count_two_cells(m: int, n: int) -> int:
    """Number of 2-cells in A x B: 2 * C(m,2) * C(n,2)."""
    return 2 * math.comb(m, 2) * math.comb(n, 2)


# -- canonical textual forms (used in JSONL records and test fixtures) --------

def format_cell(cell: Cell) -> str:
    return "{" + ",".join(f"({a},{b})" for a, b in cell) + "}"


def format_subpartition(p: Subpartition) -> str:
    return "[" + ";".join(format_cell(c) for c in p.cells) + "]"


_EDGE_RE = re.compile(r"\((\d+),(\d+)\)")


def parse_cell(text: str) -> Cell:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"malformed cell: {text!r}")
    edges = [(int(a), int(b)) for a, b in _EDGE_RE.findall(text)]
    if len(edges) == 1:
        return make_cell(edges[0])
    if len(edges) == 2:
        return make_cell(edges[0], edges[1])
    raise ValueError(f"cell must have 1 or 2 edges: {text!r}")


def parse_subpartition(text: str, m: int, n: int,
                       parity: Parity = Parity.EVEN) -> Subpartition:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"malformed subpartition: {text!r}")
    inner = text[1:-1]
    cells = [parse_cell(part) for part in inner.split(";") if part.strip()]
    p = empty_subpartition(m, n, parity)
    for cell in cells:
        p = extend(p, cell)
    return p


def iter_all_two_cells(m: int, n: int) -> Iterator[Cell]:
    """All 2-cells of A x B in lexicographic order."""
    for a1 in range(1, m + 1):
        for a2 in range(a1 + 1, m + 1):
            for b1 in range(1, n + 1):
                for b2 in range(1, n + 1):
                    if b1 != b2:
                        yield ((a1, b1), (a2, b2))
