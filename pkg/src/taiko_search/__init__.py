"""Exhaustive, symmetry-reduced search over paired-edge partitions of complete
bipartite graphs.

A partition of the edge set of K_{m,n} into 1- and 2-cells (pairs of
vertex-disjoint edges) induces a colored, oriented "taiko" graph and a
"middle link" graph.  A full partition whose taiko passes the four
combinatorial conditions (orientability, no-fold, no-pattern, triple girth)
would yield a counterexample to Kaplansky's zero-divisor conjecture (mn even)
or unit conjecture (mn odd) over F_2.  This package enumerates all candidate
substructures up to isomorphism with left-alignment symmetry reduction and
prunes with the decreasing conditions.
"""

__version__ = "0.1.0"

from .core import (
    Cell,
    Parity,
    Subpartition,
    count_two_cells,
    extend,
    is_full_partition,
    make_cell,
)
from .horizontal import OrientedSkeleton, orient
from .midlink import INFINITE, build_middle_link, girth, girth_at_least
from .search import SearchConfig, run_search, validate

__all__ = [
    "Cell",
    "Parity",
    "Subpartition",
    "count_two_cells",
    "extend",
    "is_full_partition",
    "make_cell",
    "OrientedSkeleton",
    "orient",
    "INFINITE",
    "build_middle_link",
    "girth",
    "girth_at_least",
    "SearchConfig",
    "run_search",
    "validate",
    "__version__",
]
