"""Brute-force ground truth at tiny sizes.

Everything here is deliberately independent of the fast path: orientation is
decided by trying all direction assignments, girth by edge-removal shortest
paths, and isomorphism classes by explicit relabeling.  The guards raise
TooLarge rather than quietly grinding, so factorial sweeps can never be
reached from production CLI paths by accident.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    Cell,
    Mismatch,
    Parity,
    Subpartition,
    TooLarge,
    count_two_cells,
    format_subpartition,
    from_cells,
    iter_all_two_cells,
)
from .horizontal import OrientedSkeleton, find_fold, find_repeated_pattern
from .midlink import INFINITE, build_middle_link, l_ab_adjacency
from .search import SearchConfig, run_search

CellList = tuple[Cell, ...]


# -- independent validators ----------------------------------------------------


def orientable_bruteforce(cells: CellList) -> bool:
    """Try every direction assignment on the horizontal edges."""
    keys: list = []
    index: dict = {}
    constraints = []
    for cell in cells:
        if len(cell) != 2:
            continue
        (a1, b1), (a2, b2) = cell
        ka = ("A", a1, a2)
        kb = ("B", min(b1, b2), max(b1, b2))
        for k in (ka, kb):
            if k not in index:
                index[k] = len(keys)
                keys.append(k)
        constraints.append((index[ka], index[kb], 1 if b1 > b2 else 0))
    if len(keys) > 20:
        raise TooLarge(f"{len(keys)} horizontal edges is beyond the 2^20 sweep guard")
    for bits in range(1 << len(keys)):
        if all(((bits >> a) ^ (bits >> b)) & 1 == parity
               for a, b, parity in constraints):
            return True
    return len(keys) == 0


def girth_naive(adjacency: dict) -> float:
    """Exact girth by removing each edge and finding the shortest detour."""
    from collections import deque

    best = INFINITE
    for u in adjacency:
        for w in adjacency[u]:
            if w < u:
                continue
            dist = {u: 0}
            queue = deque([u])
            while queue:
                x = queue.popleft()
                for y in adjacency[x]:
                    if x == u and y == w:
                        continue
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        queue.append(y)
            if w in dist:
                best = min(best, dist[w] + 1)
    return best


def valid_bruteforce(cells: CellList,
                     conditions: Iterable[str] = ("T1", "T2", "T3", "T4"),
                     girth_pairs=((6, 3), (4, 4), (3, 6)),
                     theorem1_cap: bool = True,
                     greedy: bool = False) -> bool:
    """Validity under the independent validators only.

    `greedy` additionally requires the cells to admit the forced cover order
    in which every cell contains the currently forced uncovered edge (the
    condition the smallest-edge search mode imposes); it is checked on the
    labels as given, so a set may fail here while a relabeled copy passes.
    """
    conditions = set(conditions)
    if greedy and not is_greedy_cover(cells):
        return False
    if "T1" in conditions and not orientable_bruteforce(cells):
        return False
    m = max((e[0] for c in cells for e in c), default=1)
    n = max((e[1] for c in cells for e in c), default=1)
    parity = Parity.EVEN if all(len(c) == 2 for c in cells) else Parity.ODD
    p = from_cells(m, n, parity, cells)
    sk = OrientedSkeleton(p)
    if sk.conflict is not None:
        # only reachable when T1 was not requested
        return "T1" not in conditions and "T2" not in conditions \
            and "T3" not in conditions and "T4" not in conditions
    if "T2" in conditions and find_fold(sk) is not None:
        return False
    if "T3" in conditions and find_repeated_pattern(sk) is not None:
        return False
    if "T4" in conditions:
        g_ab = girth_naive(l_ab_adjacency(sk))
        g1 = girth_naive(build_middle_link(sk).adjacency)
        hg = INFINITE if g1 == INFINITE else g1 // 2
        two = sum(1 for c in cells if len(c) == 2)
        pairs = girth_pairs
        if theorem1_cap and two >= 3:
            pairs = tuple(pq for pq in pairs if pq != (3, 6))
        if not any(g_ab >= pp and hg >= qq for pp, qq in pairs):
            return False
    return True


# -- the forced cover order ------------------------------------------------------


def forced_edge(cells: CellList, m: int, n: int) -> Optional[tuple[int, int]]:
    """The uncovered edge the next cell must contain in smallest-edge mode.

    Edges between already-used vertices queue up in order of discovery (new
    vertices contribute their edges in lexicographic batches); the front of
    the queue is forced.  When the queue is empty, the lexicographically
    smallest uncovered edge of the grid is forced instead.
    """
    covered = {e for c in cells for e in c}
    used_a: list[int] = []
    used_b: list[int] = []
    queue: list[tuple[int, int]] = []
    for cell in cells:
        new_a = sorted({a for a, _ in cell} - set(used_a))
        new_b = sorted({b for _, b in cell} - set(used_b))
        batch = []
        for a in new_a:
            batch.extend((a, b) for b in used_b)
        for b in new_b:
            batch.extend((a, b) for a in used_a)
        for a in new_a:
            batch.extend((a, b) for b in new_b)
        used_a.extend(new_a)
        used_b.extend(new_b)
        queue = [e for e in queue if e not in cell] + sorted(set(batch) - covered)
        queue = [e for e in queue if e not in cell]
    for e in queue:
        if e not in covered:
            return e
    for a in range(1, m + 1):
        for b in range(1, n + 1):
            if (a, b) not in covered:
                return (a, b)
    return None


def is_greedy_cover(cells: CellList) -> bool:
    """True iff some ordering of the cells follows the forced cover order.

    The order, when it exists, is unique: at each step exactly one remaining
    cell can contain the forced edge.
    """
    m = max((e[0] for c in cells for e in c), default=1)
    n = max((e[1] for c in cells for e in c), default=1)
    remaining = list(cells)
    chosen: list[Cell] = []
    while remaining:
        e = forced_edge(tuple(chosen), m, n)
        nxt = [c for c in remaining if e in c]
        if not nxt:
            return False
        chosen.append(nxt[0])
        remaining.remove(nxt[0])
    return True


# -- canonical forms --------------------------------------------------------------


def canonical_key(cells: CellList) -> tuple:
    """Minimum serialization of the cell list over all relabelings.

    Branch and bound on which cell is serialized next and in which edge
    order; fresh indices are assigned in order of first appearance, which on
    used indices realizes the minimum over the full permutation groups.
    """
    cells = tuple(tuple(sorted(c)) for c in cells)
    if len(cells) > 8:
        raise TooLarge("canonical keys are guarded at 8 cells")
    best: Optional[tuple] = None

    def cell_image(cell, amap, bmap, na, nb):
        # (image, updated maps); fresh labels in edge order
        amap, bmap = dict(amap), dict(bmap)
        out = []
        for a, b in cell:
            if a not in amap:
                na += 1
                amap[a] = na
            if b not in bmap:
                nb += 1
                bmap[b] = nb
            out.append((amap[a], bmap[b]))
        return tuple(sorted(out)), amap, bmap, na, nb

    def rec(remaining, amap, bmap, na, nb, acc):
        nonlocal best
        if best is not None and acc > best[:len(acc)]:
            return
        if not remaining:
            if best is None or acc < best:
                best = acc
            return
        options = []
        for i, cell in enumerate(remaining):
            orders = [cell] if len(cell) == 1 else [cell, (cell[1], cell[0])]
            for order in orders:
                img, am, bm, na2, nb2 = cell_image(order, amap, bmap, na, nb)
                options.append((img, i, am, bm, na2, nb2))
        options.sort(key=lambda o: o[0])
        lead = options[0][0]
        for img, i, am, bm, na2, nb2 in options:
            if img > lead:
                break
            rec(remaining[:i] + remaining[i + 1:], am, bm, na2, nb2, acc + (img,))

    rec(cells, {}, {}, 0, 0, ())
    return best


def relabel(cells: CellList, sigma: dict, tau: dict) -> CellList:
    return tuple(tuple(sorted((sigma.get(a, a), tau.get(b, b)) for a, b in c))
                 for c in cells)


def are_isomorphic(cells1: CellList, cells2: CellList) -> bool:
    return canonical_key(cells1) == canonical_key(cells2)


@dataclass
class IsoClasses:
    classes: dict = field(default_factory=dict)  # key -> [cell lists]

    def add(self, cells: CellList) -> tuple:
        key = canonical_key(cells)
        self.classes.setdefault(key, []).append(cells)
        return key

    def counts(self) -> dict:
        return {key: len(v) for key, v in self.classes.items()}

    def representatives(self) -> list:
        return [v[0] for v in self.classes.values()]

    def __len__(self) -> int:
        return len(self.classes)


def iso_classes(items: Iterable[CellList]) -> IsoClasses:
    """Bucket cell lists by canonical key."""
    out = IsoClasses()
    for cells in items:
        out.add(cells)
    return out


# -- exhaustive enumeration --------------------------------------------------------


def enumerate_all(m: int, n: int, k: int,
                  conditions: Iterable[str] = ("T1", "T2", "T3", "T4"),
                  greedy: bool = False,
                  guard: bool = True) -> list[CellList]:
    """All k-cell subpartitions (2-cells, every labeling, no alignment)
    passing the given conditions; with `greedy`, only those admitting the
    forced cover order.

    The conditions are decreasing, so prefix pruning loses nothing.  The
    greedy variant recurses directly on the forced edge and stays feasible
    at (6,6); the unrestricted variant sweeps cell combinations and is
    guarded to genuinely tiny sizes.
    """
    conditions = tuple(conditions)
    if guard and not greedy:
        if count_two_cells(m, n) > 80 or k > 4:
            raise TooLarge(
                f"unrestricted enumeration at ({m},{n}) depth {k}; "
                "pass greedy=True or guard=False")
    if guard and greedy and (m > 9 or n > 9 or k > 6):
        raise TooLarge(f"greedy enumeration guard tripped at ({m},{n}) depth {k}")

    out: list[CellList] = []
    all_cells = list(iter_all_two_cells(m, n))

    def disjoint(cells: CellList, cell: Cell) -> bool:
        cov = {e for c in cells for e in c}
        return not any(e in cov for e in cell)

    if greedy:
        def rec(cells: CellList):
            if len(cells) == k:
                out.append(cells)
                return
            e = forced_edge(cells, m, n)
            if e is None:
                return
            a0, b0 = e
            for a1 in range(1, m + 1):
                if a1 == a0:
                    continue
                for b1 in range(1, n + 1):
                    if b1 == b0:
                        continue
                    second = (a1, b1)
                    cell = tuple(sorted((e, second)))
                    if not disjoint(cells, cell):
                        continue
                    child = cells + (cell,)
                    if valid_bruteforce(child, conditions):
                        rec(child)

        if k >= 1:
            rec(())
        return out

    def rec_all(cells: CellList, start: int):
        if len(cells) == k:
            out.append(cells)
            return
        for i in range(start, len(all_cells)):
            cell = all_cells[i]
            if not disjoint(cells, cell):
                continue
            child = cells + (cell,)
            if valid_bruteforce(child, conditions):
                rec_all(child, i + 1)

    rec_all((), 0)
    return out


# -- comparison against the search engine --------------------------------------------


@dataclass
class ComparisonReport:
    m: int
    n: int
    max_cells: int
    per_level: list = field(default_factory=list)
    ok: bool = True

    def summary(self) -> str:
        lines = [f"oracle comparison at ({self.m},{self.n}), depth {self.max_cells}:"]
        for entry in self.per_level:
            lines.append(
                "  level {level}: oracle classes {oracle_classes}, search nodes "
                "{search_nodes} in {search_classes} classes, max duplicates "
                "{max_duplicates}".format(**entry))
        lines.append("  result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)


def compare_with_search(m: int, n: int, max_cells: int,
                        smallest_edge: bool = True,
                        guard: bool = True) -> ComparisonReport:
    """Assert that search output covers every brute-force isomorphism class
    and that every search output is valid under the independent validators.

    Raises Mismatch with the offending class serialized on any violation.
    """
    cfg = SearchConfig(m=m, n=n, parity="even", mode="census",
                       max_cells=max_cells, smallest_edge=smallest_edge)
    nodes: list[Subpartition] = []
    run_search(cfg, on_valid=lambda p: nodes.append(p))
    by_level: dict[int, list[CellList]] = {}
    for p in nodes:
        if len(p) >= 1:
            by_level.setdefault(len(p), []).append(tuple(p.cells))

    report = ComparisonReport(m, n, max_cells)
    for k in range(1, max_cells + 1):
        search_cells = by_level.get(k, [])
        for cells in search_cells:
            if not valid_bruteforce(cells, greedy=smallest_edge):
                report.ok = False
                raise Mismatch(
                    f"search output fails independent validation at level {k}: "
                    f"{format_subpartition(from_cells(m, n, Parity.EVEN, cells))}")
        oracle_sets = enumerate_all(m, n, k, greedy=smallest_edge, guard=guard)
        oracle_classes = iso_classes(oracle_sets)
        search_classes = iso_classes(search_cells)
        for key, members in oracle_classes.classes.items():
            if key not in search_classes.classes:
                report.ok = False
                raise Mismatch(
                    f"oracle class at level {k} not covered by search: "
                    f"{members[0]}")
        for key, members in search_classes.classes.items():
            if key not in oracle_classes.classes:
                report.ok = False
                raise Mismatch(
                    f"search class at level {k} unknown to the oracle: "
                    f"{members[0]}")
        report.per_level.append({
            "level": k,
            "oracle_classes": len(oracle_classes),
            "search_nodes": len(search_cells),
            "search_classes": len(search_classes),
            "max_duplicates": max(search_classes.counts().values(), default=0),
        })
    return report


def random_relabelings(cells: CellList, m: int, n: int, count: int,
                       rng: Optional[random.Random] = None):
    rng = rng or random.Random(0)
    for _ in range(count):
        pa = list(range(1, m + 1))
        pb = list(range(1, n + 1))
        rng.shuffle(pa)
        rng.shuffle(pb)
        sigma = {i + 1: pa[i] for i in range(m)}
        tau = {j + 1: pb[j] for j in range(n)}
        yield relabel(cells, sigma, tau)
