"""Depth-first enumeration over the search DAG with condition pruning.

Nodes are valid left-aligned subpartitions; the root is the empty
subpartition (or the single 1-cell for odd parity).  Children are generated
by the aligned-candidate procedure and kept only while they pass the
validity pipeline.  All four conditions are decreasing, so a failure prunes
the entire subtree.

Condition order is T1 (orientation), T2 (no-fold), T4 (triple girth), then
T3 (no-pattern) when explicitly enabled: a repeated pattern forces half-girth
at most 2, so any girth requirement of 3 or more subsumes it.  Girth checks
in the hot path are threshold queries capped at the largest configured bound;
full exact girths are computed only for completed partitions, witnesses, and
full-verbosity event records.
"""

from __future__ import annotations

import dataclasses
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import core
from .align import aligned_candidates, candidate_bound
from .core import (
    Mismatch,
    Parity,
    PartialReport,
    Subpartition,
    empty_subpartition,
    extend,
    format_subpartition,
    from_cells,
    is_full_partition,
    one_cell_root,
)
from .horizontal import OrientedSkeleton, find_fold, find_repeated_pattern, orient
from .midlink import (
    INFINITE,
    build_middle_link,
    girth,
    girth_text,
    half_girth,
    l1_adjacency_sparse,
    l_ab_adjacency,
    shortest_cycle,
    shortest_cycle_via,
    triple_girth_status,
    vertex_probe_edges,
)

CONDITIONS = ("T1", "T2", "T3", "T4")
DEFAULT_PAIRS = ((6, 3), (4, 4), (3, 6))


@dataclass(frozen=True)
class SearchConfig:
    m: int
    n: int
    parity: str = "auto"                 # even | odd | auto (derive from m*n)
    mode: str = "full"                   # full | census
    max_cells: Optional[int] = None      # census depth
    girth_pairs: tuple = DEFAULT_PAIRS   # (p, q) alternatives for T4
    theorem1_cap: bool = True            # (3,6) statically false at >= 3 cells
    smallest_edge: bool = True           # new cell must contain e*
    check_t3: bool = False               # redundant given T4; cross-check mode
    t4_mode: str = "prune"               # prune | record (pairs become bounds)
    stop_at_pair: Optional[tuple] = None  # early stop on exact completed pair
    max_nodes: Optional[int] = None      # budget on expanded nodes
    workers: int = 1
    seed_root: str = "auto"              # auto | empty | one-cell
    dedupe_nodes: bool = False           # hash-cons sorted cell lists

    def resolved_parity(self) -> Parity:
        if self.parity == "even":
            return Parity.EVEN
        if self.parity == "odd":
            return Parity.ODD
        # auto: full partitions take the parity m*n dictates; substructure
        # censuses count 2-cell structures unless odd is requested
        if self.mode == "census":
            return Parity.EVEN
        return Parity.ODD if (self.m * self.n) % 2 else Parity.EVEN

    def resolved_root(self) -> str:
        if self.seed_root != "auto":
            return self.seed_root
        return "one-cell" if self.resolved_parity() is Parity.ODD else "empty"

    def check(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")
        if self.parity not in ("even", "odd", "auto"):
            raise ValueError(f"bad parity {self.parity!r}")
        if self.mode not in ("full", "census"):
            raise ValueError(f"bad mode {self.mode!r}")
        if self.mode == "census" and not self.max_cells:
            raise ValueError("census mode requires max_cells")
        if self.t4_mode not in ("prune", "record"):
            raise ValueError(f"bad t4_mode {self.t4_mode!r}")
        if self.t4_mode == "prune" and not self.girth_pairs:
            raise ValueError("girth_pairs must be non-empty when T4 prunes")
        parity = self.resolved_parity()
        if self.mode == "full" and parity is Parity.ODD and (self.m * self.n) % 2 == 0:
            raise ValueError("odd parity requires odd m*n in full-partition mode")
        if self.resolved_root() == "one-cell" and parity is not Parity.ODD:
            raise ValueError("a one-cell root requires odd parity")
        if self.mode == "full" and parity is Parity.ODD and self.resolved_root() != "one-cell":
            raise ValueError("odd full-partition search must seed the 1-cell root")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for pq in self.girth_pairs:
            p, q = pq
            if p < 3 or q < 2:
                raise ValueError(f"girth pair {pq} out of range")

    def to_json(self) -> dict:
        return {
            "m": self.m, "n": self.n, "parity": self.parity, "mode": self.mode,
            "max_cells": self.max_cells,
            "girth_pairs": [list(pq) for pq in self.girth_pairs],
            "theorem1_cap": self.theorem1_cap,
            "smallest_edge": self.smallest_edge, "check_t3": self.check_t3,
            "t4_mode": self.t4_mode,
            "stop_at_pair": list(self.stop_at_pair) if self.stop_at_pair else None,
            "max_nodes": self.max_nodes, "workers": self.workers,
            "seed_root": self.seed_root, "dedupe_nodes": self.dedupe_nodes,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SearchConfig":
        return cls(
            m=data["m"], n=data["n"], parity=data["parity"], mode=data["mode"],
            max_cells=data["max_cells"],
            girth_pairs=tuple(tuple(pq) for pq in data["girth_pairs"]),
            theorem1_cap=data["theorem1_cap"],
            smallest_edge=data["smallest_edge"], check_t3=data["check_t3"],
            t4_mode=data["t4_mode"],
            stop_at_pair=tuple(data["stop_at_pair"]) if data.get("stop_at_pair") else None,
            max_nodes=data["max_nodes"], workers=data["workers"],
            seed_root=data["seed_root"], dedupe_nodes=data["dedupe_nodes"],
        )


@dataclass(frozen=True)
class ValidityVerdict:
    status: str                      # "valid" | "fails"
    condition: Optional[str] = None  # failing condition, first failure wins
    witness: Optional[dict] = None   # checkable evidence

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.condition:
            out["condition"] = self.condition
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _active_pairs(cfg: SearchConfig, two_cells: int) -> tuple:
    if cfg.theorem1_cap and two_cells >= 3:
        return tuple(pq for pq in cfg.girth_pairs if pq != (3, 6))
    return cfg.girth_pairs


def _pair_status_exact(p: Subpartition, cfg: SearchConfig,
                       sk: Optional[OrientedSkeleton] = None) -> tuple:
    """Per-configured-pair satisfaction, computed from scratch with capped
    girth queries.  Requires a conflict-free structure."""
    if not cfg.girth_pairs:
        return ()
    sk = sk or OrientedSkeleton(p)
    two = sum(1 for c in p.cells if len(c) == 2)
    active = set(_active_pairs(cfg, two))
    p_cap = max(pp for pp, _ in cfg.girth_pairs)
    q_cap = max(qq for _, qq in cfg.girth_pairs)
    g_ab = girth(l_ab_adjacency(sk), cap=p_cap) if p_cap > 3 else INFINITE
    g_l1 = girth(l1_adjacency_sparse(sk), cap=2 * q_cap)
    hg = INFINITE if g_l1 == INFINITE else g_l1 // 2
    return tuple(pq in active and g_ab >= pq[0] and hg >= pq[1]
                 for pq in cfg.girth_pairs)


def _fast_check(p: Subpartition, cfg: SearchConfig) -> Optional[str]:
    """First failing condition name, or None.  Girth via capped queries."""
    sk = OrientedSkeleton(p)
    if sk.conflict is not None:
        return "T1"
    if find_fold(sk) is not None:
        return "T2"
    if cfg.girth_pairs and not any(_pair_status_exact(p, cfg, sk)):
        return "T4"
    if cfg.check_t3 and find_repeated_pattern(sk) is not None:
        return "T3"
    return None


def _l1_probes(sk: OrientedSkeleton, l1_adj) -> list:
    """Probe edges covering everything the newest cell changed in L_1."""
    probes = []
    for eid in sk.last_new_edges:
        side, u, v = sk.edges[eid]
        s, t = (u, v) if sk.forward[eid] else (v, u)
        c = sk.color[eid]
        probes.append(((side, s), ("M", c, "out")))
        probes.append(((side, t), ("M", c, "in")))
    if sk.last_merged:
        c = sk.color[sk.last_edge_ids[0]]
        probes.extend(vertex_probe_edges(l1_adj, ("M", c, "out")))
        probes.extend(vertex_probe_edges(l1_adj, ("M", c, "in")))
    return probes


def _overlay_cycle_via(adj, extras, probes, cap: int) -> float:
    """shortest_cycle_via over `adj` augmented with the `extras` adjacency
    overlay, without materializing the combined graph."""
    from collections import deque

    best: float = INFINITE
    for x, y in probes:
        limit = min(best, cap) - 2
        if limit < 1:
            continue
        dist = {x: 0}
        queue = deque([x])
        found = None
        while queue:
            u = queue.popleft()
            du = dist[u]
            if du >= limit:
                break
            for w in adj.get(u, ()):
                if u == x and w == y:
                    continue
                if w not in dist:
                    if w == y:
                        found = du + 1
                        queue.clear()
                        break
                    dist[w] = du + 1
                    queue.append(w)
            else:
                for w in extras.get(u, ()):
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


class _NodeState:
    """Everything needed to check a candidate cell against an expanded node
    without rebuilding the node's structures per candidate."""

    __slots__ = ("p", "pairs_alive", "index", "color", "fwd", "slots",
                 "lab", "l1", "n_colors", "two_cells", "patterns")

    def __init__(self, p: Subpartition, cfg: SearchConfig, pairs_alive: tuple):
        sk = OrientedSkeleton(p)
        self.p = p
        self.pairs_alive = pairs_alive
        self.index = sk._index
        self.color = sk.color
        self.fwd = sk.forward
        self.n_colors = sk.n_colors
        self.two_cells = sum(1 for c in p.cells if len(c) == 2)
        slots: dict = {}
        for eid, (side, u, v) in enumerate(sk.edges):
            s, t = (u, v) if sk.forward[eid] else (v, u)
            c = sk.color[eid]
            slots.setdefault((side, s), set()).add((c, "out"))
            slots.setdefault((side, t), set()).add((c, "in"))
        self.slots = slots
        self.lab = l_ab_adjacency(sk)
        self.l1 = l1_adjacency_sparse(sk)
        self.patterns = None
        if cfg.check_t3:
            patterns: dict = {}
            for vertex, present in slots.items():
                ordered = sorted(present)
                for i in range(len(ordered)):
                    for j in range(i + 1, len(ordered)):
                        patterns[(ordered[i], ordered[j])] = vertex
            self.patterns = patterns


def _candidate_check(state: _NodeState, cell, cfg: SearchConfig):
    """Validity of extending state.p by `cell`, against the parent state.

    Returns (failing condition or None, child pair status or None).  The
    slow merge case (the cell joins two existing color classes) falls back
    to the from-scratch step checker; everything else runs on the parent's
    tables plus bounded overlay searches.
    """
    (a1, b1), (a2, b2) = cell
    ka = ("A", a1, a2)
    kb = ("B", b1, b2) if b1 < b2 else ("B", b2, b1)
    q = 1 if b1 > b2 else 0
    ea = state.index.get(ka)
    eb = state.index.get(kb)

    if ea is not None and eb is not None:
        ca, cb = state.color[ea], state.color[eb]
        if ca == cb:
            if (state.fwd[ea] ^ state.fwd[eb]) != bool(q):
                return "T1", None
            # consistent duplicate pair: no new edges, classes, directions,
            # slots, or cycles; the child inherits everything
            status = _child_base(state, cfg)
            if cfg.girth_pairs and not any(status):
                return "T4", None
            return None, status
        # two existing classes merge: rewires the middle link; use the
        # from-scratch checker for this (comparatively rare) case
        child = extend(state.p, cell)
        return _step_check(child, cfg, state.pairs_alive)

    # at least one brand-new horizontal edge
    new_dirs = []   # (side, src, tgt, color) per new edge
    if ea is not None:
        c = state.color[ea]
        fwd_b = state.fwd[ea] ^ bool(q)
        u, v = kb[1], kb[2]
        s, t = (u, v) if fwd_b else (v, u)
        new_dirs.append(("B", s, t, c))
    elif eb is not None:
        c = state.color[eb]
        fwd_a = state.fwd[eb] ^ bool(q)
        s, t = (a1, a2) if fwd_a else (a2, a1)
        new_dirs.append(("A", s, t, c))
    else:
        c = state.n_colors
        new_dirs.append(("A", a1, a2, c))
        u, v = kb[1], kb[2]
        s, t = (u, v) if q == 0 else (v, u)
        new_dirs.append(("B", s, t, c))

    # fold: a new edge lands on a vertex already carrying its (color,
    # direction); two fresh same-class edges live on opposite sides and
    # cannot collide with each other
    for side, s, t, c in new_dirs:
        if (c, "out") in state.slots.get((side, s), ()):
            return "T2", None
        if (c, "in") in state.slots.get((side, t), ()):
            return "T2", None

    status: tuple = ()
    if cfg.girth_pairs:
        base = _child_base(state, cfg)
        if not any(base):
            return "T4", None
        p_need = max((pq[0] for pq, al in zip(cfg.girth_pairs, base) if al))
        if p_need > 3:
            probes = [((side, s), (side, t)) for side, s, t, _ in new_dirs]
            ab_new = _overlay_cycle_via(state.lab, {}, probes, p_need)
            if ab_new != INFINITE:
                base = [al and ab_new >= pq[0]
                        for al, pq in zip(base, cfg.girth_pairs)]
                if not any(base):
                    return "T4", None
        q_need = max((pq[1] for pq, al in zip(cfg.girth_pairs, base) if al))
        l1_new: float = INFINITE
        if q_need > 2:
            extras: dict = {}
            probes = []
            for side, s, t, c in new_dirs:
                for sv, mv in (((side, s), ("M", c, "out")),
                               ((side, t), ("M", c, "in"))):
                    extras.setdefault(sv, []).append(mv)
                    extras.setdefault(mv, []).append(sv)
                    probes.append((sv, mv))
            l1_new = _overlay_cycle_via(state.l1, extras, probes, 2 * q_need)
        status = tuple(al and l1_new >= 2 * pq[1]
                       for al, pq in zip(base, cfg.girth_pairs))
        if not any(status):
            return "T4", None

    if cfg.check_t3 and state.patterns is not None:
        fresh: dict = {}
        for side, s, t, c in new_dirs:
            for vertex, slot in (((side, s), (c, "out")), ((side, t), (c, "in"))):
                for other in state.slots.get(vertex, ()):
                    pattern = tuple(sorted((slot, other)))
                    hit = state.patterns.get(pattern) or fresh.get(pattern)
                    if hit is not None and hit != vertex:
                        return "T3", None
                    fresh.setdefault(pattern, vertex)
    return None, status


def _child_base(state: _NodeState, cfg: SearchConfig) -> tuple:
    """Parent pair status with the static (3,6) cap applied at child size."""
    if not cfg.girth_pairs:
        return ()
    two = state.two_cells + 1
    if cfg.theorem1_cap and two >= 3:
        return tuple(al and pq != (3, 6)
                     for al, pq in zip(state.pairs_alive, cfg.girth_pairs))
    return state.pairs_alive


def _step_check(child: Subpartition, cfg: SearchConfig,
                parent_pairs: tuple) -> tuple[Optional[str], Optional[tuple]]:
    """Validity of a one-cell extension, reusing the parent's girth status.

    Girth only decreases along a branch, and any cycle the new cell creates
    must use one of its new horizontal edges (in L_AB), or one of the new
    middle-link edges, or an edge at a middle vertex of two color classes it
    merged (in L_1).  So each pair stays alive iff it was alive at the
    parent and no short-enough new cycle shows up at those probes.
    """
    sk = OrientedSkeleton(child)
    if sk.conflict is not None:
        return "T1", None
    if find_fold(sk) is not None:
        return "T2", None
    status: tuple = ()
    if cfg.girth_pairs:
        two = sum(1 for c in child.cells if len(c) == 2)
        active = set(_active_pairs(cfg, two))
        base = [alive and pq in active
                for alive, pq in zip(parent_pairs, cfg.girth_pairs)]
        if any(base) and (sk.last_new_edges or sk.last_merged):
            p_need = max((pq[0] for pq, al in zip(cfg.girth_pairs, base) if al),
                         default=0)
            q_need = max((pq[1] for pq, al in zip(cfg.girth_pairs, base) if al),
                         default=0)
            ab_new: float = INFINITE
            if sk.last_new_edges and p_need > 3:
                probes = []
                for eid in sk.last_new_edges:
                    side, u, v = sk.edges[eid]
                    probes.append(((side, u), (side, v)))
                ab_new = shortest_cycle_via(l_ab_adjacency(sk), probes, p_need)
            l1_new: float = INFINITE
            if q_need > 2:
                # half-girth >= 2 holds in any simple bipartite middle link
                l1_adj = l1_adjacency_sparse(sk)
                l1_new = shortest_cycle_via(l1_adj, _l1_probes(sk, l1_adj),
                                            2 * q_need)
            base = [al and ab_new >= pq[0] and l1_new >= 2 * pq[1]
                    for al, pq in zip(base, cfg.girth_pairs)]
        status = tuple(base)
        if not any(status):
            return "T4", None
    if cfg.check_t3 and find_repeated_pattern(sk) is not None:
        return "T3", None
    return None, status


def validate(p: Subpartition, cfg: Optional[SearchConfig] = None) -> ValidityVerdict:
    """Full validity verdict with a checkable witness on failure.

    Checks run in order T1, T2, T4, then T3 when enabled.  The T4 witness
    carries the exact girth pair and, when finite, a shortest middle-link
    cycle.
    """
    if cfg is None:
        cfg = SearchConfig(m=p.m, n=p.n)
    sk = orient(p)
    if sk.conflict is not None:
        return ValidityVerdict("fails", "T1", sk.conflict.to_json())
    fold = find_fold(sk)
    if fold is not None:
        return ValidityVerdict("fails", "T2", fold.to_json())
    if cfg.t4_mode == "prune" and cfg.girth_pairs:
        status = triple_girth_status(p, cfg.girth_pairs, cfg.theorem1_cap)
        if not status["satisfied"]:
            witness = {
                "girth_ab": girth_text(status["girth_ab"]),
                "half_girth_l1": girth_text(status["half_girth_l1"]),
            }
            if status["half_girth_l1"] != INFINITE:
                cyc = shortest_cycle(build_middle_link(sk).adjacency)
                witness["l1_cycle"] = [_vertex_name(v) for v in cyc] if cyc else None
            return ValidityVerdict("fails", "T4", witness)
    if cfg.check_t3:
        pattern = find_repeated_pattern(sk)
        if pattern is not None:
            return ValidityVerdict("fails", "T3", pattern.to_json())
    return ValidityVerdict("valid")


def _vertex_name(v) -> str:
    if v[0] == "A":
        return f"a{v[1]}"
    if v[0] == "B":
        return f"b{v[1]}"
    return f"c{v[1]}_{v[2]}"


@dataclass
class LevelStats:
    expanded: int = 0
    valid: int = 0
    pruned: dict = field(default_factory=lambda: {c: 0 for c in CONDITIONS})

    def to_json(self) -> dict:
        return {"expanded": self.expanded, "valid": self.valid,
                "pruned_by": dict(self.pruned)}


@dataclass
class SearchReport:
    config: SearchConfig
    per_level: list
    max_height: int
    completed: list                      # textual forms, sorted
    girth_pair_census: dict              # (girth_ab, half_girth) -> count
    truncated_reason: Optional[str]      # None | "budget" | "found"
    nodes_expanded: int
    wall_time_s: float
    remaining_stack: Optional[list] = None   # cell lists, set when truncated
    completed_partitions: list = field(default_factory=list)  # Subpartitions

    @property
    def truncated(self) -> bool:
        return self.truncated_reason is not None

    def no_example(self) -> Optional[dict]:
        if self.truncated:
            return None
        return no_example_bound(self, self.config.m, self.config.n)

    def valid_counts(self) -> list:
        return [ls.valid for ls in self.per_level]

    def to_json(self, manifest: Optional[str] = None) -> dict:
        census = {
            f"{girth_text(g)},{girth_text(h)}": c
            for (g, h), c in sorted(
                self.girth_pair_census.items(),
                key=lambda kv: (kv[0][0] == INFINITE, kv[0][0],
                                kv[0][1] == INFINITE, kv[0][1]))
        }
        out = {
            "engine_version": core_version(),
            "config": self.config.to_json(),
            "per_level": [ls.to_json() for ls in self.per_level],
            "max_height": self.max_height,
            "completed": list(self.completed),
            "girth_pair_census": census,
            "no_example": self.no_example(),
            "truncated": self.truncated,
            "truncated_reason": self.truncated_reason,
            "nodes_expanded": self.nodes_expanded,
            "wall_time_s": self.wall_time_s,
        }
        if manifest is not None:
            out["manifest"] = manifest
        return out

    def checkpoint_state(self) -> dict:
        return {
            "engine_version": core_version(),
            "config": self.config.to_json(),
            "stack": self.remaining_stack or [],
            "per_level": [ls.to_json() for ls in self.per_level],
            "completed": list(self.completed),
            "girth_pair_census": [
                [girth_text(g), girth_text(h), c]
                for (g, h), c in sorted(
                    self.girth_pair_census.items(),
                    key=lambda kv: (kv[0][0] == INFINITE, kv[0][0],
                                    kv[0][1] == INFINITE, kv[0][1]))
            ],
            "nodes_expanded": self.nodes_expanded,
        }


def core_version() -> str:
    from . import __version__
    return __version__


def no_example_bound(report: SearchReport, m: int, n: int) -> dict:
    """Exclusion rules from the exploration tree's maximum height h: a branch
    of height h touches at most 2h indices per side, so 2h < min(m, n) rules
    out every size (m', n') with m' >= m, n' >= n, and 2h < n rules out
    (m, n') for n' >= n."""
    if report.truncated:
        raise PartialReport("no-example criterion needs a complete search")
    h = report.max_height
    return {"rule_i": 2 * h < min(m, n), "rule_ii": 2 * h < n}


class _Engine:
    def __init__(self, cfg: SearchConfig, event_sink=None,
                 on_valid=None, on_pruned=None, verbosity: str = "stats"):
        cfg.check()
        self.cfg = cfg
        self.sink = event_sink
        self.on_valid = on_valid
        self.on_pruned = on_pruned
        self.verbosity = verbosity
        self.lock = threading.RLock()
        self.cv = threading.Condition(self.lock)
        max_level = (cfg.m * cfg.n + 1) // 2 + 1
        self.levels = [LevelStats() for _ in range(max_level + 1)]
        # stack entries are (subpartition, per-pair liveness) tuples
        self.stack: list[tuple[Subpartition, tuple]] = []
        self.active = 0
        self.nodes_expanded = 0
        self.stop_reason: Optional[str] = None
        self.completed: list[Subpartition] = []
        self.census: dict = {}
        self.seen: set = set()
        self.full_mask = (1 << (cfg.m * cfg.n)) - 1

    # -- setup ---------------------------------------------------------------

    def seed(self) -> None:
        if self.cfg.resolved_root() == "one-cell":
            root = one_cell_root(self.cfg.m, self.cfg.n)
        else:
            root = empty_subpartition(self.cfg.m, self.cfg.n,
                                      self.cfg.resolved_parity())
        self.levels[len(root)].valid += 1
        if self.on_valid:
            self.on_valid(root)
        # the root has no horizontal edges, so every pair starts satisfied
        self.stack.append((root, tuple(True for _ in self.cfg.girth_pairs)))

    def load(self, state: dict) -> None:
        parity = self.cfg.resolved_parity()
        for cells in state["stack"]:
            p = from_cells(self.cfg.m, self.cfg.n, parity, cells)
            self.stack.append((p, _pair_status_exact(p, self.cfg)))
        for level, ls in enumerate(state["per_level"]):
            self.levels[level].expanded = ls["expanded"]
            self.levels[level].valid = ls["valid"]
            self.levels[level].pruned.update(ls["pruned_by"])
        for text in state["completed"]:
            p = core.parse_subpartition(text, self.cfg.m, self.cfg.n, parity)
            self.completed.append(p)
        for g, h, c in state["girth_pair_census"]:
            key = (INFINITE if g == "inf" else int(g),
                   INFINITE if h == "inf" else int(h))
            self.census[key] = self.census.get(key, 0) + c
        self.nodes_expanded = state["nodes_expanded"]

    # -- event emission (under lock) ------------------------------------------

    def emit(self, record: dict) -> None:
        if self.sink is not None:
            self.sink(record)

    def node_record(self, p: Subpartition) -> dict:
        sk = orient(p)
        g_ab = girth_text(girth(l_ab_adjacency(sk)))
        hg = girth_text(half_girth(build_middle_link(sk).adjacency))
        return {
            "type": "node",
            "level": len(p),
            "cells": format_subpartition(p),
            "verdict": "valid",
            "girth_ab": g_ab,
            "half_girth_l1": hg,
        }

    # -- node processing (pure part runs outside the lock) --------------------

    def process(self, entry):
        """Expand one node; returns (children, record, completion, census_pair)."""
        p, pairs_alive = entry
        cfg = self.cfg
        level = len(p)
        record = self.node_record(p) if self.verbosity == "full" else None
        if p.covered == self.full_mask and is_full_partition(p, cfg.m, cfg.n):
            self._check_completion(p)
            pair = self._exact_pair(p)
            return [], record, p, pair
        if cfg.mode == "census" and cfg.max_cells is not None and level >= cfg.max_cells:
            return [], record, None, None
        cands = aligned_candidates(p, cfg.smallest_edge)
        assert len(cands) <= candidate_bound(p), "aligned candidate bound violated"
        state = _NodeState(p, cfg, pairs_alive)
        children = []
        pruned = []
        for cand in cands:
            cond, status = _candidate_check(state, cand, cfg)
            if cond is None:
                children.append((extend(p, cand), status))
            else:
                if self.on_pruned is not None:
                    self.on_pruned(extend(p, cand), cond)
                pruned.append(cond)
        return children, record, None, pruned

    def _check_completion(self, p: Subpartition) -> None:
        # completed partitions re-validate from scratch, no shared caches
        verdict = validate(p, self.cfg)
        if not verdict.is_valid:
            raise Mismatch(
                f"completed partition fails re-validation "
                f"({verdict.condition}): {format_subpartition(p)}")

    def _exact_pair(self, p: Subpartition):
        sk = orient(p)
        g_ab = girth(l_ab_adjacency(sk))
        hg = half_girth(build_middle_link(sk).adjacency)
        return (g_ab, hg)

    # -- main loops ------------------------------------------------------------

    def run_single(self) -> None:
        cfg = self.cfg
        while self.stack and self.stop_reason is None:
            if cfg.max_nodes is not None and self.nodes_expanded >= cfg.max_nodes:
                self.stop_reason = "budget"
                break
            entry = self.stack.pop()
            self.nodes_expanded += 1
            self.levels[len(entry[0])].expanded += 1
            children, record, completion, extra = self.process(entry)
            if record is not None:
                self.emit(record)
            if completion is not None:
                self._register_completion(completion, extra)
                continue
            if extra:
                child_level = len(entry[0]) + 1
                for cond in extra:
                    self.levels[child_level].pruned[cond] += 1
            self._push_children(children)

    def run_parallel(self) -> None:
        threads = [threading.Thread(target=self._worker, name=f"search-{i}")
                   for i in range(self.cfg.workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    def _worker(self) -> None:
        cfg = self.cfg
        while True:
            with self.cv:
                while not self.stack and self.active > 0 and self.stop_reason is None:
                    self.cv.wait()
                if self.stop_reason is not None or (not self.stack and self.active == 0):
                    self.cv.notify_all()
                    return
                if cfg.max_nodes is not None and self.nodes_expanded >= cfg.max_nodes:
                    self.stop_reason = "budget"
                    self.cv.notify_all()
                    return
                entry = self.stack.pop()
                self.active += 1
                self.nodes_expanded += 1
                self.levels[len(entry[0])].expanded += 1
            try:
                children, record, completion, extra = self.process(entry)
            except BaseException:
                with self.cv:
                    self.active -= 1
                    self.stop_reason = "error"
                    self.cv.notify_all()
                raise
            with self.cv:
                if record is not None:
                    self.emit(record)
                if completion is not None:
                    self._register_completion(completion, extra)
                else:
                    if extra:
                        child_level = len(entry[0]) + 1
                        for cond in extra:
                            self.levels[child_level].pruned[cond] += 1
                    self._push_children(children)
                self.active -= 1
                self.cv.notify_all()

    def _push_children(self, children: list) -> None:
        for child, _ in children:
            self.levels[len(child)].valid += 1
            if self.on_valid:
                self.on_valid(child)
        if self.cfg.dedupe_nodes:
            fresh = []
            for child, status in children:
                key = child.sorted_cells()
                if key not in self.seen:
                    self.seen.add(key)
                    fresh.append((child, status))
            children = fresh
        for entry in reversed(children):
            self.stack.append(entry)

    def _register_completion(self, p: Subpartition, pair) -> None:
        self.completed.append(p)
        self.census[pair] = self.census.get(pair, 0) + 1
        if self.cfg.stop_at_pair is not None and pair == tuple(self.cfg.stop_at_pair):
            self.stop_reason = "found"

    # -- reporting --------------------------------------------------------------

    def report(self, wall: float) -> SearchReport:
        top = max((i for i, ls in enumerate(self.levels)
                   if ls.valid or ls.expanded or any(ls.pruned.values())),
                  default=0)
        completed_sorted = sorted(self.completed,
                                  key=lambda p: p.sorted_cells())
        rep = SearchReport(
            config=self.cfg,
            per_level=self.levels[:top + 1],
            max_height=max((i for i, ls in enumerate(self.levels) if ls.valid),
                           default=0),
            completed=[format_subpartition(p) for p in completed_sorted],
            girth_pair_census=dict(self.census),
            truncated_reason=self.stop_reason,
            nodes_expanded=self.nodes_expanded,
            wall_time_s=wall,
            remaining_stack=(
                [[list(map(list, cell)) for cell in p.cells]
                 for p, _ in self.stack]
                if self.stop_reason is not None else None),
            completed_partitions=completed_sorted,
        )
        # truncated runs emit no summaries so a later resume can append its
        # node records and close with the cumulative summaries
        if self.sink is not None and self.stop_reason is None:
            for level, ls in enumerate(rep.per_level):
                self.emit({"type": "level_summary", "level": level,
                           **ls.to_json()})
        return rep


def run_search(cfg: SearchConfig, event_sink: Optional[Callable[[dict], None]] = None,
               verbosity: str = "stats",
               on_valid=None, on_pruned=None,
               resume_state: Optional[dict] = None) -> SearchReport:
    """Run the depth-first enumeration and return a SearchReport.

    Single-worker traversal is deterministic: candidates in lexicographic
    order on a LIFO stack.  Multi-worker runs visit the same node multiset
    and produce identical aggregate counts; event order is then unspecified.
    """
    t0 = time.perf_counter()
    engine = _Engine(cfg, event_sink, on_valid, on_pruned, verbosity)
    if resume_state is not None:
        engine.load(resume_state)
    else:
        engine.seed()
    if cfg.workers == 1:
        engine.run_single()
    else:
        engine.run_parallel()
    if engine.stop_reason == "error":
        raise Mismatch("a search worker failed")
    return engine.report(time.perf_counter() - t0)


def census_girth_pairs(cfg: SearchConfig,
                       event_sink=None, verbosity: str = "stats") -> SearchReport:
    """Full-partition census with validity restricted to T1-T3: the triple
    girth condition is not enforced, and the exact (girth(L_AB),
    half-girth(L_1)) pair of every completed partition is recorded.

    Any configured girth pairs act as sound lower-bound pruning for
    exact-pair queries: girth only decreases along a branch, so a completed
    partition with pair exactly (p, q) has every prefix at or above (p, q).
    """
    if cfg.mode != "full":
        raise ValueError("girth-pair census runs in full-partition mode")
    cfg = dataclasses.replace(cfg, t4_mode="record", check_t3=True)
    return run_search(cfg, event_sink, verbosity)
