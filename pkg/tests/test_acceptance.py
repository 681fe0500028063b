"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(run with `pytest tests/test_acceptance.py -v -s` to see them).

Criterion 1 carries one deliberately unguarded discrepancy: the five
depth-3 case-analysis representatives are reproduced exactly, but they span
three isomorphism classes, not five; two explicit relabelings collapse
them (see test_criterion_01_literal_iso_class_count, an expected failure,
and the decisions ledger).
"""

import json
import random
import time
from contextlib import contextmanager

import pytest

from taiko_search.align import aligned_candidates
from taiko_search.cli import main as cli_main
from taiko_search.core import extend
from taiko_search.horizontal import find_repeated_pattern, orient
from taiko_search.midlink import (
    INFINITE,
    build_middle_link,
    girth,
    girth_at_least,
    half_girth,
    l_ab_adjacency,
)
from taiko_search.oracle import canonical_key, compare_with_search, iso_classes
from taiko_search.search import SearchConfig, run_search, validate
from tests.conftest import LEVEL3_NODES, subpartition


@contextmanager
def criterion(num, title, budget_s):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {num:>2} {title}: FAIL "
              f"({time.perf_counter() - t0:.2f}s)")
        raise
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_s, \
        f"criterion {num} exceeded its {budget_s}s budget: {elapsed:.2f}s"
    print(f"\nACCEPTANCE {num:>2} {title}: PASS ({elapsed:.2f}s)")


# -- shared expensive runs ------------------------------------------------------

@pytest.fixture(scope="session")
def census66():
    nodes = []
    report = run_search(SearchConfig(m=6, n=6, mode="census", max_cells=3),
                        on_valid=nodes.append)
    return report, nodes


@pytest.fixture(scope="session")
def grid_small():
    """Criterion 4 slices: m in 2..5, n in 1..10, full searches."""
    reports = {}
    nodes = []
    t0 = time.perf_counter()
    for m in range(2, 6):
        for n in range(1, 11):
            reports[(m, n)] = run_search(
                SearchConfig(m=m, n=n, mode="full", max_nodes=10 ** 8),
                on_valid=nodes.append)
    return reports, nodes, time.perf_counter() - t0


@pytest.fixture(scope="session")
def grid_desk():
    """Criterion 5 slice: every (m, n) with m, n <= 8, full searches."""
    reports = {}
    nodes = []
    t0 = time.perf_counter()
    for m in range(1, 9):
        for n in range(1, 9):
            reports[(m, n)] = run_search(
                SearchConfig(m=m, n=n, mode="full", max_nodes=10 ** 8),
                on_valid=nodes.append)
    return reports, nodes, time.perf_counter() - t0


@pytest.fixture(scope="session")
def pruned_pool():
    """Failed candidates collected from a few full searches."""
    failed = []
    for m, n in [(5, 5), (6, 6), (7, 5)]:
        run_search(SearchConfig(m=m, n=n, mode="full"),
                   on_pruned=lambda p, cond: failed.append((p, cond)))
    return failed


# -- criteria ---------------------------------------------------------------------

def test_criterion_01_census_counts():
    with criterion(1, "census counts 1/3/5 and depth-3 representatives", 1.0):
        nodes = []
        report = run_search(SearchConfig(m=6, n=6, mode="census", max_cells=3),
                            on_valid=nodes.append)
        assert report.valid_counts() == [1, 1, 3, 5]
        level3 = [tuple(p.cells) for p in nodes if len(p) == 3]
        assert set(level3) == set(LEVEL3_NODES)
        # isomorphism coverage in both directions against the reference five
        out_keys = {canonical_key(cells) for cells in level3}
        reference_keys = {canonical_key(cells) for cells in LEVEL3_NODES}
        assert out_keys == reference_keys


@pytest.mark.xfail(
    strict=True,
    reason="the five reference depth-3 representatives span 3 isomorphism "
           "classes, not 5: swapping (a1 a2)(b1 b2)(b3 b4) maps the first "
           "onto the second, and (a1 a2)(a3 a4)(b1 b2) maps the third onto "
           "the fifth; see the decisions ledger")
def test_criterion_01_literal_iso_class_count(census66):
    _, nodes = census66
    level3 = [tuple(p.cells) for p in nodes if len(p) == 3]
    assert len(iso_classes(level3)) == 5


def test_criterion_02_orientation_failure():
    with criterion(2, "2x2 double matching fails orientation", 5.0):
        p = subpartition(2, 2, [[(1, 1), (2, 2)], [(1, 2), (2, 1)]])
        validate(p)  # warm-up
        best = min(_timed(lambda: validate(p)) for _ in range(5))
        verdict = validate(p)
        assert verdict.condition == "T1"
        assert verdict.witness["constraint_cycle"]
        assert best < 1e-3, f"validation took {best * 1e3:.3f}ms"


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_criterion_03_example26(example26):
    with criterion(3, "4x4 reference partition checks", 5.0):
        def check():
            sk = orient(example26)
            assert sk.conflict is None
            assert sk.n_colors == 4
            classes = {frozenset(c) for c in sk.color_classes()}
            assert classes == {
                frozenset({("A", 1, 2), ("A", 2, 3), ("B", 1, 2)}),
                frozenset({("A", 1, 3), ("B", 1, 4), ("B", 2, 3)}),
                frozenset({("A", 1, 4), ("A", 3, 4), ("B", 3, 4)}),
                frozenset({("A", 2, 4), ("B", 1, 3), ("B", 2, 4)}),
            }
            lab = l_ab_adjacency(sk)
            on_a = {v: ns for v, ns in lab.items() if v[0] == "A"}
            on_b = {v: ns for v, ns in lab.items() if v[0] == "B"}
            assert girth(on_a) == 3 and girth(on_b) == 3
            ml = build_middle_link(sk)
            assert ml.n_vertices == 16 and ml.n_edges == 24
            pair = (girth(lab), half_girth(ml.adjacency))
            # exact pair (3, 3): the witness for the (4,4) green cell under
            # the exact-pair reading
            assert pair == (3, 3)

        check()  # warm-up
        best = min(_timed(check) for _ in range(5))
        assert best < 1e-2, f"checks took {best * 1e3:.2f}ms"


def test_criterion_04_no_counterexamples_m_up_to_5(grid_small):
    with criterion(4, "no completions for m in 2..5, n up to 10", 60.0):
        reports, _, elapsed = grid_small
        for (m, n), report in reports.items():
            assert report.completed == [], (m, n)
            assert not report.truncated, (m, n)
        print(f"\n  [40 searches took {elapsed:.1f}s]", end="")
        assert elapsed < 60.0, f"slices took {elapsed:.1f}s"


def test_criterion_05_no_counterexamples_desk_scale(grid_desk):
    with criterion(5, "no completions for m, n up to 8", 3600.0):
        reports, _, elapsed = grid_desk
        for (m, n), report in reports.items():
            assert not report.truncated, (m, n)
            if (m, n) == (1, 1):
                # the trivial alpha*beta = 1 partition: a single 1-cell; a
                # counterexample needs m, n >= 2, so it is reported but is
                # not one
                assert report.completed == ["[{(1,1)}]"]
            else:
                assert report.completed == [], (m, n)
        print(f"\n  [64 searches took {elapsed:.1f}s]", end="")
        assert elapsed < 3600.0, f"grid took {elapsed:.1f}s"


def test_criterion_06_half_girth_bound_on_emitted_nodes(census66, grid_small,
                                                        grid_desk):
    # Every even-parity emitted node with >= 3 cells descends from one of
    # the five depth-3 chain nodes, whose half-girths are 3, 3, 3, 4, 3,
    # and girth only decreases along a branch.  Odd-parity chains rooted at
    # a 1-cell genuinely escape the bound (see the xfail below), so the
    # property is asserted over the even output.
    with criterion(6, "even emitted nodes with >= 3 cells have half-girth <= 4",
                   600.0):
        _, census_nodes = census66
        _, small_nodes, _ = grid_small
        _, desk_nodes, _ = grid_desk
        checked = 0
        for p in census_nodes + small_nodes + desk_nodes:
            if p.one_cells or sum(1 for c in p.cells if len(c) == 2) < 3:
                continue
            sk = orient(p)
            assert sk.conflict is None
            l1 = build_middle_link(sk).adjacency
            # half-girth <= 4 means a cycle of length at most 8 exists
            assert not girth_at_least(l1, 9), p.cells
            checked += 1
        assert checked > 1000


@pytest.mark.xfail(
    strict=True,
    reason="odd-parity chains violate the literal bound: the emitted node "
           "{(1,1)} + {(1,2),(2,1)} + {(2,2),(3,3)} + {(1,3),(2,4)} has "
           "three 2-cells and an acyclic middle link; see the decisions "
           "ledger")
def test_criterion_06_literal_bound_including_odd_nodes(grid_small):
    _, small_nodes, _ = grid_small
    for p in small_nodes:
        if sum(1 for c in p.cells if len(c) == 2) < 3:
            continue
        sk = orient(p)
        l1 = build_middle_link(sk).adjacency
        assert not girth_at_least(l1, 9), p.cells


def test_criterion_07_pruning_soundness(pruned_pool):
    with criterion(7, "1000 sampled failed nodes stay failed under extension",
                   600.0):
        rng = random.Random(20240801)
        sample = rng.sample(pruned_pool, min(1000, len(pruned_pool)))
        assert len(sample) == 1000
        violations = 0
        for p, _cond in sample:
            if validate(p).is_valid:
                violations += 1
                continue
            for cand in aligned_candidates(p, smallest_edge=True):
                if validate(extend(p, cand)).is_valid:
                    violations += 1
        assert violations == 0


def test_criterion_08_repeated_pattern_implies_half_girth_2(pruned_pool,
                                                            census66):
    with criterion(8, "repeated pattern forces half-girth <= 2", 600.0):
        _, census_nodes = census66
        population = [p for p, _ in pruned_pool] + census_nodes
        found = 0
        for p in population:
            sk = orient(p)
            if sk.conflict is not None:
                continue
            if find_repeated_pattern(sk) is None:
                continue
            found += 1
            l1 = build_middle_link(sk).adjacency
            g = girth(l1)
            assert g != INFINITE and g <= 4, p.cells
        assert found > 100  # the implication was exercised, not vacuous


def test_criterion_09_table_reproduction(tmp_path, capsys):
    with criterion(9, "green/red table cells with re-verifying witnesses",
                   600.0):
        t44 = tmp_path / "t44.csv"
        assert cli_main(["tables", "--m-range", "6..7", "--n-range", "4..6",
                         "--pair", "44", "--out", str(t44)]) == 0
        rows = {r.split(",")[0]: r.split(",")[1:]
                for r in t44.read_text().splitlines()[1:]}
        assert rows["6"][0:3] == ["RED", "RED", "RED"]   # (6,4) (6,5) (6,6)
        assert rows["7"][0:2] == ["RED", "RED"]          # (7,4) (7,5)

        t33 = tmp_path / "t33.csv"
        assert cli_main(["tables", "--m-range", "4..4", "--n-range", "4..5",
                         "--pair", "33", "--out", str(t33)]) == 0
        rows = t33.read_text().splitlines()
        assert rows[1].split(",")[1:] == ["GREEN", "GREEN"]
        witnesses = json.loads((tmp_path / "t33.witnesses.json").read_text())
        for key in ("4,4", "4,5"):
            assert cli_main(["verify", "--fixture", witnesses[key]]) == 0
            out = capsys.readouterr().out
            assert "girth pair (girth L_AB, half-girth L_1): (3,3)" in out
        assert (tmp_path / "t44.png").exists() and (tmp_path / "t33.png").exists()


def test_criterion_10_oracle_equivalence(capsys):
    with criterion(10, "brute-force classes covered; outputs independently valid",
                   300.0):
        for m, n in [(4, 4), (6, 6)]:
            assert cli_main(["verify", "--m", str(m), "--n", str(n),
                             "--max-cells", "3"]) == 0
            assert "result: PASS" in capsys.readouterr().out
            report = compare_with_search(m, n, 3)
            assert report.ok
            assert [e["oracle_classes"] for e in report.per_level] == [1, 3, 3]
            assert [e["search_nodes"] for e in report.per_level] == [1, 3, 5]


def test_criterion_11_determinism_and_parallel_consistency(tmp_path):
    with criterion(11, "byte-identical JSONL; worker-count independence", 300.0):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        d1.mkdir(), d2.mkdir()
        for d in (d1, d2):
            assert cli_main(["search", "--m", "6", "--n", "6", "--mode", "full",
                             "--verbosity", "full",
                             "--out", str(d / "run.jsonl")]) == 0
        assert (d1 / "run.jsonl").read_bytes() == (d2 / "run.jsonl").read_bytes()

        one = run_search(SearchConfig(m=6, n=6, mode="full", workers=1))
        four = run_search(SearchConfig(m=6, n=6, mode="full", workers=4))
        assert [ls.to_json() for ls in one.per_level] \
            == [ls.to_json() for ls in four.per_level]
        assert one.completed == four.completed
