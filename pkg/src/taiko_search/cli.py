"""Command-line front end: searches, censuses, verification, and exports.

Exit codes follow the convention: 0 success / search exhausted, 1 failed
verification or export, 2 counterexample candidate found (a completed valid
partition), 3 budget-truncated search, 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .core import (
    ConflictPresent,
    Mismatch,
    Parity,
    Subpartition,
    TooLarge,
    from_cells,
)
from .horizontal import find_fold, find_repeated_pattern, orient, taiko_dot
from .midlink import (
    build_middle_link,
    girth,
    girth_text,
    half_girth,
    l_ab_adjacency,
    midlink_dot,
)
from .search import SearchConfig, SearchReport, run_search

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_TRUNCATED = 3
EXIT_USAGE = 64
EXIT_IO = 74


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- fixtures -------------------------------------------------------------------

def load_fixture(path: str) -> Subpartition:
    """Fixture schema: {"m": 4, "n": 4, "parity": "even",
    "cells": [[[1,1],[2,2]], ...]} with 1-based indices."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    parity = Parity(data.get("parity", "even"))
    cells = [[tuple(edge) for edge in cell] for cell in data["cells"]]
    return from_cells(data["m"], data["n"], parity, cells)


def dump_fixture(p: Subpartition, path: str) -> None:
    data = {
        "m": p.m, "n": p.n, "parity": p.parity.value,
        "cells": [[list(edge) for edge in cell] for cell in p.cells],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


# -- manifests ------------------------------------------------------------------

def _write_manifest(path: Path, cfg: SearchConfig, argv, started, outputs) -> None:
    config_json = json.dumps(cfg.to_json(), sort_keys=True)
    manifest = {
        "engine_version": __version__,
        "command": list(argv),
        "config": cfg.to_json(),
        "input_hash": hashlib.sha256(config_json.encode()).hexdigest(),
        "started_at": started,
        "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [str(o) for o in outputs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


# -- search ----------------------------------------------------------------------

def _add_search_flags(sp: argparse.ArgumentParser, require_mn: bool = True) -> None:
    sp.add_argument("--m", type=int, required=require_mn)
    sp.add_argument("--n", type=int, required=require_mn)
    sp.add_argument("--parity", choices=["even", "odd", "auto"], default="auto")
    sp.add_argument("--mode", choices=["full", "census"], default="full")
    sp.add_argument("--max-cells", type=int, default=None)
    sp.add_argument("--girth-pairs", default="63,44,36",
                    help="comma list from {63,44,36}")
    sp.add_argument("--no-theorem1-cap", action="store_true")
    sp.add_argument("--check-t3", action="store_true")
    sp.add_argument("--smallest-edge", choices=["on", "off"], default="on")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--max-nodes", type=int, default=None)
    sp.add_argument("--out", default=None, help="JSONL event stream path")
    sp.add_argument("--verbosity", choices=["stats", "full"], default="stats")
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--resume", default=None)


_PAIR_TOKENS = {"63": (6, 3), "44": (4, 4), "36": (3, 6), "33": (3, 3)}


def _parse_pairs(text: str) -> tuple:
    pairs = []
    for token in text.split(","):
        token = token.strip()
        if token not in _PAIR_TOKENS:
            raise ValueError(f"unknown girth pair token {token!r}")
        pairs.append(_PAIR_TOKENS[token])
    if not pairs:
        raise ValueError("at least one girth pair is required")
    return tuple(pairs)


def _default_workers(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("TAIKO_SEARCH_THREADS")
    return int(env) if env else 1


def _config_from_args(args) -> SearchConfig:
    return SearchConfig(
        m=args.m, n=args.n, parity=args.parity, mode=args.mode,
        max_cells=args.max_cells,
        girth_pairs=_parse_pairs(args.girth_pairs),
        theorem1_cap=not args.no_theorem1_cap,
        smallest_edge=args.smallest_edge == "on",
        check_t3=args.check_t3,
        max_nodes=args.max_nodes,
        workers=_default_workers(args.workers),
    )


def _run_with_outputs(cfg: SearchConfig, args, argv) -> tuple[SearchReport, Optional[Path]]:
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    resume_state = None
    if args.resume:
        with open(args.resume, "r", encoding="utf-8") as fh:
            resume_state = json.load(fh)
        import dataclasses
        cfg = SearchConfig.from_json(resume_state["config"])
        # a resumed run reproduces the remaining traversal: the old budget
        # was already spent, so drop it unless a new one is given
        cfg = dataclasses.replace(cfg, max_nodes=args.max_nodes)
        if args.workers is not None:
            cfg = dataclasses.replace(cfg, workers=args.workers)

    sink = None
    events_fh = None
    report_path = manifest_path = None
    if args.out:
        out = Path(args.out)
        report_path = out.with_suffix(out.suffix + ".report.json")
        manifest_path = out.with_suffix(out.suffix + ".manifest.json")
        events_fh = open(out, "a" if args.resume else "w", encoding="utf-8")
        if not args.resume:
            events_fh.write(json.dumps(
                {"type": "run", "manifest": manifest_path.name}, sort_keys=True) + "\n")

        def sink(record: dict) -> None:
            events_fh.write(json.dumps(record, sort_keys=True) + "\n")

    try:
        report = run_search(cfg, event_sink=sink, verbosity=args.verbosity,
                            resume_state=resume_state)
    finally:
        if events_fh is not None:
            events_fh.close()

    if args.checkpoint and report.truncated_reason == "budget":
        with open(args.checkpoint, "w", encoding="utf-8") as fh:
            json.dump(report.checkpoint_state(), fh, sort_keys=True)
            fh.write("\n")
    if args.out:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_json(manifest=manifest_path.name), fh,
                      indent=1, sort_keys=True)
            fh.write("\n")
        _write_manifest(manifest_path, cfg, argv, started,
                        [args.out, report_path])
    return report, report_path


def _print_report(report: SearchReport) -> None:
    print(f"search ({report.config.m},{report.config.n}) mode={report.config.mode} "
          f"parity={report.config.resolved_parity().value}")
    for level, ls in enumerate(report.per_level):
        pruned = {c: k for c, k in ls.pruned.items() if k}
        print(f"  level {level:2d}: valid {ls.valid:6d}  expanded {ls.expanded:6d}"
              + (f"  pruned {pruned}" if pruned else ""))
    print(f"  nodes expanded: {report.nodes_expanded}")
    print(f"  max height: {report.max_height}")
    if report.girth_pair_census:
        census = {f"({girth_text(g)},{girth_text(h)})": c
                  for (g, h), c in report.girth_pair_census.items()}
        print(f"  completed girth pairs: {census}")
    print(f"  completed partitions: {len(report.completed)}")
    for text in report.completed[:10]:
        print(f"    {text}")
    if report.truncated:
        print(f"  TRUNCATED ({report.truncated_reason}); "
              "non-existence must not be concluded from this run")
    no_ex = report.no_example()
    if no_ex is not None:
        print(f"  no-example criterion: {no_ex}")
    print(f"  wall time: {report.wall_time_s:.3f}s")


def cmd_search(args, argv) -> int:
    cfg = None
    if not args.resume:
        try:
            cfg = _config_from_args(args)
            cfg.check()
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_USAGE
    try:
        report, _ = _run_with_outputs(cfg, args, argv)
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    _print_report(report)
    if report.completed:
        print("COUNTEREXAMPLE CANDIDATE(S) FOUND - completed valid partitions above")
        return EXIT_COUNTEREXAMPLE
    if report.truncated_reason == "budget":
        return EXIT_TRUNCATED
    return EXIT_OK


# -- verify -----------------------------------------------------------------------

def _verify_fixture(path: str) -> int:
    p = load_fixture(path)
    sk = orient(p)
    print(f"fixture {path}: ({p.m},{p.n}) {p.parity.value}, {len(p.cells)} cells")
    if sk.conflict is not None:
        print("  T1 orientation: FAIL")
        print(f"  conflict witness: {json.dumps(sk.conflict.to_json())}")
        return EXIT_FAIL
    print(f"  T1 orientation: ok ({sk.n_colors} color classes)")
    fold = find_fold(sk)
    print("  T2 no-fold: " + ("ok" if fold is None
                              else f"FAIL {json.dumps(fold.to_json())}"))
    pattern = find_repeated_pattern(sk)
    print("  T3 no-pattern: " + ("ok" if pattern is None
                                 else f"FAIL {json.dumps(pattern.to_json())}"))
    g_ab = girth(l_ab_adjacency(sk))
    hg = half_girth(build_middle_link(sk).adjacency)
    print(f"  girth pair (girth L_AB, half-girth L_1): "
          f"({girth_text(g_ab)},{girth_text(hg)})")
    return EXIT_OK if fold is None and pattern is None else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.fixture:
        return _verify_fixture(args.fixture)
    if args.m is None or args.n is None or args.max_cells is None:
        print("error: verify needs --fixture or --m/--n/--max-cells",
              file=sys.stderr)
        return EXIT_USAGE
    from .oracle import compare_with_search
    try:
        report = compare_with_search(args.m, args.n, args.max_cells,
                                     smallest_edge=args.smallest_edge == "on")
    except Mismatch as err:
        print(f"MISMATCH: {err}", file=sys.stderr)
        return EXIT_FAIL
    except TooLarge as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_FAIL


# -- export -----------------------------------------------------------------------

def cmd_export(args) -> int:
    p = load_fixture(args.fixture)
    try:
        if args.what == "taiko":
            text = taiko_dot(p)
        else:
            text = midlink_dot(build_middle_link(orient(p)))
    except ConflictPresent:
        sk = orient(p)
        print("error: fixture is unorientable; conflict witness:", file=sys.stderr)
        print(json.dumps(sk.conflict.to_json(), indent=1), file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- tables -----------------------------------------------------------------------

def _parse_range(text: str) -> range:
    lo, _, hi = text.partition("..")
    return range(int(lo), int(hi) + 1)


def _render_tables_figure(png_path: Path, pair: str, m_range, n_range,
                          statuses: dict) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    colors = {"GREEN": "#58c958", "RED": "#e05050", "UNKNOWN": "#d9d9d9"}
    fig, ax = plt.subplots(
        figsize=(0.55 * len(n_range) + 1.2, 0.55 * len(m_range) + 1.2))
    for i, m in enumerate(m_range):
        for j, n in enumerate(n_range):
            ax.add_patch(Rectangle((j, len(m_range) - 1 - i), 1, 1,
                                   facecolor=colors[statuses[(m, n)]],
                                   edgecolor="black", linewidth=0.4))
    ax.set_xticks([j + 0.5 for j in range(len(n_range))])
    ax.set_xticklabels([str(n) for n in n_range])
    ax.set_yticks([len(m_range) - 1 - i + 0.5 for i in range(len(m_range))])
    ax.set_yticklabels([str(m) for m in m_range])
    ax.set_xlim(0, len(n_range))
    ax.set_ylim(0, len(m_range))
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    ax.set_title(f"exact girth pair ({pair[0]},{pair[1]}) census "
                 "(green: witness, red: none, gray: budget hit)")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def cmd_tables(args, argv) -> int:
    pair = _PAIR_TOKENS[args.pair]
    m_range = _parse_range(args.m_range)
    n_range = _parse_range(args.n_range)
    out = Path(args.out) if args.out else Path(f"tables-pair{args.pair}.csv")
    witness_dir = out.parent / (out.stem + "-witnesses")
    statuses: dict = {}
    witnesses: dict = {}
    try:
        witness_dir.mkdir(parents=True, exist_ok=True)
        for m in m_range:
            for n in n_range:
                cfg = SearchConfig(
                    m=m, n=n, mode="full", girth_pairs=(pair,),
                    t4_mode="record", check_t3=True, stop_at_pair=pair,
                    max_nodes=args.budget,
                    workers=_default_workers(args.workers))
                report = run_search(cfg)
                hit = next(
                    (p for p in report.completed_partitions
                     if _exact_pair_of(p) == pair), None)
                if hit is not None:
                    statuses[(m, n)] = "GREEN"
                    wpath = witness_dir / f"pair{args.pair}-m{m}-n{n}.json"
                    dump_fixture(hit, str(wpath))
                    witnesses[(m, n)] = str(wpath)
                elif report.truncated_reason == "budget":
                    statuses[(m, n)] = "UNKNOWN"
                else:
                    statuses[(m, n)] = "RED"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("m/n," + ",".join(str(n) for n in n_range) + "\n")
            for m in m_range:
                fh.write(str(m) + "," +
                         ",".join(statuses[(m, n)] for n in n_range) + "\n")
        png = out.with_suffix(".png")
        _render_tables_figure(png, pair, m_range, n_range, statuses)
        wmap = out.with_suffix(".witnesses.json")
        with open(wmap, "w", encoding="utf-8") as fh:
            json.dump({f"{m},{n}": path for (m, n), path in witnesses.items()},
                      fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    for m in m_range:
        print(" ".join(f"({m},{n})={statuses[(m, n)]}" for n in n_range))
    print(f"wrote {out}, {png}, {wmap}")
    return EXIT_OK


def _exact_pair_of(p: Subpartition) -> tuple:
    sk = orient(p)
    return (girth(l_ab_adjacency(sk)),
            half_girth(build_middle_link(sk).adjacency))


# -- entry point --------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="taiko-search",
                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", help="run a full-partition search or census")
    _add_search_flags(sp, require_mn=False)

    vp = sub.add_parser("verify", help="compare against brute force, or "
                                       "re-validate a fixture")
    vp.add_argument("--m", type=int, default=None)
    vp.add_argument("--n", type=int, default=None)
    vp.add_argument("--max-cells", type=int, default=None)
    vp.add_argument("--smallest-edge", choices=["on", "off"], default="on")
    vp.add_argument("--fixture", default=None)

    ep = sub.add_parser("export", help="DOT export of a fixture")
    ep.add_argument("--fixture", required=True)
    ep.add_argument("--what", choices=["taiko", "midlink"], required=True)
    ep.add_argument("--format", choices=["dot"], default="dot")
    ep.add_argument("--out", default=None)

    tp = sub.add_parser("tables", help="green/red census over a size grid")
    tp.add_argument("--m-range", required=True, help="A..B inclusive")
    tp.add_argument("--n-range", required=True, help="C..D inclusive")
    tp.add_argument("--pair", choices=["33", "44"], required=True)
    tp.add_argument("--budget", type=int, default=None)
    tp.add_argument("--workers", type=int, default=None)
    tp.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "search":
        if args.resume is None and (args.m is None or args.n is None):
            parser.error("search requires --m and --n (or --resume)")
        return cmd_search(args, argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "export":
        return cmd_export(args)
    if args.command == "tables":
        return cmd_tables(args, argv)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
