"""Command-line front end.

Exit codes: 0 when the command succeeded or the property verified, 1 when a
checked property fails (a witness is printed), 2 for bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import complex as cx
from . import homology as hom
from .inversion import base_labelling, label_inversions
from .labelling import format_labelling, inline, parse_labelling, to_tuple
from .tree import CapacityTree, TreeError, format_tree, parse_edges, parse_tree
from .weak_order import (
    DEFAULT_BOUND,
    STRATEGIES,
    build_weak_order,
    check_confluence,
    check_confluence_restrictions,
    greedy_sort,
    potential,
)

THREADS_ENV = "CAPTREE_THREADS"


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _tree(path: str) -> CapacityTree:
    return parse_tree(_read(path))


def _edge_set(t: CapacityTree, args) -> frozenset[int]:
    if getattr(args, "first_children", False):
        return t.first_children_edges()
    if getattr(args, "half_degree", False):
        return t.half_degree_edges()
    if getattr(args, "edges", None) is not None:
        return parse_edges(t, args.edges)
    raise InputError("choose an edge set: --first-children, --half-degree or --edges")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer")
    return n


# ---------------------------------------------------------------------------
# commands


def cmd_destinations(args) -> int:
    t = _tree(args.tree)
    for lab, v in t.destinations().items():
        print(f"{lab} {t.ids[v]}")
    return 0


def cmd_invert(args) -> int:
    t = _tree(args.tree)
    a = parse_labelling(t, _read(args.labelling))
    rep = label_inversions(t, a)
    for lam, u, mu, v, rule in sorted(rep.label_pairs):
        print(f"LABELPAIR {lam}@{t.ids[u]} {mu}@{t.ids[v]} rule={rule}")
    for u, v in sorted(rep.node_pairs):
        print(f"NODEPAIR {t.ids[u]} {t.ids[v]} neighbor={'true' if (u, v) in rep.neighbor_pairs else 'false'}")
    return 0


def cmd_base_label(args) -> int:
    t = _tree(args.tree)
    comp = [t.index(x) for x in args.component.split(",")] if args.component else list(range(t.n))
    if args.labels:
        try:
            labels = [int(x) for x in args.labels.split(",")]
        except ValueError:
            raise InputError("labels must be integers") from None
    else:
        labels = list(range(1, t.total_capacity + 1))
    sys.stdout.write(format_labelling(t, base_labelling(t, comp, labels)))
    return 0


def cmd_sort(args) -> int:
    t = _tree(args.tree)
    a = parse_labelling(t, _read(args.labelling))
    f0 = potential(t, a)
    try:
        trace = greedy_sort(t, a, args.strategy, args.seed)
    except TreeError as exc:
        if "guard" in str(exc):
            print(f"VIOLATION {exc}; start {inline(t, a)}")
            return 1
        raise
    if trace.steps:
        print(trace.render(t))
    print(f"steps {trace.step_count} potential {f0} strategy {args.strategy}" + (f" seed {args.seed}" if args.seed is not None else ""))
    if to_tuple(t, trace.terminal) != t.sorted_assignment():
        print(f"VIOLATION terminal {inline(t, trace.terminal)} is not the sorted labelling")
        return 1
    return 0


def cmd_confluence(args) -> int:
    t = _tree(args.tree)
    res = check_confluence_restrictions(t, args.bound) if args.restrictions else check_confluence(t, bound=args.bound)
    if res.ok:
        print("CONFLUENT")
        return 0
    print(f"VIOLATION {res.reason}")
    for k in res.witness[:4]:
        print("  " + inline(t, dict(k)))
    return 1


def cmd_weak_order(args) -> int:
    t = _tree(args.tree)
    g = build_weak_order(t, bound=args.bound)
    dot = g.to_dot()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    cyc = g.find_cycle()
    sinks = g.sinks()
    print(f"# nodes {len(g.nodes)} arcs {g.arc_count} sinks {len(sinks)} acyclic {'yes' if cyc is None else 'no'}", file=sys.stderr)
    return 0 if cyc is None and len(sinks) == 1 else 1


def cmd_complex(args) -> int:
    t = _tree(args.tree)
    top = t.n - 2 if args.skeleton is None else args.skeleton
    for d in range(0, top + 1):
        print(f"dim {d} faces {cx.count_facets(t, d)}")
    if args.skeleton is None:
        print(f"facets {cx.count_facets(t)}")
    return 0


def cmd_shell(args) -> int:
    t = _tree(args.tree)
    if args.full:
        cert = cx.shell_full_distributable(t, seed=args.seed)
    else:
        e = _edge_set(t, args)
        if cx.count_facets(t, len(e) - 1) > args.bound:
            raise InputError("facet count exceeds --bound")
        cert = cx.shelling_order(t, e, seed=args.seed)
    sys.stdout.write(cert.render())
    if not args.verify:
        return 0
    res = cx.verify_certificate(cert)
    if res.ok:
        print("VERIFIED" + ("" if res.gm_agrees else f" (minimal new face differs at facet {res.index}: {res.face})"))
        return 0
    print(f"FAILED at facet {res.index}: {res.reason}: {res.face}")
    return 1


def cmd_homology(args) -> int:
    t = _tree(args.tree)
    s = hom.reduced_homology(t, args.skeleton, args.bound * 4)
    sys.stdout.write(s.csv() if args.format == "machine" else s.render())
    return 0


def cmd_chessboard(args) -> int:
    sys.stdout.write(format_tree(cx.chessboard_tree(args.m, args.n)))
    return 0


def cmd_validate_edges(args) -> int:
    t = _tree(args.tree)
    e = _edge_set(t, args)
    ok = t.validate_edge_set(e)
    print(f"edges {t.edge_word(e) or '-'}: {'VALID' if ok else 'INVALID'}")
    return 0 if ok else 1


def cmd_obstruction(args) -> int:
    rep = hom.sorting_obstruction_report(args.m, args.n)
    if args.format == "machine":
        sys.stdout.write(rep.homology.csv())
        print(f"obstructed,{'true' if rep.obstructed else 'false'}")
    else:
        sys.stdout.write(rep.render())
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="captree", description="Inversion functions, greedy sorting and shellings on capacity trees.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="enumeration bound (labellings; faces use 4x)")
    common.add_argument("--format", choices=("human", "machine"), default="human")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def edge_flags(sp: argparse.ArgumentParser) -> None:
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--first-children", action="store_true")
        g.add_argument("--half-degree", action="store_true")
        g.add_argument("--edges", help="comma-separated child endpoints")
        return g

    sp = add("destinations", cmd_destinations, "list label destinations")
    sp.add_argument("tree")
    sp = add("invert", cmd_invert, "inversion report of a labelling")
    sp.add_argument("tree")
    sp.add_argument("labelling")
    sp = add("base-label", cmd_base_label, "base-labelling of a component")
    sp.add_argument("tree")
    sp.add_argument("--component", help="comma-separated vertex ids (default: whole tree)")
    sp.add_argument("--labels", help="comma-separated labels (default: all)")
    sp = add("sort", cmd_sort, "greedy sorting trace")
    sp.add_argument("tree")
    sp.add_argument("labelling")
    sp.add_argument("--strategy", choices=STRATEGIES, default="first")
    sp.add_argument("--seed", type=int)
    sp = add("confluence", cmd_confluence, "check the weak order has a unique sink and no cycle")
    sp.add_argument("tree")
    sp.add_argument("--restrictions", action="store_true", help="also every subtree with every label set")
    sp = add("weak-order", cmd_weak_order, "weak order in DOT format")
    sp.add_argument("tree")
    sp.add_argument("-o", "--output")
    sp = add("complex", cmd_complex, "face counts")
    sp.add_argument("tree")
    sp.add_argument("--skeleton", type=int)
    sp = add("shell", cmd_shell, "shelling certificate")
    sp.add_argument("tree")
    g = edge_flags(sp)
    g.add_argument("--full", action="store_true", help="full complex ordered by the weak order")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--seed", type=int, help="random linear extension of the weak order")
    sp = add("homology", cmd_homology, "reduced integral homology")
    sp.add_argument("tree")
    sp.add_argument("--skeleton", type=int)
    sp = add("chessboard", cmd_chessboard, "emit the star tree of a chessboard complex")
    sp.add_argument("m", type=int)
    sp.add_argument("n", type=int)
    sp = add("validate-edges", cmd_validate_edges, "check an edge set meets the skeleton shelling hypothesis")
    sp.add_argument("tree")
    edge_flags(sp)
    sp = add("obstruction", cmd_obstruction, "homological obstruction to greedy sorting on a star")
    sp.add_argument("m", type=int)
    sp.add_argument("n", type=int)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        _threads()
        if getattr(args, "bound", 1) < 1:
            raise InputError("--bound must be positive")
        return args.fn(args)
    except (TreeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
