"""Acceptance suite.

Each criterion is a function returning ``(passed, detail)``.  The pytest
wrappers assert on the result and record a one-line summary that
``conftest.py`` prints at the end of the run; ``python3 tests/test_acceptance.py``
prints the same lines directly.
"""

from __future__ import annotations

import itertools
import random
import time
from pathlib import Path

from captree import CapacityTree, parse_tree
from captree.complex import (
    chessboard_tree,
    shell_full_distributable,
    shelling_order,
    verify_certificate,
    verify_shelling,
)
from captree.generate import unit_trees
from captree.homology import chessboard_homology, nu, sorting_obstruction_report, verify_connectivity_consequence
from captree.inversion import base_labelling, inversion_free_labellings, label_inversions, neighbor_inversions, unique_redistribution
from captree.labelling import all_labellings, parse_labelling, to_map
from captree.weak_order import (
    STRATEGIES,
    build_weak_order,
    check_confluence,
    check_confluence_restrictions,
    greedy_sort,
    potential,
)

FIXTURES = Path(__file__).parent / "fixtures"
RESULTS: dict[int, tuple[bool, str, float]] = {}


def load(name: str) -> CapacityTree:
    return parse_tree((FIXTURES / f"{name}.ctree").read_text())


def fixture_trees() -> dict[str, CapacityTree]:
    return {p.stem: parse_tree(p.read_text()) for p in sorted(FIXTURES.glob("*.ctree"))}


def small_distributable() -> dict[str, CapacityTree]:
    return {k: t for k, t in fixture_trees().items() if t.is_distributable() and t.total_capacity <= 6}


def connected_subsets(t: CapacityTree):
    for r in range(1, t.n + 1):
        for verts in itertools.combinations(range(t.n), r):
            if t.is_connected_set(verts):
                yield verts


def record(n: int, fn) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = fn()
    RESULTS[n] = (ok, detail, time.perf_counter() - start)
    return ok, detail


# ---------------------------------------------------------------------------
# 1. unit paths against the weak Bruhat order


def bruhat_covers(n: int) -> dict[tuple[int, ...], set[tuple[int, ...]]]:
    """Right weak order on one-line permutations, arcs pointing downward."""
    out = {}
    for p in itertools.permutations(range(1, n + 1)):
        down = set()
        for i in range(n - 1):
            if p[i] > p[i + 1]:
                q = list(p)
                q[i], q[i + 1] = q[i + 1], q[i]
                down.add(tuple(q))
        out[p] = down
    return out


def inv_count(p) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])


def criterion_1():
    notes = []
    for n in (3, 4, 5):
        t = CapacityTree.from_parents([None] + list(range(n - 1)), [1] * n)
        g = build_weak_order(t)
        oracle = bruhat_covers(n)
        perm = {k: tuple(next(iter(dict(k)[v])) for v in range(n)) for k in g.nodes}
        got = {perm[k]: {perm[s] for _, s in g.arcs[k]} for k in g.nodes}
        if got != oracle:
            return False, f"n={n}: weak order differs from weak Bruhat order"
        for k in g.nodes:
            p = perm[k]
            classical = {(i, i + 1) for i in range(n - 1) if p[i] > p[i + 1]}
            if set(neighbor_inversions(t, dict(k))) != classical:
                return False, f"n={n}: neighbour inversions of {p} differ"
            if any(inv_count(perm[s]) != inv_count(p) - 1 for _, s in g.arcs[k]):
                return False, f"n={n}: arc out of {p} is not graded"
        if len(g.sinks()) != 1 or len(g.sources()) != 1:
            return False, f"n={n}: extremal elements not unique"
        notes.append(f"S_{n}:{len(g.nodes)}")
    return True, " ".join(notes)


def test_criterion_1_paths_are_weak_bruhat():
    ok, detail = record(1, criterion_1)
    assert ok, detail


# ---------------------------------------------------------------------------
# 2. unique inversion-free labelling per component and label set


def criterion_2():
    cases = 0
    trees = small_distributable()
    for name, t in trees.items():
        labels = range(1, t.total_capacity + 1)
        for verts in connected_subsets(t):
            k = sum(t.caps[v] for v in verts)
            if k == 0:
                continue
            for labs in itertools.combinations(labels, k):
                free = inversion_free_labellings(t, verts, labs)
                cases += 1
                if len(free) != 1:
                    return False, f"{name}: {len(free)} inversion-free labellings on {[t.ids[v] for v in verts]} with {list(labs)}"
                got = base_labelling(t, verts, labs)
                if to_map(got) != to_map(free[0]):
                    return False, f"{name}: base_labelling disagrees on {[t.ids[v] for v in verts]} with {list(labs)}"
    return True, f"{len(trees)} trees, {cases} component label sets (worked example tree unavailable)"


def test_criterion_2_unique_inversion_free():
    ok, detail = record(2, criterion_2)
    assert ok, detail


# ---------------------------------------------------------------------------
# 3. pairwise redistribution against exhaustive splits


def criterion_3():
    cases = 0
    for name, t in small_distributable().items():
        for a in all_labellings(t):
            for u, v in itertools.combinations(range(t.n), 2):
                held = a[u] | a[v]
                options = []
                for part in itertools.combinations(sorted(held), len(a[u])):
                    b = dict(a)
                    b[u] = frozenset(part)
                    b[v] = held - b[u]
                    if not label_inversions(t, b, [u, v]).label_pairs:
                        options.append(b)
                cases += 1
                if len(options) != 1:
                    return False, f"{name}: {len(options)} inversion-free splits of {sorted(held)} on ({t.ids[u]},{t.ids[v]})"
                if options[0] != unique_redistribution(t, a, u, v):
                    return False, f"{name}: unique_redistribution disagrees on ({t.ids[u]},{t.ids[v]})"
    return True, f"{cases} labelling/pair cases"


def test_criterion_3_pairwise_redistribution():
    ok, detail = record(3, criterion_3)
    assert ok, detail


# ---------------------------------------------------------------------------
# 4. confluence and termination, including restrictions


def criterion_4():
    runs = 0
    failures = []
    for name, t in small_distributable().items():
        target = to_map(t.sorted_assignment())
        for a in all_labellings(t):
            f0 = potential(t, a)
            for strategy in STRATEGIES:
                for seed in ((0, 1, 2) if strategy == "random" else (None,)):
                    runs += 1
                    trace = greedy_sort(t, a, strategy, seed, guard=10 * f0 + 10)
                    if to_map(trace.terminal) != target:
                        return False, f"{name}: {strategy} ended away from the sorted labelling"
                    if trace.step_count > f0:
                        return False, f"{name}: {strategy} took {trace.step_count} > f = {f0} steps"
        res = check_confluence(t)
        if not res.ok:
            return False, f"{name}: {res.reason}"
        res = check_confluence_restrictions(t)
        if not res.ok:
            failures.append(f"{name}: {res.reason}")
    if failures:
        return False, f"{len(failures)} trees fail restrictions; first {failures[0]}"
    return True, f"{runs} sorting runs, all full and restricted weak orders confluent"


def test_criterion_4_confluence_and_termination():
    ok, detail = record(4, criterion_4)
    assert ok, detail


# ---------------------------------------------------------------------------
# 5. potential along cover arcs


def criterion_5():
    bad = []
    arcs = 0
    for name, t in small_distributable().items():
        g = build_weak_order(t)
        arcs += g.arc_count
        sorted_key = to_map(t.sorted_assignment())
        for k in g.nodes:
            if (potential(t, dict(k)) == 0) != (to_map(dict(k)) == sorted_key):
                return False, f"{name}: f = 0 does not single out the sorted labelling"
        v = g.potential_violations()
        if v:
            bad.append((name, len(v)))
    if bad:
        return False, f"non-decreasing f on {sum(c for _, c in bad)} of {arcs} arcs in {len(bad)} trees (e.g. {bad[0][0]})"
    return True, f"{arcs} arcs"


def test_criterion_5_potential_strictly_decreases():
    ok, detail = record(5, criterion_5)
    assert ok, detail


# ---------------------------------------------------------------------------
# 6. shellings


def criterion_6():
    parts = []
    ok = True
    trees = small_distributable()
    bad = []
    for name, t in trees.items():
        for seed in range(5):
            res = verify_certificate(shell_full_distributable(t, seed=seed))
            if not res.ok:
                bad.append(f"{name} seed {seed} at facet {res.index}")
                break
    if bad:
        ok = False
        parts.append(f"(a) {len(bad)}/{len(trees)} trees fail ({', '.join(bad)})")
    else:
        parts.append(f"(a) {len(trees)} trees x 5 seeds")
    checked, failed = 0, []
    for n in range(2, 7):
        for t in unit_trees(n):
            checked += 1
            res = verify_certificate(shelling_order(t, t.first_children_edges()))
            if not res.ok:
                failed.append(t)
    if failed:
        ok = False
        parents = ["".join("-" if p is None else str(p) for p in t.parent) for t in failed]
        parts.append(f"(b) {len(failed)}/{checked} skeleton shellings fail (parents {', '.join(parents)})")
    else:
        parts.append(f"(b) {checked} skeleton shellings")
    hexagon = load("hexagon")
    facets = list(shelling_order(hexagon, hexagon.first_children_edges()).facets)
    random.Random(7).shuffle(facets)
    res = verify_shelling(facets)
    if res.ok:
        ok = False
        parts.append("(c) scrambled hexagon order was accepted")
    else:
        parts.append(f"(c) scrambled order rejected at facet {res.index}")
    return ok, "; ".join(parts)


def test_criterion_6_shellings():
    ok, detail = record(6, criterion_6)
    assert ok, detail


# ---------------------------------------------------------------------------
# 7. connectivity


def criterion_7():
    count = 0
    for n in range(2, 7):
        for t in unit_trees(n):
            count += 1
            if not verify_connectivity_consequence(t):
                return False, f"homology survives below n-b on parents {t.parent}"
    return True, f"{count} unit trees"


def test_criterion_7_connectivity():
    ok, detail = record(7, criterion_7)
    assert ok, detail


# ---------------------------------------------------------------------------
# 8. chessboard complexes


def criterion_8():
    parts = []
    ok = True
    h = chessboard_homology(2, 3)
    if h.betti.get(0, 0) or h.torsion.get(0) or h.betti.get(1) != 1 or h.torsion.get(1):
        ok = False
    parts.append(f"M23 H~=(Z^{h.betti.get(0, 0)},Z^{h.betti.get(1, 0)})")
    res = verify_certificate(shell_full_distributable(chessboard_tree(2, 3)))
    ok &= res.ok
    parts.append("M23 shells" if res.ok else "M23 shelling fails")
    h34 = chessboard_homology(3, 4)
    tors = h34.torsion.get(1, [])
    has3 = any(x % 3 == 0 for x in tors)
    ok &= has3
    groups = ",".join(f"Z^{h34.betti.get(d, 0)}" + "".join(f"+Z/{x}" for x in h34.torsion.get(d, [])) for d in range(0, 3))
    parts.append(f"M34 H~_0..2=({groups}), H~_1 torsion {tors or 'none'}")
    rep = sorting_obstruction_report(3, 4)
    ok &= rep.obstructed
    parts.append("obstruction fires" if rep.obstructed else "no obstruction")
    for m in range(1, 4):
        for n in range(m, 7):
            hm = chessboard_homology(m, n)
            if not hm.vanishes_through(nu(m, n) - 1):
                ok = False
                parts.append(f"M{m}{n} homology below nu")
    parts.append("nu vanishing checked for m<=3, n<=6")
    return ok, "; ".join(parts)


def test_criterion_8_chessboards():
    ok, detail = record(8, criterion_8)
    assert ok, detail


# ---------------------------------------------------------------------------
# 9. worked examples


EXAMPLE_TREE = FIXTURES / "worked_example.ctree"
EXAMPLE_LABELLING = FIXTURES / "worked_example.lab"
EXAMPLE_BASE = FIXTURES / "worked_example_base.lab"


def criterion_9():
    missing = [p.name for p in (EXAMPLE_TREE, EXAMPLE_LABELLING, EXAMPLE_BASE) if not p.exists()]
    if missing:
        return False, f"worked example drawings are not recoverable; missing {', '.join(missing)}"
    t = parse_tree(EXAMPLE_TREE.read_text())
    a = parse_labelling(t, EXAMPLE_LABELLING.read_text())
    ids = {x: t.index(x) for x in ("v1", "v2", "v3", "v6", "v7", "v9")}
    want = {(ids["v1"], ids["v2"]), (ids["v2"], ids["v3"]), (ids["v6"], ids["v7"])}
    if set(neighbor_inversions(t, a)) != want:
        return False, "neighbour inversion pairs differ"
    trio = [ids["v2"], ids["v6"], ids["v9"]]
    if label_inversions(t, a, trio).node_pairs:
        return False, "inversion inside {v2, v6, v9}"
    base = parse_labelling(t, EXAMPLE_BASE.read_text(), partial=True)
    comp = sorted(base)
    labs = frozenset().union(*base.values())
    if to_map(base_labelling(t, comp, labs)) != to_map(base):
        return False, "base-labelling differs from the worked example"
    return True, "worked examples reproduced"


def test_criterion_9_worked_examples():
    ok, detail = record(9, criterion_9)
    assert ok, detail


# ---------------------------------------------------------------------------
# 10. half-degree edge sets


def half_degree_check(t: CapacityTree) -> tuple[bool, str]:
    e = t.half_degree_edges()
    hub = max(range(t.n), key=t.degree)
    want = sum((t.degree(v) - 1) // 2 for v in range(t.n))
    sized = len(e) - 1 == want
    valid = t.validate_edge_set(e)
    cert = shelling_order(t, e, check=False)
    res = verify_certificate(cert)
    ok = sized and valid and res.ok and t.degree(hub) == 6
    return ok, (
        f"|E|-1={len(e) - 1} (want {want}), hypothesis {'holds' if valid else 'fails'}, "
        f"{len(cert.facets)} facets {'shell' if res.ok else f'fail at {res.index}'}"
    )


def criterion_10():
    parts = []
    ok = True
    for name in ("hub6", "hub6_pendant"):
        good, detail = half_degree_check(load(name))
        ok &= good
        parts.append(f"{name}: {detail}")
    return ok, "; ".join(parts)


def test_criterion_10_half_degree():
    ok, detail = record(10, criterion_10)
    assert ok, detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def summary_lines() -> list[str]:
    return [f"criterion {n:>2}: {'PASS' if ok else 'FAIL'} ({secs:.1f}s) {detail}" for n, (ok, detail, secs) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for i, fn in enumerate(CRITERIA, 1):
        record(i, fn)
        print(summary_lines()[i - 1], flush=True)
