"""Label and node inversions for capacity trees.

A label's *path* runs from the vertex holding it to its destination.  Two
labels held at different vertices ``u`` and ``v`` are compared through the
path ``u .. v``: each label attaches to that path at the vertex closest to
its destination.  Labels attaching at different vertices are ordered along
the path (they would cross an edge in opposite directions otherwise, rule
E1).  Labels sharing an attachment vertex are ordered by channel priority
when that vertex is an endpoint (E2, falling back to V4), and by the
rules E3 and V1-V4 when it is interior.

Every comparison for a vertex pair depends only on the labels the pair
holds, so the pair's labels admit exactly one split without an inversion
(:func:`unique_redistribution`).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .labelling import all_labellings, count_labellings
from .tree import CapacityTree, TreeError

Assignment = Mapping[int, frozenset[int]]

RULES = ("E1", "E2", "E3", "V1", "V2", "V3", "V4")


# ---------------------------------------------------------------------------
# coarsenings and edge priority


@dataclass(frozen=True)
class Coarsening:
    """Nested decomposition of a tree around a local root.

    ``levels[k]`` maps every vertex still in play at level ``k`` to its part
    (1, 2 or 3).  Level ``k + 1`` covers exactly the part-2 vertices of
    level ``k``.
    """

    local_root: int
    levels: tuple[Mapping[int, int], ...]

    def part(self, level: int, v: int) -> int | None:
        return self.levels[level].get(v)

    def parts(self, level: int) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for v, p in self.levels[level].items():
            out.setdefault(p, set()).add(v)
        return {p: frozenset(s) for p, s in sorted(out.items())}


@functools.lru_cache(maxsize=None)
def coarsenings(t: CapacityTree, r: int) -> Coarsening:
    current = set(range(t.n))
    levels = []
    while True:
        kids = [c for c in t.children[r] if c in current]
        if len(kids) <= 1:
            break
        level = {v: 2 for v in current}
        for v in t.subtree(kids[0]):
            level[v] = 1
        if len(kids) > 2:
            for v in t.subtree(kids[-1]):
                level[v] = 3
        levels.append(level)
        current = {v for v, p in level.items() if p == 2}
    return Coarsening(r, tuple(levels))


def coarsening_path_distance(c: Coarsening, level: int, start: int, end: int) -> int:
    a, b = c.part(level, start), c.part(level, end)
    if a is None or b is None:
        raise TreeError("path endpoint outside the coarsening level")
    return abs(a - b)


@functools.lru_cache(maxsize=None)
def channel_order(t: CapacityTree, u: int) -> tuple[int, ...]:
    """Neighbours of ``u`` from highest to lowest edge priority.

    Children split off at an outer coarsening level outrank those split off
    later, a first child outranks the last child of the same level, and the
    parent outranks whichever child is never split off.
    """
    c = coarsenings(t, u)
    order: list[int] = []
    for level in c.levels:
        first = [v for v in t.children[u] if level.get(v) == 1]
        last = [v for v in t.children[u] if level.get(v) == 3]
        order.extend(first + last)
    if t.parent[u] is not None:
        order.append(t.parent[u])
    order.extend(v for v in t.children[u] if v not in order)
    return tuple(order)


def edge_rank(t: CapacityTree, u: int, w: int) -> int:
    return channel_order(t, u).index(w)


def edge_priority_higher(t: CapacityTree, u: int, w1: int, w2: int) -> bool:
    """Is the edge ``u -> w1`` a higher priority channel at ``u`` than ``u -> w2``?"""
    if w1 == w2:
        raise TreeError("edges must differ")
    order = channel_order(t, u)
    if w1 not in order or w2 not in order:
        raise TreeError("edge not incident to the vertex")
    return order.index(w1) < order.index(w2)


def capacity_channels(t: CapacityTree, v: int) -> tuple[tuple[int, int], ...]:
    return tuple((v, w) for w in channel_order(t, v))


def _distance_profile(t: CapacityTree, y: int, entry: int, exit_: int) -> tuple[int, ...]:
    """Coarsening-path-distances at ``y`` from ``entry``'s part to ``exit_``'s part."""
    out = []
    for level in coarsenings(t, y).levels:
        a, b = level.get(entry), level.get(exit_)
        if a is None or b is None:
            break
        out.append(abs(a - b))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def exit_order(t: CapacityTree, y: int, entry: int | None) -> tuple[int, ...]:
    """Neighbours of ``y`` other than ``entry``, farthest-travelling first.

    Exits are ranked by coarsening-path-distance from the entry side (outer
    levels first) and then by edge priority.
    """
    exits = [w for w in t.neighbors(y) if w != entry]
    if entry is None:
        return tuple(w for w in channel_order(t, y) if w in exits)

    def key(w: int):
        prof = _distance_profile(t, y, entry, w)
        return tuple(-d for d in prof) + (0,) * (8 - len(prof)), edge_rank(t, y, w)

    return tuple(sorted(exits, key=key))


# ---------------------------------------------------------------------------
# paths and "travels farther"


@dataclass(frozen=True)
class LabelPath:
    label: int
    origin: int
    destination: int
    vertices: tuple[int, ...]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.vertices, self.vertices[1:]))


def label_path(t: CapacityTree, label: int, origin: int) -> LabelPath:
    d = t.dest[label]
    return LabelPath(label, origin, d, t.path(origin, d))


def travels_farther(t: CapacityTree, start: int, mu: int, nu: int, entry: int | None = None) -> bool | None:
    """Does label ``mu`` travel farther than ``nu`` from ``start``?

    Both labels are routed from ``start`` to their destinations.  Returns
    ``None`` when neither does (equal destinations with no shared edge).
    The clauses are tried in order; the first applicable one decides.
    """
    if mu == nu:
        return None
    pm = t.path(start, t.dest[mu])
    pn = t.path(start, t.dest[nu])
    k = 0
    while k + 1 < len(pm) and k + 1 < len(pn) and pm[k + 1] == pn[k + 1]:
        k += 1
    y = pm[k]
    ended_m, ended_n = len(pm) == k + 1, len(pn) == k + 1
    # (1) one path properly contains the other
    if ended_n and not ended_m:
        return True
    if ended_m and not ended_n:
        return False
    if ended_m and ended_n:
        if k == 0:
            return None
        # (4) equal destinations, decided by the direction of the final edge
        x = pm[k - 1]
        upward = x > y  # later -> earlier in DFS order
        return (mu < nu) if upward else (mu > nu)
    a, b = pm[k + 1], pn[k + 1]
    come = pm[k - 1] if k > 0 else entry
    # (2)/(3) at the divergence vertex; (5) when no edge is shared
    order = exit_order(t, y, come) if come is not None else channel_order(t, y)
    return order.index(a) < order.index(b)


# ---------------------------------------------------------------------------
# label prioritisation at a vertex


@functools.lru_cache(maxsize=None)
def augmented_channels(t: CapacityTree, w: int) -> tuple[tuple[int, int], ...]:
    """Every tree edge, directed away from ``w``, in priority order.

    Starts from the capacity channels of ``w`` and repeatedly appends the
    continuations past each listed edge, farthest-travelling first.
    """
    out = list(capacity_channels(t, w))
    i = 0
    while i < len(out):
        x, y = out[i]
        out.extend((y, z) for z in exit_order(t, y, x))
        i += 1
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _channel_index(t: CapacityTree, w: int) -> dict[tuple[int, int], int]:
    return {e: i for i, e in enumerate(augmented_channels(t, w))}


@functools.lru_cache(maxsize=None)
def channel_indices(t: CapacityTree, w: int, label: int) -> tuple[int, ...]:
    """Sorted channel-list positions used by ``label`` on its way out of ``w``."""
    idx = _channel_index(t, w)
    p = t.path(w, t.dest[label])
    return tuple(sorted(idx[e] for e in zip(p, p[1:])))


_INF = float("inf")


def _lex_key(indices: Sequence[int], width: int) -> tuple:
    # a list that runs on beats its own prefix, so an empty list ranks last
    return tuple(indices) + (_INF,) * (width - len(indices))


def prioritize_labels(t: CapacityTree, w: int, labels: Iterable[int], partner: int | None = None) -> tuple[int, ...]:
    """Order ``labels`` at ``w`` from highest to lowest priority.

    Repeatedly picks the label whose not-yet-filled channels form the
    lexicographically smallest index list; ties go to the label that
    travels farther, then (equal destinations at ``w``) to the label that
    belongs nearer ``w`` when the other side is ``partner``.
    """
    remaining = list(labels)
    filled: set[int] = set()
    out: list[int] = []
    width = t.n
    while remaining:
        keyed = []
        for lab in remaining:
            unfilled = [i for i in channel_indices(t, w, lab) if i not in filled]
            keyed.append((_lex_key(unfilled, width), lab))
        best_key = min(k for k, _ in keyed)
        tied = [lab for k, lab in keyed if k == best_key]
        best = tied[0]
        for lab in tied[1:]:
            if _stays_before(t, w, lab, best, partner):
                best = lab
        out.append(best)
        remaining.remove(best)
        filled.update(channel_indices(t, w, best))
    return tuple(out)


def _stays_before(t: CapacityTree, w: int, a: int, b: int, partner: int | None) -> bool:
    """Tie-break: should ``a`` rather than ``b`` be held at ``w``?"""
    far = travels_farther(t, w, a, b, partner)
    if far is not None:
        return far
    # equal destinations reached without a shared edge: smaller labels sit
    # at the DFS-earlier vertex
    if partner is None:
        return a < b
    return (a > b) if partner < w else (a < b)


# ---------------------------------------------------------------------------
# pair comparison


def _attach(t: CapacityTree, path: tuple[int, ...], label: int) -> int:
    """Index along ``path`` of the vertex closest to ``dest(label)``."""
    d = t.dest[label]
    best, best_d = 0, None
    for i, x in enumerate(path):
        dd = t.distance(x, d)
        if best_d is None or dd < best_d:
            best, best_d = i, dd
    return best


@functools.lru_cache(maxsize=None)
def _line_position(t: CapacityTree, x: int, w: int) -> int:
    """Position of ``w``'s branch in the linear arrangement around ``x``.

    Parts split off as ``C1`` sit left (outer levels farther out), parts
    split off as ``C3`` sit right, and the residual ``C2`` is centred at 0.
    """
    if w == x:
        return 0
    levels = coarsenings(t, x).levels
    depth = len(levels)
    for k, level in enumerate(levels):
        p = level[w]
        if p == 1:
            return -(depth - k)
        if p == 3:
            return depth - k
    return 0


def _interior_order(t: CapacityTree, u: int, v: int, x: int, lam: int, mu: int) -> tuple[bool, str]:
    """With ``lam`` arriving from ``u``'s side and ``mu`` from ``v``'s, both
    attaching at interior ``x``: should ``lam`` be on ``u``'s side?

    Returns the answer and the rule deciding it.
    """
    dl, dm = t.dest[lam], t.dest[mu]
    exit_l = t.step_toward(x, dl) if dl != x else x
    exit_m = t.step_toward(x, dm) if dm != x else x
    if exit_l == exit_m and exit_l != x:
        far = travels_farther(t, x, lam, mu)
        du, dv = t.distance(u, x), t.distance(v, x)
        if far is not None and du != dv:
            # the farther-travelling label should be nearer the junction
            return (far == (du < dv)), "E3"
        if far is not None:
            au, av = t.step_toward(x, u), t.step_toward(x, v)
            return (far == edge_priority_higher(t, x, au, av)), "E3"
        # equal destinations: fall through to V4
        return (lam < mu) == (u < v), "V4"
    pu = _line_position(t, x, t.step_toward(x, u))
    pv = _line_position(t, x, t.step_toward(x, v))
    pl = _line_position(t, x, exit_l)
    pm = _line_position(t, x, exit_m)
    if pu != pv and pl != pm:
        return ((pl < pm) == (pu < pv)), "V1"
    if dl == dm:
        return (lam < mu) == (u < v), "V4"
    # remaining ties: the DFS-earlier vertex gets the DFS-earlier destination
    rule = "V2" if (t.is_ancestor(dl, x) or t.is_ancestor(dm, x)) else "V3"
    return (dl < dm) == (u < v), rule


def pair_order(t: CapacityTree, u: int, v: int, labels: Iterable[int]) -> tuple[list[int], dict[int, tuple]]:
    """Canonical order of ``labels`` from ``u``'s end to ``v``'s end.

    The first ``cap(u)`` labels of the order belong at ``u``.  Also returns
    the sort key of every label (used to explain pairwise verdicts).
    """
    path = t.path(u, v)
    last = len(path) - 1
    groups: dict[int, list[int]] = {}
    for lab in labels:
        groups.setdefault(_attach(t, path, lab), []).append(lab)
    order: list[int] = []
    keys: dict[int, tuple] = {}
    for pos in sorted(groups):
        g = groups[pos]
        if pos == 0:
            ranked = list(prioritize_labels(t, u, sorted(g), partner=v))
        elif pos == last:
            ranked = list(reversed(prioritize_labels(t, v, sorted(g), partner=u)))
        else:
            x = path[pos]
            ranked = sorted(g)
            ranked = _sort_interior(t, u, v, x, ranked)
        for i, lab in enumerate(ranked):
            keys[lab] = (pos, i)
        order.extend(ranked)
    return order, keys


def _sort_interior(t: CapacityTree, u: int, v: int, x: int, labels: list[int]) -> list[int]:
    # insertion sort with the pairwise rule; it is a strict total order on
    # the labels attaching at x (checked by the test suite)
    out: list[int] = []
    for lab in labels:
        i = 0
        while i < len(out) and _interior_order(t, u, v, x, out[i], lab)[0]:
            i += 1
        out.insert(i, lab)
    return out


def canonical_split(t: CapacityTree, u: int, v: int, labels: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    order, _ = pair_order(t, u, v, labels)
    k = t.caps[u]
    return frozenset(order[:k]), frozenset(order[k:])


def _rule_for(t: CapacityTree, u: int, v: int, lam: int, mu: int) -> str:
    """Rule tag for labels ``lam`` at ``u`` and ``mu`` at ``v`` found out of order."""
    path = t.path(u, v)
    a, b = _attach(t, path, lam), _attach(t, path, mu)
    if a != b:
        return "E1"
    last = len(path) - 1
    if a in (0, last):
        if t.dest[lam] == t.dest[mu] == path[a]:
            return "V4"
        return "E2"
    return _interior_order(t, u, v, path[a], lam, mu)[1]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class InversionReport:
    label_pairs: frozenset[tuple[int, int, int, int, str]]
    """``(label_i, host_i, label_j, host_j, rule)`` with ``label_i`` out of place."""
    node_pairs: frozenset[tuple[int, int]]
    neighbor_pairs: frozenset[tuple[int, int]]


def _hosts(assignment: Assignment) -> dict[int, int]:
    return {lab: v for v, labs in assignment.items() for lab in labs}


def pair_inverted(t: CapacityTree, assignment: Assignment, u: int, v: int) -> bool:
    held_u = assignment.get(u, frozenset())
    held_v = assignment.get(v, frozenset())
    want_u, _ = canonical_split(t, u, v, held_u | held_v)
    return want_u != held_u


def label_inversions(t: CapacityTree, assignment: Assignment, vertices: Iterable[int] | None = None) -> InversionReport:
    """All label inversion pairs among ``vertices`` (default: all assigned)."""
    verts = sorted(assignment if vertices is None else vertices)
    label_pairs = set()
    nodes = set()
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            held_u = assignment.get(u, frozenset())
            held_v = assignment.get(v, frozenset())
            if not held_u or not held_v:
                continue
            _, keys = pair_order(t, u, v, held_u | held_v)
            for lam in held_u:
                for mu in held_v:
                    if keys[mu] < keys[lam]:
                        label_pairs.add((lam, u, mu, v, _rule_for(t, u, v, lam, mu)))
                        nodes.add((u, v))
    neighbors = frozenset(p for p in nodes if t.parent[p[1]] == p[0])
    return InversionReport(frozenset(label_pairs), frozenset(nodes), neighbors)


def node_inversions(t: CapacityTree, assignment: Assignment, vertices: Iterable[int] | None = None) -> frozenset[tuple[int, int]]:
    verts = sorted(assignment if vertices is None else vertices)
    out = set()
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if pair_inverted(t, assignment, u, v):
                out.add((u, v))
    return frozenset(out)


def neighbor_inversions(t: CapacityTree, assignment: Assignment, vertices: Iterable[int] | None = None) -> frozenset[tuple[int, int]]:
    verts = set(assignment if vertices is None else vertices)
    out = set()
    for v in sorted(verts):
        p = t.parent[v]
        if p is not None and p in verts and pair_inverted(t, assignment, p, v):
            out.add((p, v))
    return frozenset(out)


def unique_redistribution(t: CapacityTree, assignment: Assignment, u: int, v: int) -> dict[int, frozenset[int]]:
    """Re-split the labels of ``u`` and ``v`` so the pair is not inverted."""
    if u == v:
        raise TreeError("vertices must differ")
    held = assignment.get(u, frozenset()) | assignment.get(v, frozenset())
    a, b = canonical_split(t, u, v, held)
    out = dict(assignment)
    out[u], out[v] = a, b
    return out


# ---------------------------------------------------------------------------
# base-labellings


def _target(t: CapacityTree, component: frozenset[int], label: int) -> int:
    """Vertex of ``component`` closest to ``dest(label)``."""
    d = t.dest[label]
    return min(component, key=lambda x: (t.distance(x, d), x))


def zero_flow_split(t: CapacityTree, component: Iterable[int], labels: Iterable[int]) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Split a component along every edge carrying no forced label flow.

    An edge inside the component carries zero flow when one side has exactly
    as much capacity as labels headed for it.  Returns the pieces with their
    label sets, ordered by smallest vertex.
    """
    comp = frozenset(component)
    labs = frozenset(labels)
    target = {lab: _target(t, comp, lab) for lab in labs}
    cut = set()
    for v in comp:
        p = t.parent[v]
        if p is None or p not in comp:
            continue
        side = frozenset(x for x in t.subtree(v) if x in comp)
        cap = sum(t.caps[x] for x in side)
        need = sum(1 for lab in labs if target[lab] in side)
        if cap == need:
            cut.add(v)
    pieces = []
    for block in t.components(cut, within=comp):
        b = frozenset(block)
        pieces.append((b, frozenset(lab for lab in labs if target[lab] in b)))
    return pieces


def _initial_fill(t: CapacityTree, comp: Sequence[int], labels: Iterable[int]) -> dict[int, frozenset[int]]:
    target = {lab: _target(t, frozenset(comp), lab) for lab in labels}
    queue = sorted(target, key=lambda lab: (target[lab], lab))
    out = {}
    i = 0
    for v in sorted(comp):
        out[v] = frozenset(queue[i:i + t.caps[v]])
        i += t.caps[v]
    return out


def sort_component(t: CapacityTree, assignment: Assignment, limit: int | None = None) -> dict[int, frozenset[int]]:
    """Apply local sorting steps among the assigned vertices until none applies.

    Steps follow DFS edge order.  ``limit`` guards against a cycle in the
    weak order; exceeding it raises.
    """
    cur = dict(assignment)
    verts = sorted(cur)
    edges = [(t.parent[v], v) for v in verts if t.parent[v] in cur]
    steps = 0
    while True:
        for p, v in edges:
            if pair_inverted(t, cur, p, v):
                cur = unique_redistribution(t, cur, p, v)
                break
        else:
            return cur
        steps += 1
        if limit is not None and steps > limit:
            raise TreeError("local sorting did not terminate within the step limit")


def base_labelling(t: CapacityTree, component: Iterable[int], labels: Iterable[int]) -> dict[int, frozenset[int]]:
    """The unique inversion-free labelling of ``component`` by ``labels``.

    The component is first split along its zero-flow edges; each piece is
    then settled by local sorting, which is confluent on distributable trees.
    """
    comp = frozenset(component)
    labs = frozenset(labels)
    if not comp:
        raise TreeError("empty component")
    if not t.is_connected_set(comp):
        raise TreeError("component is not connected")
    if sum(t.caps[v] for v in comp) != len(labs):
        raise TreeError("label count does not match component capacity")
    if any(not 1 <= lab <= t.total_capacity for lab in labs):
        raise TreeError(f"labels must lie in 1..{t.total_capacity}")
    if not t.is_distributable():
        raise TreeError("tree is not distributable")
    if len(comp) == 1:
        return {next(iter(comp)): labs}
    out: dict[int, frozenset[int]] = {}
    for piece, piece_labels in zero_flow_split(t, comp, labs):
        start = _initial_fill(t, sorted(piece), piece_labels)
        out.update(sort_component(t, start, limit=count_labellings(t, piece)))
    return out


def inversion_free_labellings(t: CapacityTree, component: Iterable[int], labels: Iterable[int]) -> list[dict[int, frozenset[int]]]:
    """Every labelling of ``component`` by ``labels`` with no node inversion (brute force)."""
    comp = sorted(component)
    return [a for a in all_labellings(t, comp, labels) if not node_inversions(t, a, comp)]
