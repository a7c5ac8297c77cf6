"""Local sorting steps, greedy sorting and the weak order on labellings."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .inversion import neighbor_inversions, node_inversions, pair_inverted, unique_redistribution
from .labelling import Labelling, all_labellings, count_labellings, inline, to_map
from .tree import CapacityTree, TreeError

STRATEGIES = ("first", "random", "largest-potential-drop")
DEFAULT_BOUND = 50_000

Key = tuple[tuple[int, frozenset[int]], ...]


def _key(a: Mapping[int, frozenset[int]]) -> Key:
    return tuple(sorted(a.items()))


def local_sort_step(t: CapacityTree, tau: Labelling | Mapping[int, frozenset[int]], pair: tuple[int, int]) -> dict[int, frozenset[int]]:
    """Redistribute the labels of an inverted neighbouring pair."""
    a = to_map(tau)
    u, v = pair
    if t.parent[v] != u and t.parent[u] != v:
        raise TreeError("vertices are not neighbours")
    if not pair_inverted(t, a, u, v):
        raise TreeError("pair is not an inversion")
    return unique_redistribution(t, a, u, v)


def potential(t: CapacityTree, sigma: Labelling | Mapping[int, frozenset[int]]) -> int:
    """Sum over inverted vertex pairs of (labels moved) times (distance)."""
    a = to_map(sigma)
    f = 0
    for u, v in node_inversions(t, a):
        moved = a[u] - unique_redistribution(t, a, u, v)[u]
        f += len(moved) * t.distance(u, v)
    return f


@dataclass
class SortTrace:
    steps: list[tuple[dict[int, frozenset[int]], tuple[int, int]]]
    """Each entry is the labelling before the step and the pair swapped."""
    terminal: dict[int, frozenset[int]]
    strategy: str = "first"
    seed: int | None = None

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def render(self, t: CapacityTree) -> str:
        lines = []
        for n, (before, (u, v)) in enumerate(self.steps, 1):
            after = self.steps[n][0] if n < len(self.steps) else self.terminal
            lines.append(f"step {n}: swap ({t.ids[u]},{t.ids[v]}) -> {inline(t, after)}")
        return "\n".join(lines)


def greedy_sort(
    t: CapacityTree,
    sigma: Labelling | Mapping[int, frozenset[int]],
    strategy: str = "first",
    seed: int | None = None,
    guard: int | None = None,
) -> SortTrace:
    """Apply local sorting steps until no neighbouring pair is inverted.

    ``first`` takes the first inverted edge in DFS order, ``random`` draws
    one with a seeded generator, and ``largest-potential-drop`` picks the
    step leaving the smallest potential.  ``guard`` caps the number of steps
    and defaults to the potential of ``sigma``.
    """
    if strategy not in STRATEGIES:
        raise TreeError(f"unknown strategy {strategy!r}")
    if not t.is_distributable():
        raise TreeError("tree is not distributable")
    cur = to_map(sigma)
    rng = random.Random(seed)
    if guard is None:
        guard = potential(t, cur)
    steps = []
    while True:
        inv = sorted(neighbor_inversions(t, cur))
        if not inv:
            break
        if len(steps) >= guard:
            raise TreeError(f"sorting exceeded the step guard ({guard})")
        if strategy == "first":
            pair = inv[0]
        elif strategy == "random":
            pair = rng.choice(inv)
        else:
            pair = min(inv, key=lambda p: (potential(t, unique_redistribution(t, cur, *p)), p))
        steps.append((cur, pair))
        cur = unique_redistribution(t, cur, *pair)
    return SortTrace(steps, cur, strategy, seed)


@dataclass
class WeakOrderDigraph:
    """Labellings with an arc ``tau -> sigma`` for every local sorting step."""

    tree: CapacityTree
    nodes: list[Key]
    arcs: dict[Key, list[tuple[tuple[int, int], Key]]] = field(default_factory=dict)

    @property
    def arc_count(self) -> int:
        return sum(len(v) for v in self.arcs.values())

    def sinks(self) -> list[Key]:
        return [n for n in self.nodes if not self.arcs[n]]

    def sources(self) -> list[Key]:
        has_in = {s for outs in self.arcs.values() for _, s in outs}
        return [n for n in self.nodes if n not in has_in]

    def find_cycle(self) -> list[Key] | None:
        """A directed cycle if one exists (iterative DFS)."""
        color = dict.fromkeys(self.nodes, 0)
        for root in self.nodes:
            if color[root]:
                continue
            stack = [(root, iter(self.arcs[root]))]
            trail = [root]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = 2
                    stack.pop()
                    trail.pop()
                    continue
                s = nxt[1]
                if color[s] == 1:
                    return trail[trail.index(s):] + [s]
                if color[s] == 0:
                    color[s] = 1
                    stack.append((s, iter(self.arcs[s])))
                    trail.append(s)
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def potential_violations(self) -> list[tuple[Key, Key, int, int]]:
        """Arcs along which the potential fails to drop strictly."""
        f = {n: potential(self.tree, dict(n)) for n in self.nodes}
        return [(n, s, f[n], f[s]) for n in self.nodes for _, s in self.arcs[n] if f[s] >= f[n]]

    def to_dot(self) -> str:
        t = self.tree
        name = {n: f"n{i}" for i, n in enumerate(self.nodes)}
        lines = ["digraph weak_order {"]
        for n in self.nodes:
            lines.append(f'  {name[n]} [label="{inline(t, dict(n))}"];')
        for n in self.nodes:
            for (u, v), s in self.arcs[n]:
                lines.append(f'  {name[n]} -> {name[s]} [label="{t.ids[u]},{t.ids[v]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_weak_order(
    t: CapacityTree,
    vertices: Iterable[int] | None = None,
    labels: Iterable[int] | None = None,
    bound: int = DEFAULT_BOUND,
) -> WeakOrderDigraph:
    """The weak order of a tree, or of a subtree holding a given label set."""
    verts = list(range(t.n)) if vertices is None else sorted(vertices)
    if not t.is_connected_set(verts):
        raise TreeError("vertices do not form a subtree")
    total = count_labellings(t, verts)
    if total > bound:
        raise TreeError(f"{total} labellings exceed the bound {bound}")
    g = WeakOrderDigraph(t, [])
    for a in all_labellings(t, verts, labels):
        k = _key(a)
        g.nodes.append(k)
        g.arcs[k] = [(p, _key(unique_redistribution(t, a, *p))) for p in sorted(neighbor_inversions(t, a, verts))]
    return g


@dataclass(frozen=True)
class ConfluenceResult:
    ok: bool
    reason: str = ""
    witness: tuple = ()


def check_confluence(
    t: CapacityTree,
    vertices: Iterable[int] | None = None,
    labels: Iterable[int] | None = None,
    bound: int = DEFAULT_BOUND,
) -> ConfluenceResult:
    """Acyclic weak order with exactly one sink (reachable from everything)."""
    g = build_weak_order(t, vertices, labels, bound)
    cyc = g.find_cycle()
    if cyc is not None:
        return ConfluenceResult(False, "cycle", tuple(cyc))
    sinks = g.sinks()
    if len(sinks) != 1:
        return ConfluenceResult(False, "several sinks", tuple(sinks))
    # in a finite acyclic digraph every node reaches some sink, so a unique
    # sink is reached from every labelling
    if vertices is None and labels is None and dict(sinks[0]) != to_map(t.sorted_assignment()):
        return ConfluenceResult(False, "sink is not the sorted labelling", tuple(sinks))
    return ConfluenceResult(True)


def check_confluence_restrictions(t: CapacityTree, bound: int = DEFAULT_BOUND) -> ConfluenceResult:
    """:func:`check_confluence` on every subtree with every admissible label set."""
    from itertools import combinations

    labels = range(1, t.total_capacity + 1)
    for r in range(1, t.n + 1):
        for verts in combinations(range(t.n), r):
            if not t.is_connected_set(verts):
                continue
            k = sum(t.caps[v] for v in verts)
            for labs in combinations(labels, k):
                res = check_confluence(t, verts, labs, bound)
                if not res.ok:
                    return ConfluenceResult(False, f"{res.reason} on subtree {[t.ids[v] for v in verts]} with labels {list(labs)}", res.witness)
    return ConfluenceResult(True)


def linear_extension(g: WeakOrderDigraph, seed: int | None = None) -> list[Key]:
    """Labellings from lowest to highest, compatible with the weak order.

    Without a seed ties are broken by the labelling text; with a seed they
    are drawn at random, giving a random linear extension.
    """
    t = g.tree
    rng = random.Random(seed) if seed is not None else None
    below = {n: {s for _, s in g.arcs[n]} for n in g.nodes}
    above: dict[Key, list[Key]] = {n: [] for n in g.nodes}
    for n in g.nodes:
        for s in below[n]:
            above[s].append(n)
    waiting = {n: len(below[n]) for n in g.nodes}
    ready = [n for n in g.nodes if not waiting[n]]
    text = {n: inline(t, dict(n)) for n in g.nodes}
    out = []
    while ready:
        if rng is None:
            ready.sort(key=text.__getitem__)
            n = ready.pop(0)
        else:
            n = ready.pop(rng.randrange(len(ready)))
        out.append(n)
        for m in above[n]:
            waiting[m] -= 1
            if not waiting[m]:
                ready.append(m)
    if len(out) != len(g.nodes):
        raise TreeError("weak order has a cycle")
    return out
