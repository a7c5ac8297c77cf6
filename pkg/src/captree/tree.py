"""Rooted planar capacity trees.

Vertices are stored by their position in a depth-first (preorder) traversal,
so vertex ``0`` is the root and comparing two vertex indices compares their
DFS discovery order.  User-facing identifiers are kept alongside for I/O.

An edge is identified by its child endpoint (an integer ``>= 1``); edge sets
are ``frozenset[int]`` and sort in DFS order of that endpoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

EdgeSet = frozenset


class TreeError(ValueError):
    """Raised for malformed tree input or violated preconditions."""


@dataclass(frozen=True, eq=False)
class CapacityTree:
    """A rooted ordered tree with a nonnegative capacity at each vertex.

    ``parent[v]`` is ``None`` only for the root (index 0) and otherwise a
    smaller index; ``children[v]`` preserves the planar order.
    """

    ids: tuple[str, ...]
    parent: tuple[int | None, ...]
    caps: tuple[int, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.ids)
        if n == 0:
            raise TreeError("a tree needs at least one vertex")
        if len(self.parent) != n or len(self.caps) != n:
            raise TreeError("ids, parent and caps must have equal length")
        if self.parent[0] is not None:
            raise TreeError("vertex 0 must be the root")
        kids: list[list[int]] = [[] for _ in range(n)]
        for v in range(1, n):
            p = self.parent[v]
            if p is None:
                raise TreeError("multiple roots")
            if not 0 <= p < v:
                raise TreeError("vertices must be indexed in DFS preorder")
            kids[p].append(v)
        if any(c < 0 for c in self.caps):
            raise TreeError("capacities must be nonnegative")
        if len(set(self.ids)) != n:
            raise TreeError("duplicate vertex identifiers")
        object.__setattr__(self, "children", tuple(tuple(k) for k in kids))
        # preorder check: each child starts right after the previous sibling's subtree
        order = list(self._preorder())
        if order != list(range(n)):
            raise TreeError("vertices must be indexed in DFS preorder")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_parents(
        cls,
        parents: Sequence[int | None],
        caps: Sequence[int],
        ids: Sequence[str] | None = None,
    ) -> "CapacityTree":
        """Build from an arbitrary parent array; child order follows index order.

        The vertices are renumbered into DFS preorder.
        """
        n = len(parents)
        if ids is None:
            ids = [f"v{i + 1}" for i in range(n)]
        roots = [i for i, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise TreeError("multiple roots" if roots else "no root")
        kids: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parents):
            if p is not None:
                if not 0 <= p < n:
                    raise TreeError(f"missing parent for {ids[i]}")
                kids[p].append(i)
        order: list[int] = []
        stack = [roots[0]]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(kids[v]))
        if len(order) != n:
            raise TreeError("disconnected input or cycle")
        new = {old: k for k, old in enumerate(order)}
        return cls(
            ids=tuple(ids[old] for old in order),
            parent=tuple(None if parents[old] is None else new[parents[old]] for old in order),
            caps=tuple(int(caps[old]) for old in order),
        )

    def _preorder(self) -> Iterator[int]:
        stack = [0]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(self.children[v]))

    # -- basic structure --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def root(self) -> int:
        return 0

    @cached_property
    def total_capacity(self) -> int:
        return sum(self.caps)

    @cached_property
    def edges(self) -> EdgeSet:
        return frozenset(range(1, self.n))

    def neighbors(self, v: int) -> tuple[int, ...]:
        p = self.parent[v]
        return self.children[v] if p is None else (p,) + self.children[v]

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (self.parent[v] is not None)

    def is_leaf(self, v: int) -> bool:
        return self.degree(v) <= 1

    @property
    def root_is_leaf(self) -> bool:
        return self.degree(0) <= 1

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if self.is_leaf(v))

    def index(self, ident: str) -> int:
        try:
            return self.ids.index(ident)
        except ValueError:
            raise TreeError(f"unknown vertex {ident!r}") from None

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        return self.parent[e], e  # type: ignore[return-value]

    def edge_between(self, u: int, v: int) -> int:
        if self.parent[v] == u:
            return v
        if self.parent[u] == v:
            return u
        raise TreeError(f"{self.ids[u]} and {self.ids[v]} are not adjacent")

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * self.n
        for v in range(1, self.n):
            d[v] = d[self.parent[v]] + 1  # type: ignore[index]
        return tuple(d)

    @cached_property
    def subtree_end(self) -> tuple[int, ...]:
        """``subtree_end[v]`` is one past the last DFS index below ``v``."""
        end = list(range(1, self.n + 1))
        for v in range(self.n - 1, 0, -1):
            p = self.parent[v]
            end[p] = max(end[p], end[v])  # type: ignore[index]
        return tuple(end)

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is ``b`` or lies above it."""
        return a <= b < self.subtree_end[a]

    def subtree(self, v: int) -> range:
        return range(v, self.subtree_end[v])

    def path(self, u: int, v: int) -> tuple[int, ...]:
        """Vertices of the unique path from ``u`` to ``v`` (inclusive)."""
        up: list[int] = []
        down: list[int] = []
        a, b = u, v
        while a != b:
            if self.depth[a] >= self.depth[b]:
                up.append(a)
                a = self.parent[a]  # type: ignore[assignment]
            else:
                down.append(b)
                b = self.parent[b]  # type: ignore[assignment]
        return tuple(up) + (a,) + tuple(reversed(down))

    def distance(self, u: int, v: int) -> int:
        return len(self.path(u, v)) - 1

    def step_toward(self, u: int, v: int) -> int:
        """The neighbour of ``u`` on the path to ``v`` (``u != v``)."""
        if self.is_ancestor(u, v):
            for c in self.children[u]:
                if self.is_ancestor(c, v):
                    return c
        return self.parent[u]  # type: ignore[return-value]

    # -- destinations -----------------------------------------------------

    def dfs_order(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @cached_property
    def dest(self) -> tuple[int, ...]:
        """``dest[k]`` for label ``k`` (index 0 unused, set to -1)."""
        out = [-1]
        for v in range(self.n):
            out.extend([v] * self.caps[v])
        return tuple(out)

    def destinations(self) -> dict[int, int]:
        return {k: self.dest[k] for k in range(1, self.total_capacity + 1)}

    def sorted_assignment(self) -> tuple[frozenset[int], ...]:
        slots: list[set[int]] = [set() for _ in range(self.n)]
        for k in range(1, self.total_capacity + 1):
            slots[self.dest[k]].add(k)
        return tuple(frozenset(s) for s in slots)

    # -- components and derived trees ------------------------------------

    def components(self, cut: Iterable[int], within: Iterable[int] | None = None) -> list[tuple[int, ...]]:
        """Connected components after deleting ``cut`` (restricted to ``within``).

        Components are listed by their smallest (DFS-earliest) vertex.
        """
        cut = frozenset(cut)
        verts = set(range(self.n)) if within is None else set(within)
        comp_of: dict[int, int] = {}
        comps: list[list[int]] = []
        for v in sorted(verts):
            p = self.parent[v]
            if p is not None and p in verts and v not in cut:
                k = comp_of[p]
            else:
                k = len(comps)
                comps.append([])
            comp_of[v] = k
            comps[k].append(v)
        return [tuple(c) for c in comps]

    def is_connected_set(self, verts: Iterable[int]) -> bool:
        verts = set(verts)
        return bool(verts) and len(self.components((), verts)) == 1

    def derive(self, keep: Iterable[int], within: Iterable[int] | None = None) -> tuple["CapacityTree", list[tuple[int, ...]]]:
        """Contract every edge not in ``keep``; returns the tree and its blocks.

        The block containing the DFS-earliest vertex becomes the root and
        children are ordered by their earliest member, so the result is
        already in preorder.  Blocks are reported in the derived tree's
        vertex order.
        """
        verts = sorted(range(self.n) if within is None else set(within))
        keep = frozenset(keep)
        blocks = self.components(keep, verts)
        where = {v: i for i, b in enumerate(blocks) for v in b}
        parents: list[int | None] = []
        for b in blocks:
            top = b[0]
            p = self.parent[top]
            parents.append(None if p is None or p not in where else where[p])
        ids = ["+".join(self.ids[v] for v in b) for b in blocks]
        caps = [sum(self.caps[v] for v in b) for b in blocks]
        return CapacityTree.from_parents(parents, caps, ids), blocks

    def derive_tree(self, keep: Iterable[int]) -> "CapacityTree":
        return self.derive(keep)[0]

    # -- predicates -------------------------------------------------------

    def is_distributable(self) -> bool:
        return all(self.caps[v] >= self.degree(v) - 1 for v in range(self.n))

    def check_merge_closure(self) -> bool:
        """Merging any two neighbours keeps the tree distributable.

        The merged vertex ``C`` must moreover satisfy ``cap(C) >= deg(C)``.
        """
        if not self.is_distributable():
            raise TreeError("tree is not distributable")
        for e in range(1, self.n):
            merged, blocks = self.derive(self.edges - {e})
            if not merged.is_distributable():
                return False
            k = next(i for i, b in enumerate(blocks) if len(b) == 2)
            if merged.caps[k] < merged.degree(k):
                return False
        return True

    def first_children_edges(self) -> EdgeSet:
        """Edges from each internal vertex to its first child."""
        if not self.root_is_leaf:
            raise TreeError("root is not a leaf")
        return frozenset(kids[0] for kids in self.children if kids)

    def half_degree_edges(self) -> EdgeSet:
        """Edges to the first ``(deg(v) - 1) // 2`` children, plus the root edge."""
        if not self.root_is_leaf:
            raise TreeError("root is not a leaf")
        out = set(self.children[0])
        for v in range(1, self.n):
            k = (self.degree(v) - 1) // 2
            out.update(self.children[v][:k])
        return frozenset(out)

    def validate_edge_set(self, keep: Iterable[int]) -> bool:
        """Check the skeleton-shelling hypothesis for ``keep`` by exhaustion.

        The derived tree must be distributable, and so must the derived tree
        of every component left after deleting any set of edges outside
        ``keep``.
        """
        keep = frozenset(keep)
        if not keep <= self.edges:
            raise TreeError("edge set is not a subset of the tree's edges")
        others = sorted(self.edges - keep)
        for r in range(len(others) + 1):
            for extra in itertools.combinations(others, r):
                for comp in self.components(extra):
                    sub, _ = self.derive(keep, comp)
                    if not sub.is_distributable():
                        return False
        return True

    # -- misc -------------------------------------------------------------

    def edge_word(self, edges: Iterable[int]) -> str:
        return ",".join(self.ids[e] for e in sorted(edges))

    def __repr__(self) -> str:
        parts = []
        for v in range(self.n):
            p = "-" if self.parent[v] is None else self.ids[self.parent[v]]
            parts.append(f"{self.ids[v]}({p},{self.caps[v]})")
        return f"CapacityTree[{' '.join(parts)}]"

    def _key(self) -> tuple:
        return (self.ids, self.parent, self.caps)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CapacityTree) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def same_shape(self, other: "CapacityTree") -> bool:
        """Equal up to vertex names."""
        return self.parent == other.parent and self.caps == other.caps


def path_tree(caps: Sequence[int]) -> CapacityTree:
    return CapacityTree.from_parents([None] + list(range(len(caps) - 1)), caps)


def star_tree(center_cap: int, leaf_caps: Sequence[int], root_leaf: bool = True) -> CapacityTree:
    """A star; with ``root_leaf`` the first leaf is the root, else the centre."""
    if root_leaf and leaf_caps:
        parents = [None, 0] + [1] * (len(leaf_caps) - 1)
        caps = [leaf_caps[0], center_cap] + list(leaf_caps[1:])
        ids = ["l1", "c"] + [f"l{i + 2}" for i in range(len(leaf_caps) - 1)]
    else:
        parents = [None] + [0] * len(leaf_caps)
        caps = [center_cap] + list(leaf_caps)
        ids = ["c"] + [f"l{i + 1}" for i in range(len(leaf_caps))]
    return CapacityTree.from_parents(parents, caps, ids)


def parse_tree(text: str) -> CapacityTree:
    """Parse the ``.ctree`` format: ``node <id> parent=<id|-> cap=<n>`` lines."""
    ids: list[str] = []
    parents: list[str | None] = []
    caps: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 4 or toks[0] != "node":
            raise TreeError(f"line {lineno}: malformed line {raw!r}")
        fields = {}
        for tok in toks[2:]:
            key, sep, val = tok.partition("=")
            if not sep or key not in ("parent", "cap") or key in fields:
                raise TreeError(f"line {lineno}: malformed line {raw!r}")
            fields[key] = val
        if len(fields) != 2:
            raise TreeError(f"line {lineno}: malformed line {raw!r}")
        ident = toks[1]
        if ident in ids:
            raise TreeError(f"line {lineno}: duplicate identifier {ident!r}")
        try:
            cap = int(fields["cap"])
        except ValueError:
            raise TreeError(f"line {lineno}: capacity must be an integer") from None
        if cap < 0:
            raise TreeError(f"line {lineno}: capacity must be nonnegative")
        par = fields["parent"]
        if par == "-":
            if any(p is None for p in parents):
                raise TreeError(f"line {lineno}: multiple roots")
            parents.append(None)
        else:
            if par not in ids:
                raise TreeError(f"line {lineno}: parent {par!r} not declared earlier")
            parents.append(par)
        ids.append(ident)
        caps.append(cap)
    if not ids:
        raise TreeError("empty tree description")
    if parents[0] is not None:
        raise TreeError("the root line must come first")
    pidx = [None if p is None else ids.index(p) for p in parents]
    return CapacityTree.from_parents(pidx, caps, ids)


def format_tree(t: CapacityTree) -> str:
    lines = []
    for v in range(t.n):
        p = "-" if t.parent[v] is None else t.ids[t.parent[v]]
        lines.append(f"node {t.ids[v]} parent={p} cap={t.caps[v]}")
    return "\n".join(lines) + "\n"


def parse_edges(t: CapacityTree, spec: str) -> EdgeSet:
    """Comma-separated child-endpoint identifiers, e.g. ``"c,a"``."""
    out = set()
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        e = t.index(tok)
        if e == 0:
            raise TreeError(f"{tok!r} is the root and names no edge")
        out.add(e)
    return frozenset(out)
