"""Faces of the tree complexes, facet orders and brute-force shelling checks.

A face is a set of cut edges together with the label set carried by each
component of the cut tree.  Its dimension is one less than the number of cut
edges, and a facet of the full complex is just a labelling.  Merging
components (uncutting edges) gives the faces below a face.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .inversion import neighbor_inversions
from .labelling import all_labellings, inline
from .tree import CapacityTree, EdgeSet, TreeError, star_tree
from .weak_order import build_weak_order, linear_extension

DEFAULT_FACE_BOUND = 200_000


@functools.lru_cache(maxsize=None)
def _components(t: CapacityTree, cut: frozenset[int]) -> tuple[tuple[int, ...], ...]:
    return tuple(t.components(cut))


@dataclass(frozen=True)
class Face:
    """``blocks[i]`` holds the labels of the ``i``-th component of ``T - cut``."""

    tree: CapacityTree = field(compare=False, hash=False, repr=False)
    cut: frozenset[int]
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        comps = self.components
        if len(comps) != len(self.blocks):
            raise TreeError("one label set per component is required")
        for comp, labs in zip(comps, self.blocks):
            if len(labs) != sum(self.tree.caps[v] for v in comp):
                raise TreeError("component label count does not match its capacity")

    @property
    def components(self) -> tuple[tuple[int, ...], ...]:
        return _components(self.tree, self.cut)

    @property
    def dim(self) -> int:
        return len(self.cut) - 1

    def labels_of(self, v: int) -> frozenset[int]:
        for comp, labs in zip(self.components, self.blocks):
            if v in comp:
                return labs
        raise TreeError("vertex not in tree")

    def restrict(self, cut: Iterable[int]) -> "Face":
        """The face below this one keeping only the edges of ``cut``."""
        cut = frozenset(cut)
        if not cut <= self.cut:
            raise TreeError("not a subset of the face's cut")
        comps = _components(self.tree, cut)
        return Face(self.tree, cut, tuple(frozenset().union(*(self.labels_of(v) for v in comp)) for comp in comps))

    def faces(self) -> Iterator["Face"]:
        """Every face below this one (including itself and the empty face)."""
        edges = sorted(self.cut)
        for r in range(len(edges) + 1):
            for sub in itertools.combinations(edges, r):
                yield self.restrict(sub)

    def contains(self, other: "Face") -> bool:
        return other.cut <= self.cut and self.restrict(other.cut) == other

    def describe(self) -> str:
        t = self.tree
        parts = []
        for comp, labs in zip(self.components, self.blocks):
            parts.append("{" + ",".join(t.ids[v] for v in comp) + "}:" + "{" + ",".join(map(str, sorted(labs))) + "}")
        return f"cut=[{t.edge_word(self.cut)}] " + " ".join(parts)


def face_from_labelling(t: CapacityTree, assignment) -> Face:
    cut = t.edges
    comps = _components(t, cut)
    a = dict(assignment) if not isinstance(assignment, tuple) else dict(enumerate(assignment))
    return Face(t, cut, tuple(a[c[0]] for c in comps))


def _deal(sizes: Sequence[int], labels: Sequence[int]) -> Iterator[tuple[frozenset[int], ...]]:
    if not sizes:
        yield ()
        return
    for pick in itertools.combinations(labels, sizes[0]):
        rest = [x for x in labels if x not in pick]
        for tail in _deal(sizes[1:], rest):
            yield (frozenset(pick),) + tail


def count_facets(t: CapacityTree, k: int | None = None) -> int:
    from math import factorial

    n_lab = t.total_capacity
    cuts = [t.edges] if k is None else [frozenset(c) for c in itertools.combinations(sorted(t.edges), k + 1)]
    total = 0
    for cut in cuts:
        m = factorial(n_lab)
        for comp in _components(t, cut):
            m //= factorial(sum(t.caps[v] for v in comp))
        total += m
    return total


def enumerate_facets(t: CapacityTree, k: int | None = None, bound: int = DEFAULT_FACE_BOUND) -> list[Face]:
    """Facets of the full complex (``k=None``) or of its ``k``-skeleton."""
    if k is not None and not 0 <= k + 1 <= t.n - 1:
        raise TreeError("skeleton dimension out of range")
    total = count_facets(t, k)
    if total > bound:
        raise TreeError(f"{total} facets exceed the bound {bound}")
    cuts = [t.edges] if k is None else [frozenset(c) for c in itertools.combinations(sorted(t.edges), k + 1)]
    labels = list(range(1, t.total_capacity + 1))
    out = []
    for cut in cuts:
        sizes = [sum(t.caps[v] for v in comp) for comp in _components(t, cut)]
        for blocks in _deal(sizes, labels):
            out.append(Face(t, cut, blocks))
    return out


def all_faces(t: CapacityTree, max_dim: int | None = None) -> dict[int, list[Face]]:
    """Every nonempty face grouped by dimension (up to ``max_dim``)."""
    top = t.n - 2 if max_dim is None else max_dim
    out: dict[int, list[Face]] = {}
    for d in range(0, top + 1):
        out[d] = enumerate_facets(t, d, bound=10**9)
    return out


# ---------------------------------------------------------------------------
# facet keys and the shelling order


@dataclass(frozen=True, order=True)
class FacetKey:
    c: int
    s: tuple[int, ...]
    cut_id: int
    weak_rank: tuple[int, ...]


def _derived_labelling(t: CapacityTree, f: Face, keep: frozenset[int], within: tuple[int, ...]):
    """The derived tree of ``within`` (keeping ``keep``) and its labelling.

    Labels are renamed order-preservingly to ``1..N`` so the derived tree's
    own destinations apply.  Returns the tree, its blocks, the labelling
    and the renaming.
    """
    d, blocks = t.derive(keep & frozenset(within[1:]), within)
    held = [f.labels_of(b[0]) for b in blocks]
    # every block lies inside one component of the face
    labs = sorted(frozenset().union(*held)) if held else []
    rename = {lab: i + 1 for i, lab in enumerate(labs)}
    lab = {i: frozenset(rename[x] for x in h) for i, h in enumerate(held)}
    return d, blocks, lab, rename


class _RankCache:
    """Linear-extension positions of labellings, per derived tree."""

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self._ranks: dict[CapacityTree, dict] = {}

    def rank(self, d: CapacityTree, lab: dict[int, frozenset[int]]) -> int:
        if d not in self._ranks:
            ext = linear_extension(build_weak_order(d), self.seed)
            self._ranks[d] = {k: i for i, k in enumerate(ext)}
        return self._ranks[d][tuple(sorted(lab.items()))]


def facet_key(f: Face, e: Iterable[int], cut_ids: dict[frozenset[int], int] | None = None, ranks: _RankCache | None = None) -> FacetKey:
    """Sort key ``(c, S, cut id, weak rank)`` of a facet relative to ``e``."""
    t = f.tree
    e = frozenset(e)
    ranks = ranks or _RankCache()
    c = len(f.cut - e)
    s = tuple(sorted(f.cut & e))
    cid = (cut_ids or {}).get(f.cut, 0)
    parts = []
    for u in _components(t, f.cut - e):
        d, _, lab, _ = _derived_labelling(t, f, f.cut & e, u)
        parts.append(ranks.rank(d, lab))
    return FacetKey(c, s, cid, tuple(parts))


def facet_inversion_edges(f: Face, e: Iterable[int]) -> frozenset[int]:
    """Edges of ``cut & e`` across which the facet's inversion data has a neighbour inversion."""
    t = f.tree
    e = frozenset(e)
    out = set()
    for u in _components(t, f.cut - e):
        d, blocks, lab, _ = _derived_labelling(t, f, f.cut & e, u)
        for _, child in neighbor_inversions(d, lab):
            out.add(blocks[child][0])
    return frozenset(out)


def minimal_new_face(f: Face, e: Iterable[int]) -> frozenset[int]:
    """The claimed restriction face: three kinds of cut edges."""
    e = frozenset(e)
    outside = f.cut - e
    missing = e - f.cut
    late = frozenset(x for x in f.cut & e if missing and x > min(missing))
    return outside | late | facet_inversion_edges(f, e)


@dataclass
class ShellingCertificate:
    tree: CapacityTree
    edges: frozenset[int]
    facets: list[Face]
    keys: list[FacetKey]
    new_faces: list[frozenset[int]]

    def render(self) -> str:
        t = self.tree
        lines = []
        for i, (f, k, g) in enumerate(zip(self.facets, self.keys, self.new_faces), 1):
            word = t.edge_word(k.s) or "-"
            rank = ".".join(map(str, k.weak_rank))
            gm = t.edge_word(g) or "-"
            lines.append(f"facet {i} key=(c={k.c},S={word},cut={k.cut_id},rank={rank}) Gm={gm}  # {f.describe()}")
        return "\n".join(lines) + "\n"


def shelling_order(t: CapacityTree, e: Iterable[int], seed: int | None = None, check: bool = True) -> ShellingCertificate:
    """Facets of the ``(|e|-1)``-skeleton in ``(c, S, cut, weak rank)`` order."""
    e = frozenset(e)
    if check and not t.validate_edge_set(e):
        raise TreeError("edge set fails the distributability hypothesis")
    k = len(e) - 1
    facets = enumerate_facets(t, k)
    cuts = sorted({f.cut for f in facets}, key=lambda c: tuple(sorted(c)))
    cut_ids = {c: i for i, c in enumerate(cuts)}
    ranks = _RankCache(seed)
    keyed = sorted(((facet_key(f, e, cut_ids, ranks), i, f) for i, f in enumerate(facets)), key=lambda x: (x[0], x[1]))
    fs = [f for _, _, f in keyed]
    return ShellingCertificate(t, e, fs, [k for k, _, _ in keyed], [minimal_new_face(f, e) for f in fs])


def shell_full_distributable(t: CapacityTree, seed: int | None = None) -> ShellingCertificate:
    """Order the labellings (facets of the full complex) by the weak order."""
    if not t.is_distributable():
        raise TreeError("tree is not distributable")
    return shelling_order(t, t.edges, seed=seed, check=False)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class ShellingResult:
    ok: bool
    index: int = -1
    """1-based position of the first offending facet."""
    face: str = ""
    reason: str = ""
    gm_agrees: bool = True
    """Whether every claimed minimal new face matched the brute force."""


def verify_shelling(facets: Sequence[Face], claimed: Sequence[frozenset[int]] | None = None) -> ShellingResult:
    """Brute-force check that each facet meets the earlier ones in a pure
    codimension-one subcomplex of its boundary.

    Also reports whether the faces new at each step are exactly those above
    the claimed minimal new face.
    """
    seen: set[Face] = set()
    gm_ok = True
    first_gm_failure: ShellingResult | None = None
    for m, f in enumerate(facets, 1):
        subs = list(f.faces())
        if m > 1:
            old = {g.cut for g in subs if g in seen}
            top = len(f.cut) - 1
            for cut in old:
                if len(cut) > top:
                    return ShellingResult(False, m, f.describe(), "facet repeats an earlier facet")
                if not any(cut <= o and len(o) == top for o in old):
                    return ShellingResult(False, m, f.restrict(cut).describe(), "intersection is not pure of codimension one", gm_ok)
            if claimed is not None:
                g = claimed[m - 1]
                new = {x.cut for x in subs} - old
                if new != {x.cut for x in subs if g <= x.cut} and gm_ok:
                    gm_ok = False
                    first_gm_failure = ShellingResult(True, m, f.describe(), "new faces differ from the interval above Gm", False)
        seen.update(subs)
    if first_gm_failure is not None:
        return first_gm_failure
    return ShellingResult(True, gm_agrees=gm_ok)


def verify_certificate(cert: ShellingCertificate) -> ShellingResult:
    return verify_shelling(cert.facets, cert.new_faces)


# ---------------------------------------------------------------------------
# chessboard complexes


def chessboard_tree(m: int, n: int) -> CapacityTree:
    """A star whose full complex is the chessboard complex of an ``m`` by ``n`` board."""
    if not 1 <= m <= n:
        raise TreeError("need 1 <= m <= n")
    return star_tree(n - m, [1] * m, root_leaf=True)
