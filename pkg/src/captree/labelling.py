"""Labellings: which labels each vertex holds.

A full labelling is a tuple indexed by vertex.  Operations that work on part
of a tree take a mapping from vertices to label sets instead; the two forms
convert freely.
"""

from __future__ import annotations

import re
from itertools import combinations
from math import factorial
from typing import Iterable, Iterator, Mapping

from .tree import CapacityTree, TreeError

Labelling = tuple[frozenset[int], ...]


def to_map(lab: Labelling | Mapping[int, frozenset[int]]) -> dict[int, frozenset[int]]:
    if isinstance(lab, Mapping):
        return dict(lab)
    return {v: s for v, s in enumerate(lab)}


def to_tuple(t: CapacityTree, assignment: Mapping[int, Iterable[int]]) -> Labelling:
    return tuple(frozenset(assignment.get(v, ())) for v in range(t.n))


def check_labelling(t: CapacityTree, assignment: Mapping[int, Iterable[int]], labels: Iterable[int] | None = None) -> None:
    """Raise unless every vertex holds exactly its capacity and no label repeats."""
    seen: set[int] = set()
    for v, labs in assignment.items():
        labs = set(labs)
        if len(labs) != t.caps[v]:
            raise TreeError(f"vertex {t.ids[v]} holds {len(labs)} labels but has capacity {t.caps[v]}")
        if seen & labs:
            raise TreeError(f"label {min(seen & labs)} assigned twice")
        seen |= labs
    if labels is not None and seen != set(labels):
        raise TreeError("labels do not match the expected label set")


def count_labellings(t: CapacityTree, vertices: Iterable[int] | None = None) -> int:
    verts = range(t.n) if vertices is None else list(vertices)
    caps = [t.caps[v] for v in verts]
    n = factorial(sum(caps))
    for c in caps:
        n //= factorial(c)
    return n


def all_labellings(t: CapacityTree, vertices: Iterable[int] | None = None, labels: Iterable[int] | None = None) -> Iterator[dict[int, frozenset[int]]]:
    """Every way to deal ``labels`` onto ``vertices`` filling each capacity."""
    verts = list(range(t.n)) if vertices is None else sorted(vertices)
    labs = tuple(sorted(range(1, t.total_capacity + 1) if labels is None else labels))
    if sum(t.caps[v] for v in verts) != len(labs):
        raise TreeError("label count does not match capacity")

    def rec(i: int, left: tuple[int, ...]) -> Iterator[dict[int, frozenset[int]]]:
        if i == len(verts):
            yield {}
            return
        v = verts[i]
        for pick in combinations(left, t.caps[v]):
            rest = tuple(x for x in left if x not in pick)
            for tail in rec(i + 1, rest):
                tail[v] = frozenset(pick)
                yield tail

    for a in rec(0, labs):
        yield {v: a[v] for v in verts}


def sorted_labelling(t: CapacityTree) -> Labelling:
    return t.sorted_assignment()


_ASSIGN = re.compile(r"^assign\s+(\S+)\s*=\s*\{([^}]*)\}\s*$")


def parse_labelling(t: CapacityTree, text: str, partial: bool = False) -> dict[int, frozenset[int]]:
    """Read ``assign <id> = {k1,k2,...}`` lines (``#`` starts a comment)."""
    out: dict[int, frozenset[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ASSIGN.match(line)
        if not m:
            raise TreeError(f"line {lineno}: expected 'assign <id> = {{...}}'")
        v = t.index(m.group(1))
        if v in out:
            raise TreeError(f"line {lineno}: vertex {m.group(1)} assigned twice")
        body = m.group(2).strip()
        try:
            labs = frozenset(int(x) for x in body.split(",")) if body else frozenset()
        except ValueError:
            raise TreeError(f"line {lineno}: labels must be integers") from None
        out[v] = labs
    if not partial:
        for v in range(t.n):
            if v not in out:
                if t.caps[v]:
                    raise TreeError(f"vertex {t.ids[v]} has no assignment")
                out[v] = frozenset()
    check_labelling(t, out, None if partial else range(1, t.total_capacity + 1))
    return dict(sorted(out.items()))


def format_labelling(t: CapacityTree, assignment: Labelling | Mapping[int, frozenset[int]]) -> str:
    a = to_map(assignment)
    return "".join(f"assign {t.ids[v]} = {{{','.join(map(str, sorted(a[v])))}}}\n" for v in sorted(a))


def inline(t: CapacityTree, assignment: Labelling | Mapping[int, frozenset[int]]) -> str:
    """Compact one-line form, e.g. ``v1[3] v2[5,6]``."""
    a = to_map(assignment)
    return " ".join(f"{t.ids[v]}[{','.join(map(str, sorted(a[v])))}]" for v in sorted(a))
