"""Exhaustive generators for small trees."""

from __future__ import annotations

from typing import Iterator

from .tree import CapacityTree


def ordered_trees(n: int) -> Iterator[list[int | None]]:
    """Parent arrays (in preorder) of every plane rooted tree on ``n`` vertices."""
    if n < 1:
        return
    if n == 1:
        yield [None]
        return

    # a new preorder vertex hangs off some vertex on the rightmost path
    def rec(parents: list[int | None], rightmost: list[int]) -> Iterator[list[int | None]]:
        if len(parents) == n:
            yield list(parents)
            return
        for k, p in enumerate(rightmost):
            parents.append(p)
            yield from rec(parents, rightmost[: k + 1] + [len(parents) - 1])
            parents.pop()

    yield from rec([None], [0])


def _degrees(parents: list[int | None]) -> list[int]:
    deg = [0] * len(parents)
    for v, p in enumerate(parents):
        if p is not None:
            deg[v] += 1
            deg[p] += 1
    return deg


def capacity_trees(max_n: int, max_total: int, leaf_root: bool = True, distributable: bool = True) -> Iterator[CapacityTree]:
    """Every plane tree with at most ``max_n`` vertices and ``1..max_total`` labels."""
    for n in range(1, max_n + 1):
        for par in ordered_trees(n):
            deg = _degrees(par)
            if leaf_root and n > 1 and deg[0] != 1:
                continue
            lo = [max(0, d - 1) if distributable else 0 for d in deg]

            def rec(i: int, caps: list[int], tot: int) -> Iterator[list[int]]:
                if i == n:
                    if tot >= 1:
                        yield list(caps)
                    return
                for c in range(lo[i], max_total - tot + 1):
                    caps.append(c)
                    yield from rec(i + 1, caps, tot + c)
                    caps.pop()

            for caps in rec(0, [], 0):
                yield CapacityTree.from_parents(par, caps)


def unit_trees(n: int, leaf_root: bool = True) -> Iterator[CapacityTree]:
    """Plane trees on ``n`` vertices with every capacity equal to one."""
    for par in ordered_trees(n):
        t = CapacityTree.from_parents(par, [1] * n)
        if leaf_root and n > 1 and not t.root_is_leaf:
            continue
        yield t
