"""Integer simplicial homology of the tree complexes.

Faces are oriented by listing their cut edges in DFS order; the boundary of
a face drops one cut edge at a time (merging the two components it
separated).  Reduced homology includes the empty face in degree -1.
Everything is exact over the integers: Smith normal form with Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .complex import Face, all_faces, chessboard_tree, count_facets, enumerate_facets
from .tree import CapacityTree, TreeError

SparseMatrix = dict[int, dict[int, int]]
"""Columns are faces of the higher dimension; ``m[col][row] = entry``."""

DEFAULT_FACE_BOUND = 200_000


def boundary_matrices(faces: dict[int, list[Face]], reduced: bool = True) -> dict[int, tuple[SparseMatrix, int, int]]:
    """``k -> (matrix, rows, cols)`` for the boundary map from dimension ``k`` to ``k - 1``."""
    index = {d: {f: i for i, f in enumerate(fs)} for d, fs in faces.items()}
    out: dict[int, tuple[SparseMatrix, int, int]] = {}
    top = max(faces) if faces else -1
    for d in range(0, top + 1):
        cols: SparseMatrix = {}
        for j, f in enumerate(faces[d]):
            col: dict[int, int] = {}
            if d == 0:
                if reduced:
                    col[0] = 1
            else:
                edges = sorted(f.cut)
                for i, e in enumerate(edges):
                    g = f.restrict(edges[:i] + edges[i + 1:])
                    try:
                        row = index[d - 1][g]
                    except KeyError:
                        raise TreeError("face set is not closed under taking faces") from None
                    col[row] = col.get(row, 0) + (-1) ** i
            cols[j] = {r: v for r, v in col.items() if v}
        rows = (1 if reduced else 0) if d == 0 else len(faces[d - 1])
        out[d] = (cols, rows, len(faces[d]))
    return out


def compose_is_zero(a: tuple[SparseMatrix, int, int], b: tuple[SparseMatrix, int, int]) -> bool:
    """Check ``a @ b == 0`` where ``b`` maps into ``a``'s domain."""
    ma, mb = a[0], b[0]
    for col in mb.values():
        acc: dict[int, int] = {}
        for mid, v in col.items():
            for r, w in ma.get(mid, {}).items():
                acc[r] = acc.get(r, 0) + v * w
        if any(acc.values()):
            return False
    return True


# ---------------------------------------------------------------------------
# Smith normal form


def _dense_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero diagonal of a diagonalisation by unimodular row/column moves."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    diag = []
    t = 0
    while t < m and t < n:
        # smallest nonzero entry of the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for r in a:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        done = False
            if done:
                break
            # a smaller remainder appeared in row or column t: move it to the pivot
            best = None
            for i in range(t, m):
                if a[i][t] and (best is None or abs(a[i][t]) < abs(best[2])):
                    best = (i, t, a[i][t])
            for j in range(t, n):
                if a[t][j] and (best is None or abs(a[t][j]) < abs(best[2])):
                    best = (t, j, a[t][j])
            i, j, _ = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def _normalise(diag: list[int]) -> list[int]:
    """Turn a diagonal into invariant factors ``d1 | d2 | ...``."""
    d = sorted(x for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


def smith_normal_form(matrix: SparseMatrix | list[list[int]]) -> list[int]:
    """Invariant factors (nonzero diagonal entries) of an integer matrix.

    Accepts a dense list of rows or a sparse column map.  Unit pivots are
    eliminated sparsely first; whatever is left is reduced densely.
    """
    if isinstance(matrix, list):
        cols: SparseMatrix = {}
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                if v:
                    cols.setdefault(j, {})[i] = v
    else:
        cols = {j: dict(c) for j, c in matrix.items() if c}
    # work on rows of the transpose: each column is a sparse vector
    vecs = [c for c in cols.values() if c]
    where: dict[int, set[int]] = {}
    for k, vec in enumerate(vecs):
        for r in vec:
            where.setdefault(r, set()).add(k)
    alive = set(range(len(vecs)))
    factors = []
    progress = True
    while progress:
        progress = False
        for k in sorted(alive, key=lambda k: len(vecs[k])):
            if k not in alive:
                continue
            vec = vecs[k]
            if not vec:
                alive.discard(k)
                continue
            units = [r for r, v in vec.items() if v in (1, -1)]
            if not units:
                continue
            r = min(units, key=lambda r: len(where[r]))
            p = vec[r]
            for k2 in list(where[r]):
                if k2 == k:
                    continue
                other = vecs[k2]
                q = other[r] * p
                for rr, v in vec.items():
                    nv = other.get(rr, 0) - q * v
                    if nv:
                        if rr not in other:
                            where.setdefault(rr, set()).add(k2)
                        other[rr] = nv
                    elif rr in other:
                        del other[rr]
                        where[rr].discard(k2)
            for rr in vec:
                where[rr].discard(k)
            alive.discard(k)
            factors.append(1)
            progress = True
    rest = [vecs[k] for k in sorted(alive) if vecs[k]]
    if rest:
        rows = sorted({r for vec in rest for r in vec})
        pos = {r: i for i, r in enumerate(rows)}
        dense = [[0] * len(rest) for _ in rows]
        for j, vec in enumerate(rest):
            for r, v in vec.items():
                dense[pos[r]][j] = v
        factors.extend(_dense_factors(dense))
    return _normalise(factors)


# ---------------------------------------------------------------------------
# homology


@dataclass
class ChainComplexSummary:
    face_counts: dict[int, int]
    """Faces per dimension; dimension -1 is the empty face in reduced homology."""
    betti: dict[int, int] = field(default_factory=dict)
    torsion: dict[int, list[int]] = field(default_factory=dict)
    ranks: dict[int, int] = field(default_factory=dict)
    """Rank of the boundary map out of each dimension."""

    @property
    def top(self) -> int:
        return max(self.face_counts)

    def vanishes_through(self, k: int) -> bool:
        return all(self.betti.get(d, 0) == 0 and not self.torsion.get(d) for d in range(-1, k + 1))

    def euler_from_faces(self) -> int:
        return sum((1 if d % 2 == 0 else -1) * c for d, c in self.face_counts.items())

    def euler_from_homology(self) -> int:
        return sum((1 if d % 2 == 0 else -1) * b for d, b in self.betti.items())

    def render(self) -> str:
        lines = []
        for d in sorted(self.betti):
            parts = [f"Z^{self.betti[d]}"] + [f"Z/{x}" for x in self.torsion.get(d, [])]
            lines.append(f"H~_{d} = " + " + ".join(parts))
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        return "".join(f"{d},{self.betti[d]},{' '.join(map(str, self.torsion.get(d, [])))}\n" for d in sorted(self.betti))


def homology_of_faces(faces: dict[int, list[Face]], reduced: bool = True) -> ChainComplexSummary:
    mats = boundary_matrices(faces, reduced)
    counts = {d: len(fs) for d, fs in faces.items()}
    if reduced:
        counts[-1] = 1
    factors = {d: smith_normal_form(m[0]) for d, m in mats.items()}
    ranks = {d: len(f) for d, f in factors.items()}
    s = ChainComplexSummary(dict(sorted(counts.items())), ranks=ranks)
    low = -1 if reduced else 0
    for d in range(low, max(faces) + 1):
        out_rank = ranks.get(d, 0)
        in_rank = ranks.get(d + 1, 0)
        s.betti[d] = counts[d] - out_rank - in_rank
        s.torsion[d] = [x for x in factors.get(d + 1, []) if x > 1]
    return s


def complex_faces(t: CapacityTree, k: int | None = None, bound: int = DEFAULT_FACE_BOUND) -> dict[int, list[Face]]:
    """Faces of the full complex, or of its ``k``-skeleton."""
    top = t.n - 2 if k is None else k
    total = sum(count_facets(t, d) for d in range(0, top + 1))
    if total > bound:
        raise TreeError(f"{total} faces exceed the bound {bound}")
    return all_faces(t, top)


def reduced_homology(t: CapacityTree, k: int | None = None, bound: int = DEFAULT_FACE_BOUND) -> ChainComplexSummary:
    """Reduced integral homology of the tree complex (or its ``k``-skeleton)."""
    if t.n < 2:
        raise TreeError("a single vertex gives the empty complex")
    return homology_of_faces(complex_faces(t, k, bound))


def verify_connectivity_consequence(t: CapacityTree) -> bool:
    """Reduced homology vanishes in every degree up to ``n - b - 1``."""
    if any(c != 1 for c in t.caps):
        raise TreeError("capacities must all be one")
    if not t.root_is_leaf:
        raise TreeError("root is not a leaf")
    b = len(t.leaves)
    s = reduced_homology(t)
    return s.vanishes_through(t.n - b - 1)


def nu(m: int, n: int) -> int:
    if m < 1 or n < 1:
        raise TreeError("m and n must be positive")
    return min(m, n, (m + n + 1) // 3) - 1


def chessboard_homology(m: int, n: int) -> ChainComplexSummary:
    return reduced_homology(chessboard_tree(m, n))


@dataclass
class ObstructionReport:
    m: int
    n: int
    homology: ChainComplexSummary
    distributable: bool
    low_degree: list[int]
    """Degrees below the top with nonzero reduced homology."""
    top_torsion: list[int]
    torsion_degrees: list[int]

    @property
    def obstructed(self) -> bool:
        return bool(self.low_degree or self.top_torsion)

    def render(self) -> str:
        top = self.m - 1
        lines = [f"chessboard complex M_{{{self.m},{self.n}}}: dimension {top}, centre capacity {self.n - self.m}"]
        lines.append(self.homology.render().rstrip("\n"))
        if self.torsion_degrees:
            lines.append("torsion in degrees: " + ", ".join(map(str, self.torsion_degrees)))
        if self.obstructed:
            why = []
            if self.low_degree:
                why.append("nonzero reduced homology below the top degree in degree(s) " + ", ".join(map(str, self.low_degree)))
            if self.top_torsion:
                why.append("torsion in top homology")
            lines.append("fired: " + "; ".join(why))
            lines.append("=> the complex is not shellable (a shellable complex is a wedge of top-dimensional spheres)")
            lines.append("=> the star admits no inversion function")
            lines.append("=> no greedy sorting algorithm based on inversions exists for this star")
        else:
            lines.append("no obstruction: homology is free and concentrated in the top degree")
        lines.append(f"distributable: {'yes' if self.distributable else 'no'}")
        return "\n".join(lines) + "\n"


def sorting_obstruction_report(m: int, n: int) -> ObstructionReport:
    t = chessboard_tree(m, n)
    top = m - 1
    s = reduced_homology(t) if m >= 2 else homology_of_faces({0: enumerate_facets(t, 0)})
    low = [d for d in sorted(s.betti) if d < top and (s.betti[d] or s.torsion.get(d))]
    tors = [d for d in sorted(s.torsion) if s.torsion[d]]
    return ObstructionReport(m, n, s, t.is_distributable(), low, list(s.torsion.get(top, [])), tors)
