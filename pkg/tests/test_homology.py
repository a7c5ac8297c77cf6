import itertools
import random
from fractions import Fraction
from math import gcd

import pytest

from captree import TreeError, path_tree, star_tree
from captree.complex import all_faces, chessboard_tree
from captree.homology import (
    boundary_matrices,
    chessboard_homology,
    compose_is_zero,
    homology_of_faces,
    nu,
    reduced_homology,
    smith_normal_form,
    sorting_obstruction_report,
    verify_connectivity_consequence,
)


def det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def invariant_factors(m):
    """Invariant factors as ratios of determinantal divisors."""
    rows, cols = len(m), len(m[0])
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                g = gcd(g, det([[m[i][j] for j in c] for i in r]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


def rational_rank(cols, n_rows):
    rows = [[Fraction(0)] * len(cols) for _ in range(n_rows)]
    for j, col in enumerate(cols.values()):
        for i, v in col.items():
            rows[i][j] = Fraction(v)
    rank = 0
    for c in range(len(cols)):
        piv = next((r for r in range(rank, n_rows) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(n_rows):
            if r != rank and rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def test_snf_known_matrix():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_snf_matches_determinantal_divisors():
    rng = random.Random(2024)
    for _ in range(150):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        m = [[rng.choice([0, 0, 1, -1, 2, 3, -4, 6]) for _ in range(c)] for _ in range(r)]
        assert smith_normal_form(m) == invariant_factors(m), m


def test_snf_of_zero_and_sparse_input():
    assert smith_normal_form([[0, 0], [0, 0]]) == []
    assert smith_normal_form({0: {0: 2}, 1: {1: 3}}) == [1, 6]


def test_boundary_squares_to_zero():
    t = star_tree(2, [1, 1, 1])
    mats = boundary_matrices(all_faces(t))
    for d in range(1, max(mats) + 1):
        assert compose_is_zero(mats[d - 1], mats[d])


def test_betti_numbers_match_rational_ranks():
    for t in (star_tree(2, [1, 1, 1]), chessboard_tree(3, 4), path_tree([1, 2, 1])):
        faces = all_faces(t)
        mats = boundary_matrices(faces)
        h = homology_of_faces(faces)
        counts = {d: len(f) for d, f in faces.items()} | {-1: 1}
        ranks = {d: rational_rank(m[0], m[1]) for d, m in mats.items()}
        for d in range(-1, max(faces) + 1):
            assert h.betti[d] == counts[d] - ranks.get(d, 0) - ranks.get(d + 1, 0)
        assert h.euler_from_faces() == h.euler_from_homology()


def test_small_chessboards():
    # M_{2,3} is a hexagon, M_{2,2} two points joined twice: two disjoint edges
    h = chessboard_homology(2, 3)
    assert (h.betti[0], h.betti[1]) == (0, 1)
    h = chessboard_homology(2, 2)
    assert (h.betti[0], h.betti[1]) == (1, 0)


def test_m34_is_a_torus():
    h = chessboard_homology(3, 4)
    assert [h.betti[d] for d in range(-1, 3)] == [0, 0, 2, 1]
    assert not any(h.torsion.values())


def test_m55_has_three_torsion():
    h = chessboard_homology(5, 5)
    assert h.torsion[2] == [3]
    assert h.betti[3] == 56
    assert h.vanishes_through(1)


def test_chessboard_connectivity_bound():
    for m in range(1, 4):
        for n in range(m, 7):
            assert chessboard_homology(m, n).vanishes_through(nu(m, n) - 1)


def test_nu_values():
    assert nu(3, 4) == 1 and nu(5, 5) == 2 and nu(2, 3) == 1 and nu(1, 5) == 0
    with pytest.raises(TreeError):
        nu(0, 3)


def test_connectivity_consequence_on_small_unit_trees():
    from captree.generate import unit_trees

    for n in range(2, 6):
        for t in unit_trees(n):
            assert verify_connectivity_consequence(t)
    with pytest.raises(TreeError):
        verify_connectivity_consequence(path_tree([1, 2]))


def test_skeleton_homology():
    t = path_tree([1, 1, 1, 1])
    h = reduced_homology(t, 0)
    assert h.top == 0
    assert h.betti[0] == len(all_faces(t, 0)[0]) - 1


def test_render_and_csv():
    h = chessboard_homology(2, 3)
    assert "H~_1 = Z^1" in h.render()
    assert "1,1,\n" in h.csv()


def test_obstruction_reports():
    rep = sorting_obstruction_report(3, 4)
    assert rep.obstructed and rep.low_degree == [1]
    assert "not shellable" in rep.render()
    rep = sorting_obstruction_report(2, 5)
    assert not rep.obstructed and rep.distributable
    rep = sorting_obstruction_report(5, 5)
    assert rep.torsion_degrees == [2]
