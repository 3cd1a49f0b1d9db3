"""Strong collections from lattice points of the shifted half polytope."""
from fractions import Fraction

import pytest

from conftest import p1_cubed_fan
from toricexc.errors import NotNefFano, NotPicardThree
from toricexc.exceptional import MembershipOracle, is_strong_exceptional
from toricexc.fan import make_fan, rank_k0
from toricexc.strong import (
    best_shift,
    build_strong_collection,
    check_direct_enumeration,
    count_2d,
    shift_polytope,
    shoelace,
    zonotope_vertices,
)


def hirzebruch_times_line(r):
    rays = [(1, 0, 0), (0, 1, 0), (-1, r, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    quads = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return make_fan(rays, [(a, b, c) for a, b in quads for c in (4, 5)])


def test_zonotope_area_two_ways():
    gens = [(1, 0), (0, 1), (1, 1), (2, -1)]
    verts = zonotope_vertices(gens)
    assert len(verts) == 8
    pairs = sum(abs(u[0] * v[1] - u[1] * v[0]) for i, u in enumerate(gens) for v in gens[i + 1:])
    assert shoelace(verts) == pairs
    assert shoelace(zonotope_vertices([(1, 0), (2, 0), (0, 3)])) == 9


@pytest.mark.parametrize("which", ["P1cubed", "Y221", "Y321"])
def test_volume_identities(which, P1cubed, Y221, Y321):
    fan = {"P1cubed": P1cubed, "Y221": Y221.fan, "Y321": Y321.fan}[which]
    sp = shift_polytope(fan)
    assert sp.volume == sp.volume_pairs
    assert sp.zonotope_area == sp.zonotope_area_hull
    assert sp.jacobian == abs(sum(l * k for l, k in zip(sp.ell, sp.kappa)))
    assert sp.volume >= 6 * rank_k0(fan)


def test_cube_volume(P1cubed):
    assert shift_polytope(P1cubed).volume == 48


def test_arrangement_maximum_beats_grid_samples(Y221):
    sp = shift_polytope(Y221.fan)
    _, best, _ = best_shift(sp)
    grid = [(Fraction(i, 14), Fraction(j, 14)) for i in range(14) for j in range(14)]
    grid += [(Fraction(2 * i + 1, 30), Fraction(2 * j + 1, 22)) for i in range(15) for j in range(11)]
    assert max(count_2d(sp, p) for p in grid) <= best
    # translation by a lattice vector does not change the count
    p, _, _ = best_shift(sp)
    assert count_2d(sp, (p[0] + 3, p[1] - 2)) == best


def test_fiber_count_matches_polyhedral_enumeration(P1cubed, Y221):
    for fan in (P1cubed, Y221.fan):
        sp = shift_polytope(fan)
        p2, count, _ = best_shift(sp)
        assert check_direct_enumeration(sp, p2) == sp.g * count


def test_collection_on_cube():
    fan = p1_cubed_fan()
    col = build_strong_collection(fan)
    assert len(col) >= 6
    assert is_strong_exceptional(fan, col.bundles).ok


def test_collection_on_Y221(Y221):
    fan = Y221.fan
    col = build_strong_collection(fan, jobs=2)
    assert len(col) >= 27
    assert all(t["ok"] for t in col.certificate)
    assert len(col.certificate) == len(col) * (len(col) - 1) // 2
    assert is_strong_exceptional(fan, col.bundles, MembershipOracle(fan)).ok
    # the order by l is what makes the collection strong
    ell = col.report["polytope"]["ell"]
    values = [sum(a * b for a, b in zip(ell, L)) for L in col.bundles]
    assert values == sorted(values)


def test_preconditions(P2):
    with pytest.raises(NotPicardThree):
        build_strong_collection(P2)
    with pytest.raises(NotNefFano):
        build_strong_collection(hirzebruch_times_line(3))
