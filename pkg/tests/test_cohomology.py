"""Cohomology of line bundles against Kunneth, binomials, Riemann-Roch and duality."""
import random
from itertools import product
from math import comb

import pytest

from conftest import hirzebruch_fan
from toricexc.cohomology import (
    ForbiddenSet,
    SimplicialComplex,
    cohomology,
    complex_CI,
    forbidden_index_sets,
    forbidden_membership,
    member_labels,
    reduced_homology,
    union_of_primitives_check,
    unions_of_primitives,
    vanishing,
)
from toricexc.fan import decompose_picard3, nonzero_homology_index_sets


def p1_table(a):
    return (max(a + 1, 0), max(-a - 1, 0))


def p2_table(d):
    h0 = comb(d + 2, 2) if d >= 0 else 0
    h2 = comb(-d - 1, 2) if d <= -3 else 0
    return (h0, 0, h2)


def kunneth(*tables):
    out = [1]
    for t in tables:
        new = [0] * (len(out) + len(t) - 1)
        for i, x in enumerate(out):
            for j, y in enumerate(t):
                new[i + j] += x * y
        out = new
    return tuple(out)


def combo(fan, coeffs):
    """Class of ``sum c_j D_j`` in the fan's Pic coordinates."""
    m = fan.picard_rank
    return tuple(sum(c * fan.divisors[j][r] for j, c in coeffs.items()) for r in range(m))


def test_reduced_homology_of_small_complexes():
    empty = SimplicialComplex((), frozenset())
    assert reduced_homology(empty).ranks[-1] == 1
    circle = SimplicialComplex.from_facets(range(3), [(0, 1), (1, 2), (0, 2)])
    h = reduced_homology(circle)
    assert h.rank(1) == 1 and h.rank(0) == 0
    disk = SimplicialComplex.from_facets(range(3), [(0, 1, 2)])
    assert reduced_homology(disk).is_zero()
    # six-vertex projective plane: only torsion in degree one
    rp2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (2, 3, 5), (1, 3, 4), (1, 3, 5), (2, 4, 5)]
    h = reduced_homology(SimplicialComplex.from_facets(range(6), rp2))
    assert h.is_zero() and h.torsion.get(1) == [2]


@pytest.mark.parametrize("d", range(-5, 6))
def test_projective_line(P1, d):
    assert cohomology(P1, (d,)).h == p1_table(d)


@pytest.mark.parametrize("d", range(-5, 6))
def test_projective_plane(P2, d):
    assert cohomology(P2, combo(P2, {0: d})).h == p2_table(d)


def test_product_of_lines(P1P1, P1cubed):
    for a, b in product(range(-3, 3), repeat=2):
        assert cohomology(P1P1, combo(P1P1, {0: a, 2: b})).h == kunneth(p1_table(a), p1_table(b))
    data = forbidden_index_sets(P1cubed)
    rng = random.Random(31)
    for _ in range(25):
        a, b, c = (rng.randint(-4, 3) for _ in range(3))
        L = combo(P1cubed, {0: a, 2: b, 4: c})
        assert cohomology(P1cubed, L, data).h == kunneth(p1_table(a), p1_table(b), p1_table(c))


def test_riemann_roch_on_hirzebruch_surface():
    F = hirzebruch_fan(1)
    # rays (1,0),(0,1),(-1,1),(0,-1): D_0 = D_2 is a fiber, D_3 = D_1 + D_0 has D_3^2 = 1
    rng = random.Random(32)
    data = forbidden_index_sets(F)
    for _ in range(20):
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        D2 = 2 * a * b + b * b
        DK = -2 * a - 3 * b  # K = -(D_0 + 2 D_3)
        chi = (D2 - DK) // 2 + 1
        h = cohomology(F, combo(F, {0: a, 3: b}), data).h
        assert h[0] - h[1] + h[2] == chi


def test_serre_duality_on_Y221(Y221):
    fan = Y221.fan
    data = forbidden_index_sets(fan)
    K = fan.canonical_class
    rng = random.Random(33)
    for _ in range(15):
        L = tuple(rng.randint(-5, 5) for _ in range(3))
        KL = tuple(k - x for k, x in zip(K, L))
        assert cohomology(fan, L, data).h == cohomology(fan, KL, data).h[::-1]
        assert vanishing(fan, L, data=data) == (not member_labels(fan, L, data))


def test_membership_witnesses(Y221):
    fan = Y221.fan
    data = forbidden_index_sets(fan)
    rng = random.Random(34)
    found = 0
    for _ in range(40):
        L = tuple(rng.randint(-8, 8) for _ in range(3))
        for label, I in data.sets:
            ok, r = forbidden_membership(ForbiddenSet(fan, tuple(I), label), L, witness=True)
            if not ok:
                continue
            found += 1
            assert all((x <= -1) if j in I else (x >= 0) for j, x in enumerate(r))
            cls = tuple(sum(r[j] * fan.divisors[j][c] for j in range(fan.n_rays)) for c in range(3))
            assert cls == L
    assert found > 0


def test_forbidden_sets_match_exhaustive_homology(P1cubed, Y221):
    for fan in (P1cubed, Y221.fan):
        dec = decompose_picard3(fan)
        exhaustive = {()} | {I for I in unions_of_primitives(fan) if not reduced_homology(complex_CI(fan, I)).is_zero()}
        assert exhaustive == set(nonzero_homology_index_sets(dec))


def test_union_of_primitives_witness(P1P1):
    ok, w = union_of_primitives_check(P1P1, (0, 1, 2, 3))
    assert ok and sorted(w) == [(0, 1), (2, 3)]
    assert union_of_primitives_check(P1P1, (0, 2)) == (False, [])
