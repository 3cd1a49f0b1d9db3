"""Exact LP and lattice-point routines checked by brute force and certificates."""
import random
from fractions import Fraction
from itertools import product

import pytest

from toricexc.errors import DimensionTooLarge, UnboundedPolyhedron
from toricexc.polyhedra import (
    Polyhedron,
    enumerate_lattice_points,
    integer_feasible,
    is_farkas_certificate,
    lp_feasible,
    project,
    recession_direction,
)


def random_polyhedron(rng, dim, rows, strict_prob=0.3, box=None):
    A, b, s = [], [], []
    for _ in range(rows):
        A.append(tuple(rng.randint(-4, 4) for _ in range(dim)))
        b.append(Fraction(rng.randint(-6, 10), rng.randint(1, 3)))
        s.append(rng.random() < strict_prob)
    if box is not None:
        for i in range(dim):
            e = tuple(int(j == i) for j in range(dim))
            A += [e, tuple(-x for x in e)]
            b += [box, box]
            s += [False, False]
    return Polyhedron(dim, tuple(A), tuple(b), tuple(s))


def brute_points(P, box):
    return [x for x in product(range(-box, box + 1), repeat=P.dim) if P.contains(x)]


def test_lp_results_are_self_certifying():
    rng = random.Random(11)
    for _ in range(400):
        P = random_polyhedron(rng, rng.randint(1, 4), rng.randint(1, 7))
        res = lp_feasible(P)
        assert res.check(P)


def test_lp_feasibility_matches_fine_grid_when_a_point_exists():
    rng = random.Random(12)
    for _ in range(200):
        P = random_polyhedron(rng, 2, rng.randint(2, 5), box=4)
        grid = [(Fraction(i, 6), Fraction(j, 6)) for i in range(-24, 25) for j in range(-24, 25)]
        if any(P.contains(x) for x in grid):
            assert lp_feasible(P).feasible


def test_elimination_keeps_rows_needed_later():
    # once produced an infeasible witness: the dominated duplicate row was
    # the only one whose combination survived the support-size rule
    g = [(Fraction(10, 3), Fraction(1, 3)), (Fraction(10, 3), Fraction(4, 3)), (Fraction(-20, 3), Fraction(-5, 3))]
    le = [((-g[1][0], -g[1][1]), 0), ((-g[2][0], -g[2][1]), 0), ((g[0][0], g[0][1]), 0)]
    P = Polyhedron.build(2, le=le, eq=[((1, 0), 1)])
    res = lp_feasible(P)
    assert not res.feasible
    assert is_farkas_certificate(P, res.certificate)


def test_strict_rows_use_motzkin_certificates():
    P = Polyhedron.build(1, lt=[((1,), 0), ((-1,), 0)])
    res = lp_feasible(P)
    assert not res.feasible and res.check(P)
    Q = Polyhedron.build(1, le=[((1,), 0), ((-1,), 0)])
    assert lp_feasible(Q).feasible


def test_integer_points_match_brute_force():
    rng = random.Random(13)
    for _ in range(150):
        dim = rng.randint(1, 3)
        P = random_polyhedron(rng, dim, rng.randint(1, 5), box=3)
        assert sorted(enumerate_lattice_points(P)) == sorted(brute_points(P, 3))
        assert integer_feasible(P).feasible == bool(brute_points(P, 3))


def test_integer_feasibility_in_unbounded_regions():
    # a thin unbounded strip containing no integer points
    P = Polyhedron.build(2, le=[((2, -2), 1), ((-2, 2), -1)])
    res = integer_feasible(P)
    assert not res.feasible
    # a cone containing lattice points far from the origin only
    Q = Polyhedron.build(2, lt=[((-1, 0), -Fraction(1, 2)), ((1, -1), 0)])
    res = integer_feasible(Q)
    assert res.feasible and Q.contains(res.witness)
    assert recession_direction(Q) is not None
    with pytest.raises(UnboundedPolyhedron):
        enumerate_lattice_points(Q)


def test_dimension_guard():
    P = Polyhedron.build(5, le=[((1, 0, 0, 0, 0), 1)])
    with pytest.raises(DimensionTooLarge):
        integer_feasible(P)


def test_projection_contains_shadows():
    rng = random.Random(14)
    for _ in range(60):
        P = random_polyhedron(rng, 3, 5, strict_prob=0, box=3)
        Q = project(P, 2)
        for x in brute_points(P, 3):
            assert Q.contains(x[:2])
