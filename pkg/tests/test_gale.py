import random
from fractions import Fraction
from itertools import combinations

import pytest

from toricexc.errors import NotSpanning, PrecondViolated
from toricexc.gale import (
    GaleDualPair,
    check_basis_duality,
    contains_origin_interior,
    dual_from_divisors,
    gale_dual,
    polytope_predicates,
    relation_to_functional,
    relations,
    unimodularly_equivalent,
    volume_duality_check,
)
from toricexc.linalg import rank


def random_configuration(rng, with_torsion=False):
    while True:
        d = rng.randint(1, 3)
        n = d + rng.randint(1, 3)
        vs = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(n)]
        if with_torsion:
            vs = [tuple(2 * x if i == 0 else x for i, x in enumerate(v)) for v in vs]
        if rank(vs) == d:
            return vs


def in_D(pair, coeffs):
    """Whether ``sum c_i E_i`` vanishes in ``D`` (free part and torsion)."""
    m = pair.dual_rank
    free = [sum(c * e[r] for c, e in zip(coeffs, pair.dual)) for r in range(m)]
    tors = [sum(c * t[j] for c, t in zip(coeffs, pair.torsion)) % o for j, o in enumerate(pair.torsion_orders)]
    return not any(free) and not any(tors)


def test_projective_plane_dual():
    pair = gale_dual([(1, 0), (0, 1), (-1, -1)])
    assert pair.dual == ((1,), (1,), (1,))
    assert pair.torsion_orders == ()
    assert pair.canonical_class() == (-3,)


def test_weighted_projective_line_has_no_torsion_but_stacky_line_does():
    assert gale_dual([(2,), (-3,)]).torsion_orders == ()
    pair = gale_dual([(2,), (-2,)])
    assert pair.torsion_orders == (2,)
    assert pair.torsion_size == 2


def test_not_spanning():
    with pytest.raises(NotSpanning):
        gale_dual([(1, 0), (2, 0)])


@pytest.mark.parametrize("torsion", [False, True])
def test_round_trip_and_relations(torsion):
    rng = random.Random(21 + torsion)
    for _ in range(60):
        vs = random_configuration(rng, torsion)
        pair = gale_dual(vs)
        back = dual_from_divisors(pair.dual, pair.torsion_orders, pair.torsion)
        assert unimodularly_equivalent(back.primal, vs)
        # functionals on the primal side are relations on the dual side
        u = [rng.randint(-4, 4) for _ in range(len(vs[0]))]
        assert in_D(pair, [sum(a * b for a, b in zip(u, v)) for v in vs])
        # relations on the primal side are functionals on the dual side
        for a in relations(vs):
            phi = relation_to_functional(pair, a)
            assert phi is not None
            assert all(x.denominator == 1 for x in map(Fraction, phi))
            assert [sum(p * e for p, e in zip(phi, E)) for E in pair.dual] == list(a)


def test_volume_identity_and_basis_duality():
    rng = random.Random(23)
    for _ in range(80):
        vs = random_configuration(rng, rng.random() < 0.3)
        pair = gale_dual(vs)
        d = pair.primal_rank
        for A in combinations(range(pair.n), d):
            rest = [j for j in range(pair.n) if j not in A]
            lhs, rhs = volume_duality_check(pair, list(A) + rest)
            assert lhs == rhs
            p, q = check_basis_duality(pair, A)
            assert p == q


def test_json_round_trip():
    pair = gale_dual([(2,), (-2,), (1,)])
    assert GaleDualPair.from_json(pair.to_json()) == pair


def test_polytope_predicates():
    square = gale_dual([(1, 0), (-1, 0), (0, 1), (0, -1)])
    pr = polytope_predicates(square)
    assert pr.is_vertex_set and pr.is_simplicial
    assert sorted(pr.facet_complements) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    # a point in the middle of an edge spoils both properties
    edge = gale_dual([(1, -1), (1, 0), (1, 1), (-1, 0)])
    pr = polytope_predicates(edge)
    assert not pr.is_vertex_set and not pr.is_simplicial
    cube = gale_dual([(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)])
    pr = polytope_predicates(cube)
    assert pr.is_vertex_set and not pr.is_simplicial
    assert len(pr.facet_complements) == 6
    with pytest.raises(PrecondViolated):
        polytope_predicates(gale_dual([(1, 0), (0, 1), (1, 1)]))


def test_origin_interior():
    ok, w = contains_origin_interior([(1, 0), (1, 1), (1, -1)])
    assert ok and all(w[0] * e[0] + w[1] * e[1] > 0 for e in [(1, 0), (1, 1), (1, -1)])
    ok, _ = contains_origin_interior([(1,), (-1,)])
    assert not ok
