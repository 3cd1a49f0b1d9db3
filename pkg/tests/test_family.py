"""The Picard-three family: construction checks, ranks and closed-form sets."""
import random
from itertools import product

import pytest

from toricexc.cohomology import ForbiddenSet, forbidden_membership
from toricexc.errors import BadParams
from toricexc.family import (
    FamilyParams,
    build_family,
    closed_form_forbidden,
    facet_check,
    family_index_sets,
    in_K_all,
    mutate,
    printed_list_discrepancy,
    rk_k0_closed_form,
    slab_bounds,
    validate_construction,
)
from toricexc.fan import decompose_picard3, labelled_index_sets, rank_k0


@pytest.mark.parametrize("n,k,a", [(2, 2, 1), (3, 2, 1), (2, 3, 2), (3, 4, 1)])
def test_construction_is_valid(n, k, a):
    inst = build_family(n, k, a)
    report = validate_construction(inst)
    assert report["ok"], [c for c in report["checks"] if c["status"] != "pass"]
    assert facet_check(inst)


@pytest.mark.parametrize("n,k,a", [(2, 2, 1), (2, 3, 1), (3, 2, 2), (4, 3, 1)])
def test_rank_three_ways(n, k, a):
    inst = build_family(n, k, a)
    assert len(inst.fan.max_cones) == rank_k0(inst.fan) == inst.rk_k0_block_sum() == rk_k0_closed_form(n, k, a)


def test_printed_ray_list_needs_care_when_k_is_two():
    assert printed_list_discrepancy(FamilyParams(2, 2, 1)) == [(2, 1)]
    assert printed_list_discrepancy(FamilyParams(2, 3, 1)) == []


def test_unimodularity_mutation_is_detected():
    inst = build_family(2, 2, 1)
    bad = mutate(inst, (4, 1), (2, -1, 0))
    checks = {c["name"]: c for c in validate_construction(bad)["checks"]}
    assert checks["condition3_unimodular"]["status"] == "fail"
    assert abs(checks["condition3_unimodular"]["witness"]["det"]) == 2
    assert not validate_construction(bad)["ok"]


def test_bad_parameters():
    for args in [(1, 2, 1), (2, 1, 1), (2, 2, 0), (2.0, 2, 1)]:
        with pytest.raises(BadParams):
            FamilyParams(*args)


def test_labelled_sets_match_decomposition(Y221, Y321):
    for inst in (Y221, Y321):
        dec = decompose_picard3(inst.fan)
        assert dict(labelled_index_sets(dec)) == family_index_sets(inst)


def test_forbidden_closed_forms_agree_with_fibers(Y221):
    inst = Y221
    forms = closed_form_forbidden(inst)
    index = family_index_sets(inst)
    rng = random.Random(41)
    for label, f in forms.items():
        K = ForbiddenSet(inst.fan, index[label], label)
        for _ in range(40):
            L = tuple(rng.randint(-9, 9) for _ in range(3))
            assert f(*L) == forbidden_membership(K, L), (label, L)


def test_K_all_is_symmetric_under_serre_reflection(Y221):
    inst = Y221
    forms = closed_form_forbidden(inst)
    K = inst.canonical
    for L in product(range(-6, 7), range(-5, 6), range(-6, 7)):
        KL = tuple(k - x for k, x in zip(K, L))
        assert in_K_all(inst, L, forms) == in_K_all(inst, KL, forms)


def test_slab_bounds():
    assert slab_bounds(FamilyParams(2, 2, 1)) == {"amplitude": 7, "z_fixed": 25}
    assert slab_bounds(FamilyParams(3, 4, 2)) == {"amplitude": 10, "z_fixed": 48}


def test_canonical_class(Y221):
    p = Y221.params
    assert Y221.anticanonical == (p.n + 1, p.k, p.k + p.n)
    assert Y221.fan.canonical_class == Y221.canonical
