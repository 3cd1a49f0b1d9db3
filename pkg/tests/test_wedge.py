"""The cyclic wedge inequality on random and hand-made configurations."""
import random
from fractions import Fraction

import pytest

from toricexc.errors import InvalidConfig
from toricexc.wedge import (
    WedgeConfig,
    find_functional,
    random_config,
    run_samples,
    sides,
    sublemma_check,
    validate,
    wedge,
)


def test_triangle_gives_equality():
    cfg = WedgeConfig(((1, 0), (0, 1), (-1, -1)))
    assert sublemma_check(cfg) == (3, 3, True)


def test_every_t1_case_is_an_equality():
    rng = random.Random(51)
    for _ in range(50):
        lhs, rhs = sides(random_config(1, rng))
        assert lhs == rhs


def test_degenerate_configurations():
    zeros = WedgeConfig(((0, 0),) * 5)
    assert sublemma_check(zeros) == (0, 0, True)
    line = WedgeConfig(((1, 0), (-1, 0), (0, 0)))
    assert sublemma_check(line)[2]


def test_regular_pentagon_like_configuration():
    g = ((2, 0), (1, 2), (-2, 1), (-2, -1), (1, -2))
    assert sum(v[0] for v in g) == 0 and sum(v[1] for v in g) == 0
    lhs, rhs, ok = sublemma_check(WedgeConfig(g))
    assert ok and lhs > rhs


def test_given_functionals_are_checked():
    g = ((1, 0), (0, 1), (-1, -1))
    fs = validate(WedgeConfig(g))
    assert validate(WedgeConfig(g, fs)) == fs
    for i, f in enumerate(fs):
        assert f == find_functional(g, i, 1)
    with pytest.raises(InvalidConfig):
        validate(WedgeConfig(g, ((1, 0), (1, 0), (1, 0))))
    with pytest.raises(InvalidConfig):
        validate(WedgeConfig(g, ((0, 0),) + fs[1:]))


@pytest.mark.parametrize(
    "g,reason",
    [
        (((1, 0), (0, 1)), "odd"),
        (((1, 0), (0, 1), (1, 1)), "sum"),
        (((1, 0), (-1, -1), (0, 1)), "^"),
    ],
)
def test_invalid_configurations(g, reason):
    with pytest.raises(InvalidConfig, match=reason if reason != "^" else r"\^"):
        validate(WedgeConfig(g))


@pytest.mark.parametrize("t", [2, 3])
def test_random_configurations(t):
    out = run_samples(t, 300, seed=52 + t)
    assert out["holds"] and not out["failures"]
    assert Fraction(out["min_gap"]) >= 0


def test_sampled_configurations_are_valid():
    rng = random.Random(53)
    for t in (1, 2, 3):
        for _ in range(20):
            cfg = random_config(t, rng)
            g = cfg.g
            assert sum(v[0] for v in g) == 0 and sum(v[1] for v in g) == 0
            m = len(g)
            assert all(wedge(g[i], g[(i + j) % m]) >= 0 for i in range(m) for j in range(1, t + 1))
            validate(cfg)
