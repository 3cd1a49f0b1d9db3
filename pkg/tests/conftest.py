import pytest

from toricexc.family import build_family
from toricexc.fan import make_fan


def p1_fan():
    return make_fan([(1,), (-1,)], [(0,), (1,)])


def p2_fan():
    return make_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def p1p1_fan():
    return make_fan([(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (0, 3), (1, 2), (1, 3)])


def p1_cubed_fan():
    rays = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    cones = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return make_fan(rays, cones)


def hirzebruch_fan(r):
    return make_fan([(1, 0), (0, 1), (-1, r), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture(scope="session")
def P1():
    return p1_fan()


@pytest.fixture(scope="session")
def P2():
    return p2_fan()


@pytest.fixture(scope="session")
def P1P1():
    return p1p1_fan()


@pytest.fixture(scope="session")
def P1cubed():
    return p1_cubed_fan()


@pytest.fixture(scope="session")
def Y221():
    return build_family(2, 2, 1)


@pytest.fixture(scope="session")
def Y321():
    return build_family(3, 2, 1)
