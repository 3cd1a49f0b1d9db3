"""The cyclic wedge inequality for planar configurations summing to zero."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidConfig
from .polyhedra import Polyhedron, lp_feasible


def wedge(u, v) -> Fraction:
    return Fraction(u[0]) * v[1] - Fraction(u[1]) * v[0]


@dataclass(frozen=True)
class WedgeConfig:
    """Vectors ``g_0 .. g_{2t}`` indexed cyclically, with optional functionals."""

    g: tuple
    f: tuple | None = None

    @property
    def t(self) -> int:
        return (len(self.g) - 1) // 2

    def at(self, i: int):
        return self.g[i % len(self.g)]


def _sign_rows(g, i, t):
    m = len(g)
    pos = [g[(i + s) % m] for s in range(t + 1)]
    neg = [g[(i - s) % m] for s in range(1, t + 1)]
    return pos, neg


def _respects(f, g, i, t) -> bool:
    pos, neg = _sign_rows(g, i, t)
    dot = lambda v: Fraction(f[0]) * v[0] + Fraction(f[1]) * v[1]
    return all(dot(v) >= 0 for v in pos) and all(dot(v) <= 0 for v in neg)


def find_functional(g, i: int, t: int):
    """A nonzero ``f`` with ``f >= 0`` on ``g_i..g_{i+t}`` and ``f <= 0`` on ``g_{i-t}..g_{i-1}``."""
    pos, neg = _sign_rows(g, i, t)
    le = [((-v[0], -v[1]), 0) for v in pos] + [((v[0], v[1]), 0) for v in neg]
    # a nonzero functional can be scaled to have a coordinate equal to +-1
    for eq in (((1, 0), 1), ((1, 0), -1), ((0, 1), 1), ((0, 1), -1)):
        res = lp_feasible(Polyhedron.build(2, le=le, eq=[eq]))
        if res.feasible:
            return tuple(res.witness)
    return None


def validate(config: WedgeConfig) -> tuple:
    """Check the hypotheses; returns the functionals used."""
    g = config.g
    if len(g) < 3 or len(g) % 2 == 0:
        raise InvalidConfig("need an odd number (2t+1 >= 3) of vectors")
    t = config.t
    sx = sum(Fraction(v[0]) for v in g)
    sy = sum(Fraction(v[1]) for v in g)
    if sx or sy:
        raise InvalidConfig("vectors do not sum to zero")
    m = len(g)
    for i in range(m):
        for j in range(1, t + 1):
            if wedge(g[i], g[(i + j) % m]) < 0:
                raise InvalidConfig(f"g_{i} ^ g_{(i + j) % m} < 0")
    if config.f is not None:
        if len(config.f) != m:
            raise InvalidConfig("need one functional per vector")
        for i, f in enumerate(config.f):
            if not any(f) or not _respects(f, g, i, t):
                raise InvalidConfig(f"f_{i} has the wrong sign pattern")
        return tuple(config.f)
    fs = []
    for i in range(m):
        f = find_functional(g, i, t)
        if f is None:
            raise InvalidConfig(f"no functional with the required signs for index {i}")
        fs.append(f)
    return tuple(fs)


def sides(config: WedgeConfig) -> tuple[Fraction, Fraction]:
    t = config.t
    m = len(config.g)
    lhs = sum((wedge(config.at(r), config.at(r + j)) for r in range(m) for j in range(1, t + 1)), Fraction(0))
    rhs = 3 * sum(
        (wedge(config.at(j1), config.at(-j2))
         for j1 in range(1, t + 1) for j2 in range(1, t + 1) if j1 + j2 > t),
        Fraction(0),
    )
    return lhs, rhs


def sublemma_check(config: WedgeConfig) -> tuple[Fraction, Fraction, bool]:
    validate(config)
    lhs, rhs = sides(config)
    return lhs, rhs, lhs >= rhs


def random_config(t: int, rng: random.Random, bound: int = 10, max_tries: int = 10**6) -> WedgeConfig:
    """Rejection sampler for valid configurations.

    Integer vectors are drawn from ``[-bound, bound]^2``, sorted by angle,
    rotated by a random cyclic offset, then projected to sum zero by
    subtracting the mean.
    """
    m = 2 * t + 1
    for _ in range(max_tries):
        raw = [(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(m)]
        raw.sort(key=_angle_key)
        shift = rng.randrange(m)
        raw = raw[shift:] + raw[:shift]
        mx = Fraction(sum(v[0] for v in raw), m)
        my = Fraction(sum(v[1] for v in raw), m)
        g = tuple((v[0] - mx, v[1] - my) for v in raw)
        if any(wedge(g[i], g[(i + j) % m]) < 0 for i in range(m) for j in range(1, t + 1)):
            continue
        try:
            fs = validate(WedgeConfig(g))
        except InvalidConfig:
            continue
        return WedgeConfig(g, fs)
    raise InvalidConfig("rejection sampler gave up")


def _angle_key(v):
    x, y = v
    if x == 0 and y == 0:
        return (2, Fraction(0))
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    return (half, Fraction(-x, abs(x) + abs(y)) if half == 0 else Fraction(x, abs(x) + abs(y)))


def run_samples(t: int, samples: int, seed: int = 0) -> dict:
    rng = random.Random(seed)
    worst = None
    failures = []
    for k in range(samples):
        cfg = random_config(t, rng)
        lhs, rhs, ok = sublemma_check(cfg)
        gap = lhs - rhs
        if worst is None or gap < worst:
            worst = gap
        if not ok:
            failures.append({"index": k, "g": [[str(x) for x in v] for v in cfg.g]})
    return {"t": t, "samples": samples, "holds": not failures, "min_gap": str(worst), "failures": failures}
