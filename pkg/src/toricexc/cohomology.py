"""Line bundle cohomology on complete simplicial toric stacks.

Cohomology is assembled from the reduced homology of the complexes ``C_I``
and counts of lattice points in the fibers of ``r -> sum r_i E_i``.
Forbidden sets ``K_I`` are decided by integer feasibility on those fibers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

from .errors import EnumerationUnbounded, UnboundedPolyhedron
from .fan import (
    StackyFan,
    decompose_picard3,
    labelled_index_sets,
    primitive_collections,
)
from .linalg import hermite_normal_form, integer_kernel, integer_solution, smith_diagonal
from .polyhedra import Polyhedron, enumerate_lattice_points, integer_feasible, lp_feasible


# --- simplicial complexes ---------------------------------------------------------


@dataclass(frozen=True)
class SimplicialComplex:
    """A simplicial complex given by its faces (sorted tuples, closed under subsets)."""

    vertices: tuple
    faces: frozenset

    @classmethod
    def from_facets(cls, vertices, facets) -> "SimplicialComplex":
        faces = set()
        for f in facets:
            f = tuple(sorted(f))
            for size in range(1, len(f) + 1):
                faces.update(combinations(f, size))
        return cls(tuple(sorted(vertices)), frozenset(faces))

    def dimension(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1


def complex_CI(fan: StackyFan, I) -> SimplicialComplex:
    """Subsets of ``I`` spanning a cone of the fan."""
    I = set(I)
    facets = {tuple(sorted(I.intersection(c))) for c in fan.max_cones}
    facets.discard(())
    # keep maximal ones only
    maximal = [f for f in facets if not any(set(f) < set(g) for g in facets)]
    return SimplicialComplex.from_facets(I, maximal)


@dataclass(frozen=True)
class Homology:
    """Reduced homology: ``ranks[d]`` and ``torsion[d]`` for ``d = -1 .. dim``."""

    ranks: dict
    torsion: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not any(self.ranks.values())

    def rank(self, degree: int) -> int:
        return self.ranks.get(degree, 0)


def reduced_homology(C: SimplicialComplex) -> Homology:
    """Reduced integral homology from boundary matrices and Smith forms."""
    by_dim: dict = {-1: [()]}
    for f in C.faces:
        by_dim.setdefault(len(f) - 1, []).append(f)
    top = max(by_dim)
    index = {d: {f: i for i, f in enumerate(sorted(fs))} for d, fs in by_dim.items()}
    ranks, torsion = {}, {}
    # boundary d: C_d -> C_{d-1}; rank r_d, elementary divisors
    bd_rank = {}
    bd_tors = {}
    for d in range(0, top + 1):
        rows = len(index[d - 1])
        cols = index[d]
        M = [[0] * len(cols) for _ in range(rows)]
        for f, j in cols.items():
            for k in range(len(f)):
                g = f[:k] + f[k + 1:]
                M[index[d - 1][g]][j] = -1 if k % 2 else 1
        diag = smith_diagonal(M) if cols and rows else []
        bd_rank[d] = len(diag)
        bd_tors[d] = [x for x in diag if x > 1]
    for d in range(-1, top + 1):
        n_d = len(index[d])
        z = n_d - bd_rank.get(d, 0)
        b = bd_rank.get(d + 1, 0)
        ranks[d] = z - b
        if bd_tors.get(d + 1):
            torsion[d] = bd_tors[d + 1]
    return Homology(ranks, torsion)


# --- candidate index sets -----------------------------------------------------------


class HomologyCache:
    """Per-fan cache of ``reduced_homology(C_I)``."""

    def __init__(self, fan: StackyFan):
        self.fan = fan
        self._data: dict = {}

    def __call__(self, I) -> Homology:
        key = frozenset(I)
        if key not in self._data:
            self._data[key] = reduced_homology(complex_CI(self.fan, key))
        return self._data[key]


def unions_of_primitives(fan: StackyFan) -> list[tuple]:
    prims = [frozenset(p) for p in primitive_collections(fan)]
    seen = set()
    for size in range(1, len(prims) + 1):
        for combo in combinations(prims, size):
            seen.add(frozenset().union(*combo))
    return sorted(tuple(sorted(s)) for s in seen)


def union_of_primitives_check(fan: StackyFan, I) -> tuple[bool, list]:
    """Whether ``I`` is a union of primitive collections, with the witness."""
    I = frozenset(I)
    inside = [tuple(p) for p in primitive_collections(fan) if frozenset(p) <= I]
    covered = frozenset().union(*map(frozenset, inside)) if inside else frozenset()
    if covered != I:
        return False, []
    # drop redundant members greedily for a compact witness
    witness = list(inside)
    for p in list(witness):
        rest = [q for q in witness if q != p]
        if rest and frozenset().union(*map(frozenset, rest)) == I:
            witness = rest
    return True, witness


@dataclass
class ForbiddenData:
    """Forbidden index sets for a fan, with labels where known."""

    fan: StackyFan
    sets: list                     # list of (label, I)
    homology: HomologyCache


def forbidden_index_sets(fan: StackyFan, cache: HomologyCache | None = None) -> ForbiddenData:
    """Index sets with nonzero reduced homology.

    Picard-three fans use the cyclic decomposition; other fans scan the
    empty set plus unions of primitive collections.
    """
    cache = cache or HomologyCache(fan)
    if fan.picard_rank == 3:
        dec = decompose_picard3(fan)
        return ForbiddenData(fan, labelled_index_sets(dec), cache)
    sets = [("eff", ())]
    for I in unions_of_primitives(fan):
        if not cache(I).is_zero():
            label = "neg" if len(I) == fan.n_rays else "I" + "_".join(map(str, I))
            sets.append((label, I))
    return ForbiddenData(fan, sets, cache)


# --- fibers ----------------------------------------------------------------------


@dataclass(frozen=True)
class Fiber:
    """Integer points ``s >= 0`` with ``sum s_g g = target`` over distinct generators.

    ``groups[g]`` is the number of rays sharing generator ``g``; the fiber
    is parameterized as ``s = base + y . kernel``.
    """

    gens: tuple
    mult: tuple
    target: tuple
    base: tuple | None
    kernel: tuple

    def polyhedron(self) -> Polyhedron:
        k = len(self.kernel)
        rows = []
        for i in range(len(self.gens)):
            a = tuple(-self.kernel[j][i] for j in range(k))
            rows.append((a, self.base[i]))
        return Polyhedron.build(k, le=rows)

    def point(self, y) -> tuple:
        return tuple(b + sum(yj * kj[i] for yj, kj in zip(y, self.kernel)) for i, b in enumerate(self.base))


def _generators(fan: StackyFan, I):
    I = set(I)
    E = fan.divisors
    tors = fan.pair.torsion
    orders = fan.pair.torsion_orders
    groups: dict = {}
    for j in range(fan.n_rays):
        sign = -1 if j in I else 1
        g = tuple(sign * x for x in E[j]) + tuple((sign * t) % d for t, d in zip(tors[j], orders))
        groups[g] = groups.get(g, 0) + 1
    gens = tuple(sorted(groups))
    return gens, tuple(groups[g] for g in gens)


def shifted_target(fan: StackyFan, I, L) -> tuple:
    """``L + sum_{i in I} E_i`` (free part and torsion)."""
    m = fan.picard_rank
    free = list(L[:m])
    tors = list(L[m:]) if len(L) > m else [0] * len(fan.pair.torsion_orders)
    for i in I:
        for r in range(m):
            free[r] += fan.divisors[i][r]
        for r, d in enumerate(fan.pair.torsion_orders):
            tors[r] = (tors[r] + fan.pair.torsion[i][r]) % d
    return tuple(free) + tuple(tors)


def fiber(fan: StackyFan, I, L) -> Fiber:
    gens, mult = _generators(fan, I)
    target = shifted_target(fan, I, L)
    m = fan.picard_rank
    orders = fan.pair.torsion_orders
    p = len(gens)
    # columns: generators, then one slack per torsion order
    rows = []
    for r in range(m):
        rows.append([g[r] for g in gens] + [0] * len(orders))
    for t, d in enumerate(orders):
        rows.append([g[m + t] for g in gens] + [-d if s == t else 0 for s in range(len(orders))])
    ncols = p + len(orders)
    sol = integer_solution(rows, list(target))
    if sol is None:
        return Fiber(gens, mult, target, None, ())
    ker = integer_kernel(rows, ncols)
    # slack variables are unconstrained; eliminate them by projecting onto gens
    base = tuple(sol[:p])
    kernel = tuple(tuple(row[:p]) for row in ker)
    if orders:
        # the slack coordinates are free, so only the generator part matters;
        # re-derive a basis of the projected lattice
        H, _ = hermite_normal_form([list(k) for k in kernel])
        kernel = tuple(tuple(r) for r in H if any(r))
    return Fiber(gens, mult, target, base, kernel)


def _positive_functional(gens, m):
    """A functional strictly positive on the free parts of all generators."""
    P = Polyhedron.build(m, lt=[(tuple(-x for x in g[:m]), 0) for g in gens])
    res = lp_feasible(P)
    return res.witness if res.feasible else None


# --- membership -------------------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenSet:
    fan: StackyFan
    I: tuple
    label: str = ""

    def contains(self, L) -> bool:
        return forbidden_membership(self, L)


def forbidden_membership(K: ForbiddenSet, L, witness: bool = False):
    """Decide ``L in K_I`` by integer feasibility on the fiber.

    With ``witness`` set, returns ``(verdict, r)`` where ``r`` is a ray-wise
    preimage (``r_i <= -1`` on ``I`` and ``r_i >= 0`` off ``I``).
    """
    fb = fiber(K.fan, K.I, L)
    if fb.base is None:
        return (False, None) if witness else False
    if not fb.kernel:
        ok = all(x >= 0 for x in fb.base)
        s = fb.base if ok else None
    else:
        res = integer_feasible(fb.polyhedron())
        ok = res.feasible
        s = fb.point(res.witness) if ok else None
    if not witness:
        return ok
    if not ok:
        return False, None
    return True, _spread(K.fan, K.I, fb, s)


def _spread(fan, I, fb: Fiber, s):
    """Distribute generator totals back onto rays (all on the first ray of a group)."""
    gens, _ = _generators(fan, I)
    I = set(I)
    m = fan.picard_rank
    orders = fan.pair.torsion_orders
    r = [0] * fan.n_rays
    used = set()
    for j in range(fan.n_rays):
        sign = -1 if j in I else 1
        g = tuple(sign * x for x in fan.divisors[j]) + tuple((sign * t) % d for t, d in zip(fan.pair.torsion[j], orders))
        gi = gens.index(g)
        val = s[gi] if gi not in used else 0
        used.add(gi)
        r[j] = -val - 1 if j in I else val
    return tuple(r)


# --- cohomology -------------------------------------------------------------------


def fiber_count(fan: StackyFan, I, L) -> int:
    """Number of ``r`` with ``Supp(r) = I`` mapping to ``L``."""
    fb = fiber(fan, I, L)
    if fb.base is None:
        return 0
    m = fan.picard_rank
    if _positive_functional(fb.gens, m) is None:
        raise EnumerationUnbounded(f"no bounding functional for index set {tuple(I)}")
    if not fb.kernel:
        pts = [fb.base] if all(x >= 0 for x in fb.base) else []
    else:
        try:
            pts = [fb.point(y) for y in enumerate_lattice_points(fb.polyhedron())]
        except UnboundedPolyhedron as exc:
            raise EnumerationUnbounded(str(exc)) from exc
    total = 0
    for s in pts:
        w = 1
        for si, c in zip(s, fb.mult):
            w *= comb(si + c - 1, c - 1)
        total += w
    return total


@dataclass(frozen=True)
class CohomologyTable:
    h: tuple

    def to_json(self) -> dict:
        return {"h": list(self.h)}


def cohomology(fan: StackyFan, L, data: ForbiddenData | None = None) -> CohomologyTable:
    """Dimensions ``h^0 .. h^d`` from the Cech description."""
    data = data or forbidden_index_sets(fan)
    d = fan.lattice_rank
    h = [0] * (d + 1)
    for _, I in data.sets:
        count = fiber_count(fan, I, L)
        if not count:
            continue
        H = data.homology(I)
        for deg, rk in H.ranks.items():
            if rk and 0 <= deg + 1 <= d:
                h[deg + 1] += count * rk
    return CohomologyTable(tuple(h))


def forbidden_sets(fan: StackyFan, data: ForbiddenData | None = None) -> list[ForbiddenSet]:
    data = data or forbidden_index_sets(fan)
    return [ForbiddenSet(fan, tuple(I), label) for label, I in data.sets]


def vanishing(fan: StackyFan, L, higher_only: bool = False, data: ForbiddenData | None = None) -> bool:
    """Whether all (or all higher) cohomology of ``L`` vanishes."""
    for K in forbidden_sets(fan, data):
        if higher_only and not K.I:
            continue
        if forbidden_membership(K, L):
            return False
    return True


def member_labels(fan: StackyFan, L, data: ForbiddenData | None = None) -> list[str]:
    return [K.label for K in forbidden_sets(fan, data) if forbidden_membership(K, L)]
