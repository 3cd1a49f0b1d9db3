"""Stacky fans: construction from divisor data, Fano tests, rk K0 and the
combinatorial structure of fans with Picard number three."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import NotFano, NotPicardThree, NotProjective, NotSpanning, PrecondViolated
from .gale import (
    GaleDualPair,
    contains_origin_interior,
    dual_from_divisors,
    gale_dual,
    generates_dual_group,
    polytope_predicates,
    quotient_map,
    unimodularly_equivalent,
)
from .linalg import det, inverse, primitive, rank, solve, transpose
from .polyhedra import Polyhedron, lp_feasible


@dataclass(frozen=True)
class StackyFan:
    """Rays ``v_i``, maximal cones (index tuples) and Picard data.

    ``pair.dual`` holds the divisor classes ``E_i`` in the chosen
    coordinates of ``Pic``; ``pair.torsion`` their torsion components.
    """

    lattice_rank: int
    rays: tuple
    max_cones: tuple
    pair: GaleDualPair
    markings: tuple | None = None
    params: dict | None = field(default=None, compare=False, hash=False)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def picard_rank(self) -> int:
        return self.n_rays - self.lattice_rank

    @property
    def divisors(self) -> tuple:
        return self.pair.dual

    @property
    def canonical_class(self) -> tuple:
        return self.pair.canonical_class()

    @property
    def has_torsion(self) -> bool:
        return bool(self.pair.torsion_orders)

    @property
    def complements(self) -> tuple:
        full = set(range(self.n_rays))
        return tuple(tuple(sorted(full - set(c))) for c in self.max_cones)

    def is_variety(self) -> bool:
        return all(abs(det([self.rays[i] for i in c])) == 1 for c in self.max_cones)

    def _complement_masks(self):
        cached = self.__dict__.get("_cmask")
        if cached is None:
            cached = [sum(1 << i for i in c) for c in self.complements]
            object.__setattr__(self, "_cmask", cached)
        return cached

    def is_face(self, J) -> bool:
        """Whether ``J`` is the ray set of some cone of the fan."""
        mask = sum(1 << i for i in J)
        return any(mask & c == 0 for c in self._complement_masks())

    def to_json(self) -> dict:
        out = {
            "lattice_rank": self.lattice_rank,
            "rays": [list(v) for v in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
            "divisors": [list(e) for e in self.divisors],
        }
        if self.has_torsion:
            out["torsion_orders"] = list(self.pair.torsion_orders)
            out["torsion"] = [list(t) for t in self.pair.torsion]
        if self.markings is not None:
            out["markings"] = list(self.markings)
        if self.params is not None:
            out["params"] = dict(self.params)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "StackyFan":
        return make_fan(
            data["rays"],
            data["max_cones"],
            divisors=data.get("divisors"),
            markings=data.get("markings"),
            params=data.get("params"),
            lattice_rank=data.get("lattice_rank"),
        )


def make_fan(rays, max_cones, divisors=None, markings=None, params=None, lattice_rank=None) -> StackyFan:
    """Validate fan data and attach Picard data.

    When ``divisors`` are supplied they fix the coordinates on ``Pic``; they
    are checked to be a Gale dual of the rays.
    """
    rays = tuple(tuple(int(x) for x in v) for v in rays)
    d = len(rays[0]) if rays else 0
    if lattice_rank is not None and lattice_rank != d:
        raise ValueError("lattice_rank does not match ray length")
    cones = tuple(tuple(sorted(int(i) for i in c)) for c in max_cones)
    pair = gale_dual(rays)
    if divisors is not None:
        E = tuple(tuple(int(x) for x in e) for e in divisors)
        if pair.torsion_orders:
            raise ValueError("explicit divisor coordinates are only supported for torsion-free Picard groups")
        if not unimodularly_equivalent(pair.dual, E):
            raise ValueError("supplied divisors are not Gale dual to the rays")
        pair = GaleDualPair(pair.primal, E, (), tuple(() for _ in E))
    check_complete_simplicial(rays, cones)
    return StackyFan(d, rays, cones, pair, tuple(markings) if markings else None, params)


def check_complete_simplicial(rays, cones) -> None:
    """The cones form a complete simplicial fan.

    Every wall lies in exactly two cones which sit on opposite sides of it;
    then the cones cover space with constant multiplicity, and one generic
    point lying in a single cone pins that multiplicity to one.
    """
    d = len(rays[0])
    n = len(rays)
    if not cones:
        raise PrecondViolated("fan has no maximal cones")
    used = set()
    walls: dict = {}
    for c in cones:
        if len(c) != d or len(set(c)) != d or any(not 0 <= i < n for i in c):
            raise PrecondViolated(f"maximal cone {c} does not have {d} distinct rays")
        if rank([rays[i] for i in c]) != d:
            raise PrecondViolated(f"maximal cone {c} is degenerate")
        used.update(c)
        for w in combinations(sorted(c), d - 1):
            walls.setdefault(w, []).append(c)
    bad = [w for w, cs in walls.items() if len(cs) != 2]
    if bad:
        raise PrecondViolated(f"fan is not complete: wall {bad[0]} lies in {len(walls[bad[0]])} cones")
    for w, (a, b) in walls.items():
        i = next(k for k in a if k not in w)
        j = next(k for k in b if k not in w)
        side_i = det([list(rays[k]) for k in w] + [list(rays[i])])
        side_j = det([list(rays[k]) for k in w] + [list(rays[j])])
        if side_i * side_j >= 0:
            raise PrecondViolated(f"cones {a} and {b} lie on the same side of wall {w}")
    if len(used) != n:
        raise PrecondViolated("some ray lies in no maximal cone")
    if _covering_multiplicity(rays, cones) != 1:
        raise PrecondViolated("maximal cones overlap")


def _covering_multiplicity(rays, cones) -> int:
    """Number of cones containing a point in general position."""
    d = len(rays[0])
    base = cones[0]
    for scale in range(2, 50):
        # a point inside the first cone with unrelated barycentric weights
        w = [Fraction(1, scale ** k + k + 1) for k in range(d)]
        p = [sum(w[k] * rays[base[k]][r] for k in range(d)) for r in range(d)]
        count, generic = 0, True
        for c in cones:
            lam = solve([[rays[i][r] for i in c] for r in range(d)], p)
            if any(x == 0 for x in lam):
                generic = False
                break
            if all(x > 0 for x in lam):
                count += 1
        if generic:
            return count
    raise PrecondViolated("could not find a point in general position")


def build_fan_from_dual(divisors: Sequence[Sequence[int]], torsion_orders=(), torsion=None) -> StackyFan:
    """Fan whose divisor classes are the given vectors, via Gale duality.

    Maximal cones are the complements of the facet complements of the
    polytope spanned by the dual rays.
    """
    E = [tuple(int(x) for x in e) for e in divisors]
    ok, _ = contains_origin_interior(E)
    if not ok:
        raise NotFano("no functional is positive on every divisor")
    pair = dual_from_divisors(E, torsion_orders, torsion)
    if not generates_dual_group(pair, range(len(E))):
        raise NotSpanning("divisors do not generate the Picard group")
    preds = polytope_predicates(pair)
    if not (preds.is_vertex_set and preds.is_simplicial):
        raise NotFano("dual vectors are not the vertices of a simplicial polytope")
    n = len(E)
    cones = [tuple(j for j in range(n) if j not in f) for f in preds.facet_complements]
    rays = pair.primal
    check_complete_simplicial(rays, cones)
    return StackyFan(len(rays[0]), rays, tuple(sorted(cones)), pair)


# --- Fano tests -------------------------------------------------------------


def cone_coefficients(fan: StackyFan, cone) -> tuple:
    """Coefficients ``a`` with ``sum a_j E_j = -K`` over the complement of ``cone``."""
    comp = [j for j in range(fan.n_rays) if j not in cone]
    M = transpose([fan.divisors[j] for j in comp])
    a = solve(M, [-x for x in fan.canonical_class])
    if a is None:
        raise PrecondViolated("complement divisors are dependent")
    return tuple(a)


def check_fano(fan: StackyFan) -> dict:
    """``{"fano": bool, "nef_fano": bool}`` from the dual characterization.

    On each maximal cone the support function of ``-K`` is linear; the
    coefficients of ``-K`` in the complementary divisors measure how far
    the other rays sit below the corresponding facet.
    """
    fano = True
    for c in fan.max_cones:
        a = cone_coefficients(fan, c)
        if any(x < 0 for x in a):
            return {"fano": False, "nef_fano": False}
        if any(x == 0 for x in a):
            fano = False
    return {"fano": fano, "nef_fano": True}


def check_fano_primal(fan: StackyFan) -> dict:
    """Same verdict computed on the rays: ``u_sigma(v_j) <= 1`` (``< 1``)."""
    fano = True
    for c in fan.max_cones:
        V = [fan.rays[i] for i in c]
        u = solve(V, [1] * len(c))
        for j in range(fan.n_rays):
            if j in c:
                continue
            val = sum(x * y for x, y in zip(u, fan.rays[j]))
            if val > 1:
                return {"fano": False, "nef_fano": False}
            if val == 1:
                fano = False
    return {"fano": fano, "nef_fano": True}


# --- rank of K0 ---------------------------------------------------------------


def rank_k0(fan: StackyFan) -> int:
    """Normalized volume of the union of cone simplices (max-cone count for varieties)."""
    return sum(abs(int(det([fan.rays[i] for i in c]))) for c in fan.max_cones)


def rank_k0_dual(fan: StackyFan) -> int:
    """The same quantity from the complementary divisor determinants."""
    total = 0
    for comp in fan.complements:
        total += abs(int(det(transpose([fan.divisors[j] for j in comp])))) if comp else 1
    return total * fan.pair.torsion_size


# --- primitive collections ----------------------------------------------------


def minimal_transversals(edges: Sequence[Sequence[int]]) -> list[frozenset]:
    """Minimal sets meeting every edge (Berge's algorithm)."""
    current = [frozenset()]
    for e in edges:
        es = set(e)
        nxt = set()
        for T in current:
            if T & es:
                nxt.add(T)
            else:
                for x in es:
                    nxt.add(T | {x})
        cand = sorted(nxt, key=len)
        kept: list = []
        for T in cand:
            if not any(S <= T for S in kept):
                kept.append(T)
        current = kept
    return current


def primitive_collections(fan: StackyFan) -> list[tuple]:
    """Minimal sets of rays that do not span a cone.

    A set spans a cone iff it avoids some maximal-cone complement, so the
    primitive collections are the minimal transversals of the complements.
    """
    comps = sorted(set(fan.complements))
    return sorted(tuple(sorted(T)) for T in minimal_transversals(comps))


# --- Picard number three --------------------------------------------------------


@dataclass(frozen=True)
class Picard3Decomposition:
    t: int
    X: tuple                    # 2t+1 index tuples in cyclic order
    functionals: tuple          # l_i on Pic_R, possibly empty
    sign_kind: str              # "strict", "weak" or "none"
    ample: tuple                # l with l(E_j) > 0
    ample_class: tuple          # a class in the interior of the ample cone
    orientation: int            # sign of W_0 ^ W_1 in the recorded basis
    n_rays: int

    def block(self, start: int, length: int) -> tuple:
        m = len(self.X)
        out = []
        for s in range(length):
            out.extend(self.X[(start + s) % m])
        return tuple(sorted(out))

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "X": [list(x) for x in self.X],
            "functionals": [[str(c) for c in f] for f in self.functionals],
            "sign_kind": self.sign_kind,
            "ample": [str(c) for c in self.ample],
            "orientation": self.orientation,
        }


def ample_class(fan: StackyFan):
    """A rational class in the interior of every cone spanned by complement divisors."""
    m = fan.picard_rank
    lt = []
    for comp in fan.complements:
        M = transpose([fan.divisors[j] for j in comp])
        Minv = inverse(M)
        for row in Minv:
            lt.append((tuple(-x for x in row), 0))
    res = lp_feasible(Polyhedron.build(m, lt=lt))
    return res


def _cyclic_order(atoms: list, prims: list, t: int) -> list:
    k = len(atoms)
    if k == 1:
        return [0]
    co = [[sum(1 for P in prims if atoms[i] <= P and atoms[j] <= P) for j in range(k)] for i in range(k)]
    adj = [[j for j in range(k) if j != i and co[i][j] == t - 1] for i in range(k)]
    if t == 1:
        return list(range(k))
    if any(len(a) != 2 for a in adj):
        raise NotProjective("primitive collections are not cyclic blocks of atoms")
    order = [0]
    prev, cur = None, 0
    while True:
        nxt = [j for j in adj[cur] if j != prev]
        j = nxt[0] if prev is not None else min(adj[cur], key=lambda i: min(atoms[i]))
        if j == 0:
            break
        order.append(j)
        prev, cur = cur, j
        if len(order) > k:
            raise NotProjective("atom adjacency is not a single cycle")
    if len(order) != k:
        raise NotProjective("atom adjacency is not a single cycle")
    return order


def _wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def decompose_picard3(fan: StackyFan) -> Picard3Decomposition:
    """Cyclic decomposition of the rays of a projective Picard-three fan."""
    if fan.picard_rank != 3:
        raise NotPicardThree(f"Picard number is {fan.picard_rank}")
    amp = ample_class(fan)
    if not amp.feasible:
        raise NotProjective("ample cone is empty (LP infeasible)")
    L = amp.witness
    prims = [frozenset(p) for p in primitive_collections(fan)]
    if len(prims) % 2 == 0 or len(prims) < 3:
        raise NotProjective(f"{len(prims)} primitive collections; expected an odd number >= 3")
    t = (len(prims) - 1) // 2
    n = fan.n_rays
    signature: dict = {}
    for j in range(n):
        key = tuple(j in P for P in prims)
        signature.setdefault(key, []).append(j)
    atoms = sorted((frozenset(v) for v in signature.values()), key=min)
    if len(atoms) != 2 * t + 1:
        raise NotProjective("primitive collections do not split into 2t+1 atoms")
    order = _cyclic_order(atoms, prims, t)
    X = [tuple(sorted(atoms[i])) for i in order]
    expected = set()
    m = len(X)
    for i in range(m):
        block = frozenset(j for s in range(t) for j in X[(i + s) % m])
        expected.add(block)
    if expected != set(prims):
        raise NotProjective("primitive collections are not consecutive blocks")
    E = fan.divisors
    K = fan.canonical_class
    # orientation of W_0, W_1 in Pic_R / R L
    Phi = quotient_map(primitive(L))
    W = [tuple(sum(E[j][r] for j in x) for r in range(3)) for x in X]
    What = [tuple(sum(p * w for p, w in zip(row, Wi)) for row in Phi) for Wi in W]
    orient = 1 if _wedge(What[0], What[1]) >= 0 else -1
    funcs, kind = _sign_functionals(E, K, X, t)
    ok, ell = contains_origin_interior(E)
    return Picard3Decomposition(t, tuple(X), funcs, kind, tuple(ell), tuple(L), orient, n)


def _sign_functionals(E, K, X, t):
    m = len(X)
    for kind in ("strict", "weak"):
        out = []
        for i in range(m):
            pos = [j for s in range(t + 1) for j in X[(i + s) % m]]
            neg = [j for s in range(1, t + 1) for j in X[(i - s) % m]]
            eq = [(tuple(K), 0)]
            if kind == "strict":
                P = Polyhedron.build(
                    3,
                    lt=[(tuple(-x for x in E[j]), 0) for j in pos] + [(tuple(E[j]), 0) for j in neg],
                    eq=eq,
                )
            else:
                total = tuple(sum(E[j][r] for j in pos) for r in range(3))
                P = Polyhedron.build(
                    3,
                    le=[(tuple(-x for x in E[j]), 0) for j in pos] + [(tuple(E[j]), 0) for j in neg],
                    eq=eq + [(total, 1)],
                )
            res = lp_feasible(P)
            if not res.feasible:
                break
            out.append(tuple(res.witness))
        else:
            return tuple(out), kind
    return (), "none"


def check_sign_pattern(decomp: Picard3Decomposition, fan: StackyFan, strict: bool) -> bool:
    E, K, X, t = fan.divisors, fan.canonical_class, decomp.X, decomp.t
    m = len(X)
    if len(decomp.functionals) != m:
        return False
    for i, f in enumerate(decomp.functionals):
        if not any(f):
            return False
        if sum(a * b for a, b in zip(f, K)) != 0:
            return False
        for s in range(t + 1):
            for j in X[(i + s) % m]:
                v = sum(a * b for a, b in zip(f, E[j]))
                if v < 0 or (strict and v == 0):
                    return False
        for s in range(1, t + 1):
            for j in X[(i - s) % m]:
                v = sum(a * b for a, b in zip(f, E[j]))
                if v > 0 or (strict and v == 0):
                    return False
    return True


def nonzero_homology_index_sets(decomp: Picard3Decomposition) -> list[tuple]:
    """The ``4t+4`` index sets whose complexes carry reduced homology."""
    return [I for _, I in labelled_index_sets(decomp)]


def labelled_index_sets(decomp: Picard3Decomposition) -> list[tuple]:
    """Pairs ``(label, I)``: ``eff``, ``neg``, ``K_i`` and ``Khat_i``."""
    t, m = decomp.t, len(decomp.X)
    out = [("eff", ()), ("neg", tuple(range(decomp.n_rays)))]
    for i in range(m):
        out.append((f"K_{i}", decomp.block(i, t + 1)))
        out.append((f"Khat_{i}", decomp.block(i - t, t)))
    return out
