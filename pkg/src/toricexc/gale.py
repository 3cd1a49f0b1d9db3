"""Gale duality for vector configurations in lattices.

A spanning configuration ``v_1..v_n`` in ``C = Z^d`` determines the dual
configuration ``E_1..E_n`` in ``D = coker(C^dual -> Z^n)``.  ``D`` may carry
torsion; it is stored as a free part plus explicit torsion components.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import NotSpanning, PrecondViolated
from .linalg import (
    det,
    hermite_normal_form,
    integer_kernel,
    rank,
    smith_normal_form,
    smith_diagonal,
    solve,
    transpose,
    unimodular_equivalence,
)
from .polyhedra import Polyhedron, lp_feasible


@dataclass(frozen=True)
class GaleDualPair:
    """A configuration together with its Gale dual.

    ``dual`` holds the free coordinates of each ``E_i``; ``torsion`` holds
    the components of each ``E_i`` in ``Z/torsion_orders[0] + ...``.
    """

    primal: tuple
    dual: tuple
    torsion_orders: tuple = ()
    torsion: tuple = ()

    @property
    def n(self) -> int:
        return len(self.primal)

    @property
    def primal_rank(self) -> int:
        return len(self.primal[0]) if self.primal else 0

    @property
    def dual_rank(self) -> int:
        return len(self.dual[0]) if self.dual else 0

    @property
    def torsion_size(self) -> int:
        out = 1
        for d in self.torsion_orders:
            out *= d
        return out

    def canonical_class(self) -> tuple:
        """Free part of ``K = -E_1 - ... - E_n``."""
        return tuple(-sum(col) for col in zip(*self.dual))

    def canonical_torsion(self) -> tuple:
        return tuple(-sum(col) % d for col, d in zip(zip(*self.torsion), self.torsion_orders)) if self.torsion_orders else ()

    def to_json(self) -> dict:
        return {
            "primal": [list(v) for v in self.primal],
            "dual": [list(e) for e in self.dual],
            "torsion_orders": list(self.torsion_orders),
            "torsion": [list(t) for t in self.torsion],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GaleDualPair":
        orders = tuple(data.get("torsion_orders", ()))
        tors = tuple(tuple(t) for t in data.get("torsion", ())) or tuple(() for _ in data["primal"])
        return cls(
            tuple(tuple(v) for v in data["primal"]),
            tuple(tuple(e) for e in data["dual"]),
            orders,
            tors,
        )


def gale_dual(vectors: Sequence[Sequence[int]]) -> GaleDualPair:
    """Gale dual of an integer configuration spanning ``Z^d`` over ``R``."""
    vs = [tuple(int(x) for x in v) for v in vectors]
    n = len(vs)
    d = len(vs[0]) if vs else 0
    A = transpose(vs) if d else []
    if d and rank(A) != d:
        raise NotSpanning("vectors do not span the ambient real space")
    if d == 0:
        free = [[int(i == j) for j in range(n)] for i in range(n)]
        return GaleDualPair(tuple(vs), tuple(tuple(c) for c in transpose(free)), (), tuple(() for _ in vs))
    snf = smith_normal_form(transpose(A))        # n x d, U M V = D
    U = snf.U
    orders = []
    tors_rows = []
    for i in range(d):
        if snf.d[i] > 1:
            orders.append(snf.d[i])
            tors_rows.append(i)
    free_rows = [list(U[i]) for i in range(d, n)]
    if free_rows:
        H, _ = hermite_normal_form(free_rows)
    else:
        H = []
    dual = tuple(tuple(H[r][j] for r in range(len(H))) for j in range(n))
    torsion = tuple(tuple(U[i][j] % snf.d[i] for i in tors_rows) for j in range(n))
    return GaleDualPair(tuple(vs), dual, tuple(orders), torsion)


def relations(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Lattice basis of the integer linear relations among ``vectors``."""
    return integer_kernel(transpose([list(v) for v in vectors]), len(vectors))


def dual_from_divisors(divisors: Sequence[Sequence[int]], torsion_orders=(), torsion=None) -> GaleDualPair:
    """Recover ray vectors from divisor data (free part plus torsion).

    The rays live in the dual of the relation lattice of the ``E_i``.
    """
    E = [tuple(e) for e in divisors]
    n = len(E)
    m = len(E[0]) if E else 0
    orders = tuple(torsion_orders)
    tors = [tuple(t) for t in torsion] if torsion is not None else [() for _ in E]
    k = len(orders)
    # relations a with sum a_i E_i = 0 in Z^m + torsion
    rows = []
    for r in range(m):
        rows.append([E[i][r] for i in range(n)] + [0] * k)
    for j, dj in enumerate(orders):
        rows.append([tors[i][j] for i in range(n)] + [-dj if jj == j else 0 for jj in range(k)])
    ker = integer_kernel(rows, n + k) if rows else [[int(i == j) for j in range(n)] for i in range(n)]
    basis = [row[:n] for row in ker]
    H, _ = hermite_normal_form(basis)
    basis = [row for row in H if any(row)]
    rays = tuple(tuple(b[i] for b in basis) for i in range(n))
    return GaleDualPair(rays, tuple(E), orders, tuple(tors))


def unimodularly_equivalent(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    """Ordered collections related by one integer matrix of determinant +-1."""
    if len(a) != len(b):
        return False
    if not a or (not a[0] and not b[0]):
        return True
    if len(a[0]) != len(b[0]):
        return False
    return unimodular_equivalence(transpose(a), transpose(b)) is not None


# --- predicates from the dual side ---------------------------------------


def contains_origin_interior(dual: Sequence[Sequence[int]]):
    """Whether some functional is strictly positive on every dual vector.

    Returns ``(verdict, witness functional or None)``.
    """
    if not dual:
        raise ValueError("empty collection")
    m = len(dual[0])
    if m == 0:
        return False, None
    P = Polyhedron.build(m, lt=[(tuple(-x for x in e), 0) for e in dual])
    res = lp_feasible(P)
    return res.feasible, res.witness


def quotient_map(K: Sequence[int]) -> list[list[int]]:
    """Integer matrix whose kernel over ``R`` is the line through ``K``."""
    m = len(K)
    if not any(K):
        return [[int(i == j) for j in range(m)] for i in range(m)]
    return integer_kernel([list(K)], m)


def project_mod(vectors, Phi):
    return [tuple(sum(p * x for p, x in zip(row, v)) for row in Phi) for v in vectors]


def relint_contains_origin(points: Sequence[Sequence]) -> bool:
    """Origin in the relative interior of the convex hull of ``points``.

    Equivalent (Stiemke) to: no functional ``f`` with ``f(p) >= 0`` for all
    points and ``sum f(p) > 0``.
    """
    pts = [tuple(p) for p in points]
    if not pts:
        return False
    k = len(pts[0])
    if k == 0:
        return True
    total = tuple(sum(c) for c in zip(*pts))
    P = Polyhedron.build(
        k,
        le=[(tuple(-x for x in p), 0) for p in pts],
        lt=[(tuple(-x for x in total), 0)],
    )
    return not lp_feasible(P).feasible


def interior_contains_origin(points: Sequence[Sequence]) -> bool:
    pts = [tuple(p) for p in points]
    if not pts:
        return False
    k = len(pts[0])
    if k and rank(pts) < k:
        return False
    return relint_contains_origin(pts)


def hull_contains_origin(points: Sequence[Sequence]) -> bool:
    """Origin in the (closed) convex hull of ``points``."""
    pts = [tuple(p) for p in points]
    if not pts:
        return False
    k = len(pts[0])
    n = len(pts)
    eq = [(tuple(Fraction(p[r]) for p in pts), 0) for r in range(k)]
    eq.append(((1,) * n, 1))
    le = [(tuple(-int(i == j) for j in range(n)), 0) for i in range(n)]
    return lp_feasible(Polyhedron.build(n, le=le, eq=eq)).feasible


@dataclass(frozen=True)
class PolytopePredicates:
    is_vertex_set: bool
    is_simplicial: bool
    facet_complements: tuple


def polytope_predicates(pair: GaleDualPair) -> PolytopePredicates:
    """Vertex, simpliciality and facet data of ``conv(v_i)`` read off the dual."""
    E = pair.dual
    ok, _ = contains_origin_interior(E)
    if not ok:
        raise PrecondViolated("origin is not interior to the convex hull of the primal vectors")
    n = len(E)
    m = pair.dual_rank
    Phi = quotient_map(pair.canonical_class())
    Ebar = project_mod(E, Phi)
    cache: dict = {}

    def relint(idx):
        key = tuple(sorted(set(Ebar[i] for i in idx)))
        if key not in cache:
            cache[key] = relint_contains_origin([Ebar[i] for i in idx])
        return cache[key]

    is_vertex = all(
        interior_contains_origin([Ebar[j] for j in range(n) if j != i]) for i in range(n)
    )
    simplicial = True
    for size in range(1, m):
        for A in combinations(range(n), size):
            if hull_contains_origin([Ebar[i] for i in A]):
                simplicial = False
                break
        if not simplicial:
            break
    facets = []
    for size in range(1, m + 1):
        for Bbar in combinations(range(n), size):
            s = set(Bbar)
            if any(f <= s for f in facets):
                continue
            if relint(Bbar):
                facets.append(frozenset(Bbar))
    return PolytopePredicates(is_vertex, simplicial, tuple(tuple(sorted(f)) for f in facets))


# --- lattice-level checks ---------------------------------------------------


def generates_lattice(vectors: Sequence[Sequence[int]], dim: int) -> bool:
    if dim == 0:
        return True
    if not vectors:
        return False
    d = smith_diagonal(transpose([list(v) for v in vectors]))
    return len(d) == dim and all(x == 1 for x in d)


def generates_dual_group(pair: GaleDualPair, indices) -> bool:
    """Whether ``{E_j : j in indices}`` generate ``D`` including its torsion."""
    m = pair.dual_rank
    k = len(pair.torsion_orders)
    cols = [list(pair.dual[j]) + list(pair.torsion[j]) for j in indices]
    for t, dt in enumerate(pair.torsion_orders):
        cols.append([0] * m + [dt if s == t else 0 for s in range(k)])
    if m + k == 0:
        return True
    if not cols:
        return False
    d = smith_diagonal(transpose(cols))
    return len(d) == m + k and all(x == 1 for x in d)


def check_basis_duality(pair: GaleDualPair, A) -> tuple[bool, bool]:
    """``(v_A generates C, E_complement generates D)``, computed separately."""
    A = sorted(A)
    d = pair.primal_rank
    if len(A) != d:
        raise ValueError("index set must have the lattice rank as size")
    comp = [j for j in range(pair.n) if j not in A]
    return generates_lattice([pair.primal[j] for j in A], d), generates_dual_group(pair, comp)


def volume_duality_check(pair: GaleDualPair, sigma: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Both sides of the volume identity for the split given by ``sigma``.

    The primal form gives the unit cell of ``C`` volume one; the dual form
    gives the unit cell of ``D/D_tors`` volume ``|D_tors|``.
    """
    d = pair.primal_rank
    head = [pair.primal[i] for i in sigma[:d]]
    tail = [pair.dual[i] for i in sigma[d:]]
    lhs = abs(Fraction(det(transpose(head)))) if d else Fraction(1)
    rhs = abs(Fraction(det(transpose(tail)))) if tail else Fraction(1)
    return lhs, rhs * pair.torsion_size


def relation_to_functional(pair: GaleDualPair, a: Sequence[int]):
    """Functional ``phi`` on ``D`` with ``phi(E_i) = a_i`` (rational solve)."""
    if pair.dual_rank == 0:
        return () if not any(a) else None
    return solve([list(e) for e in pair.dual], list(a))
