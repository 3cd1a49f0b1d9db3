"""The Picard-three Fano family ``Y_{n,k,a}``.

Divisor classes live in ``Z^3`` with the fixed coordinates ``(x, y, z)``;
rays live in ``Z^(2n+2a+k-1)``.  Rays are ordered group by group:
``X_0`` (``n+2a`` rays), ``X_1`` (one), ``X_2`` (``k``), ``X_3`` (``n``),
``X_4`` (one).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Callable

from .errors import BadParams, ToricError
from .fan import StackyFan, check_fano, make_fan, rank_k0
from .gale import (
    GaleDualPair,
    contains_origin_interior,
    gale_dual,
    generates_lattice,
    polytope_predicates,
    unimodularly_equivalent,
)
from .linalg import det, transpose
from .polyhedra import Polyhedron, lp_feasible


@dataclass(frozen=True)
class FamilyParams:
    n: int
    k: int
    a: int

    def __post_init__(self):
        for name, lo in (("n", 2), ("k", 2), ("a", 1)):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < lo:
                raise BadParams(f"{name} must be an integer >= {lo}, got {v!r}")

    @property
    def ambient_rank(self) -> int:
        return 2 * self.n + 2 * self.a + self.k - 1

    @property
    def sizes(self) -> tuple:
        return (self.n + 2 * self.a, 1, self.k, self.n, 1)


def divisor_groups(p: FamilyParams) -> list[list[tuple]]:
    n, k, a = p.n, p.k, p.a
    return [
        [(1, 0, 0)] * (n + 2 * a),
        [(0, 1, 0)],
        [(0, 1, 1)] * (k - 1) + [(-a, 1, 1)],
        [(0, 0, 1)] * (n - 1) + [(-a, 0, 1)],
        [(1, -1, 0)],
    ]


def ray_groups(p: FamilyParams, as_printed: bool = False) -> list[list[tuple]]:
    """Ray vectors in coordinates ``e_1 .. e_D``.

    The coordinates are the coefficients of the rays in a fixed basis of
    additive relations among the divisors.  With ``as_printed`` the
    ``v_{2,k-1}`` entry keeps its ``-e_{n+2a+k-1}`` term when ``k = 2``;
    that coordinate then belongs to another relation and duality fails, so
    by default the term is dropped in that case.
    """
    n, k, a = p.n, p.k, p.a
    D = p.ambient_rank
    N = n + 2 * a

    def e(i, c=1):
        v = [0] * D
        v[i - 1] = c
        return v

    def add(*vs):
        return tuple(sum(col) for col in zip(*vs))

    X0 = [add(e(1), e(2))]
    X0 += [add(e(i + 1), e(i, -1)) for i in range(2, N)]
    X0 += [tuple(e(N, -1))]
    X1 = [add(e(N + 1), e(1, -1))]
    X2 = []
    if k >= 3:
        X2.append(tuple(e(N + 2)))
    X2 += [add(e(N + i + 1), e(N + i, -1)) for i in range(2, k - 1)]
    if k >= 3 or as_printed:
        X2.append(add(e(N + k), e(D, a), e(N + k - 1, -1)))
    else:
        X2.append(add(e(N + k), e(D, a)))
    X2.append(add(e(N + 1, -1), e(N + k, -1)))
    X3 = []
    if n >= 3:
        X3.append(tuple(e(N + k + 1)))
    X3 += [add(e(N + k + i), e(N + k + i - 1, -1)) for i in range(2, n - 1)]
    if n >= 3:
        X3.append(add(e(N + k, -1), e(2 * n + 2 * a + k - 2, -1), e(D, -(a + 1))))
    else:
        X3.append(add(e(N + k, -1), e(D, -(a + 1))))
    X3.append(add(e(N + 1), e(N + k), e(D)))
    X4 = [add(e(D, a), e(1, -1))]
    return [X0, X1, X2, X3, X4]


def printed_list_discrepancy(p: FamilyParams) -> list[tuple]:
    """Labels whose printed ray differs from the duality-checked one."""
    printed = [v for grp in ray_groups(p, as_printed=True) for v in grp]
    used = [v for grp in ray_groups(p) for v in grp]
    labels = [(i, j + 1) for i, size in enumerate(p.sizes) for j in range(size)]
    return [lab for lab, u, w in zip(labels, used, printed) if u != w]


def group_index_sets(p: FamilyParams) -> tuple:
    out, start = [], 0
    for size in p.sizes:
        out.append(tuple(range(start, start + size)))
        start += size
    return tuple(out)


def facet_complement_triples(X) -> list[tuple]:
    """Triples ``{p, q, r}`` with ``p in X_i, q in X_{i+1}, r in X_{i+3}``."""
    out = set()
    for i in range(5):
        for p, q, r in product(X[i], X[(i + 1) % 5], X[(i + 3) % 5]):
            out.add(tuple(sorted((p, q, r))))
    return sorted(out)


def rk_k0_block_sum(sizes) -> int:
    return sum(sizes[i] * sizes[(i + 1) % 5] * sizes[(i + 3) % 5] for i in range(5))


def rk_k0_closed_form(n: int, k: int, a: int) -> int:
    return n * n * k + 2 * a * k * n + n * n + n * k + 2 * a * n + 2 * a * k + k + n


@dataclass(frozen=True)
class FamilyInstance:
    params: FamilyParams
    divisors: tuple
    rays: tuple
    X: tuple
    labels: tuple
    fan: StackyFan | None = field(default=None, compare=False)

    @property
    def anticanonical(self) -> tuple:
        return tuple(sum(col) for col in zip(*self.divisors))

    @property
    def canonical(self) -> tuple:
        return tuple(-x for x in self.anticanonical)

    def rk_k0_closed_form(self) -> int:
        p = self.params
        return rk_k0_closed_form(p.n, p.k, p.a)

    def rk_k0_block_sum(self) -> int:
        return rk_k0_block_sum([len(x) for x in self.X])


def build_family(n: int, k: int, a: int, with_fan: bool = True) -> FamilyInstance:
    """Divisors, rays and fan of ``Y_{n,k,a}``."""
    p = FamilyParams(n, k, a)
    E = tuple(v for grp in divisor_groups(p) for v in grp)
    V = tuple(v for grp in ray_groups(p) for v in grp)
    X = group_index_sets(p)
    labels = tuple((i, j + 1) for i, size in enumerate(p.sizes) for j in range(size))
    fan = None
    if with_fan:
        comps = set(facet_complement_triples(X))
        cones = [tuple(j for j in range(len(E)) if j not in c) for c in sorted(comps)]
        fan = make_fan(V, cones, divisors=E, params={"n": n, "k": k, "a": a})
    return FamilyInstance(p, E, V, X, labels, fan)


def mutate(inst: FamilyInstance, label: tuple, vector: tuple) -> FamilyInstance:
    """Copy of ``inst`` with one divisor replaced (no fan attached)."""
    idx = inst.labels.index(tuple(label))
    E = list(inst.divisors)
    E[idx] = tuple(vector)
    return replace(inst, divisors=tuple(E), fan=None)


# --- validation --------------------------------------------------------------


def projection(p: FamilyParams):
    """The integer projection ``Z^3 -> Z^2`` killing ``K``."""
    n, k = p.n, p.k
    return ((k + n, 0, -(n + 1)), (0, k + n, -k))


def explicit_functionals(p: FamilyParams) -> list[tuple]:
    """``f_0 .. f_4`` on the projected plane."""
    n, k, a = p.n, p.k, p.a
    c = k * a + n * a + n + 2
    return [(2 * n, 2 * n + 1), (-1, c), (-2, -1), (-1, -c), (k, -1)]


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def _check(name, ok, witness=None):
    return {"name": name, "status": "pass" if ok else "fail", "witness": witness}


def validate_construction(inst: FamilyInstance) -> dict:
    """Check generation, the three divisor conditions, duality and the Fano property."""
    p = inst.params
    E = inst.divisors
    X = inst.X
    checks = []
    checks.append(_check("generates_Z3", generates_lattice(E, 3)))
    # condition 1
    ok, w = contains_origin_interior(E)
    checks.append(_check("condition1_lp", ok, [str(x) for x in w] if ok else None))
    explicit = (Fraction(1), Fraction(1, 2), Fraction(p.a + 1))
    vals = [_dot(explicit, e) for e in E]
    checks.append(_check("condition1_explicit", all(v > 0 for v in vals), ["1", "1/2", str(p.a + 1)]))
    # condition 2 via the listed functionals pulled back along the projection
    minus_K = inst.anticanonical
    checks.append(_check("anticanonical_class", minus_K == (p.n + 1, p.k, p.k + p.n), list(minus_K)))
    pi = projection(p)
    pulled = []
    bad = None
    for i, f in enumerate(explicit_functionals(p)):
        l = tuple(f[0] * pi[0][c] + f[1] * pi[1][c] for c in range(3))
        pulled.append(l)
        if _dot(l, minus_K) != 0:
            bad = bad or f"l_{i}(K) != 0"
        pos = set(X[i]) | set(X[(i + 1) % 5])
        for j, e in enumerate(E):
            v = _dot(l, e)
            if (j in pos and v <= 0) or (j not in pos and v >= 0):
                bad = bad or f"l_{i} has wrong sign on ray {inst.labels[j]}"
    checks.append(_check("condition2_pullbacks", bad is None, bad or [list(l) for l in pulled]))
    lp_bad = None
    for i in range(5):
        pos = set(X[i]) | set(X[(i + 1) % 5])
        lt = [(tuple(-x for x in e), 0) if j in pos else (tuple(e), 0) for j, e in enumerate(E)]
        res = lp_feasible(Polyhedron.build(3, lt=lt, eq=[(minus_K, 0)]))
        if not res.feasible:
            lp_bad = lp_bad or f"no functional for block {i}"
    checks.append(_check("condition2_lp", lp_bad is None, lp_bad))
    # condition 3
    failed = None
    for i in range(5):
        for trip in product(X[i], X[(i + 1) % 5], X[(i + 3) % 5]):
            d = det([E[j] for j in trip])
            if abs(d) != 1:
                failed = failed or {"triple": [list(inst.labels[j]) for j in trip], "det": int(d)}
    checks.append(_check("condition3_unimodular", failed is None, failed))
    # duality between the listed rays and divisors
    try:
        dual_ok = unimodularly_equivalent(gale_dual(inst.rays).dual, E) and not gale_dual(inst.rays).torsion_orders
    except ToricError:  # spanning failures count as a failed check
        dual_ok = False
    checks.append(_check("gale_duality", dual_ok))
    if inst.fan is not None:
        fano = check_fano(inst.fan)
        checks.append(_check("fano", fano["fano"]))
    ok_all = all(c["status"] == "pass" for c in checks)
    return {"params": {"n": p.n, "k": p.k, "a": p.a}, "ok": ok_all, "checks": checks}


def facet_check(inst: FamilyInstance) -> bool:
    """Facet complements from the dual predicates equal the listed triples."""
    pair = gale_dual(inst.rays)
    pair = GaleDualPair(pair.primal, inst.divisors, (), tuple(() for _ in inst.divisors))
    preds = polytope_predicates(pair)
    return (
        preds.is_vertex_set
        and preds.is_simplicial
        and sorted(preds.facet_complements) == facet_complement_triples(inst.X)
    )


# --- closed-form forbidden sets ---------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def closed_form_forbidden(inst: FamilyInstance) -> dict[str, Callable]:
    """Twelve membership predicates on ``(x, y, z)``.

    Eight are direct inequality descriptions; the remaining four follow
    from ``L in K_I  <=>  K - L in K_{complement of I}``.
    """
    n, k, a = inst.params.n, inst.params.k, inst.params.a
    K = inst.canonical

    def eff(x, y, z):
        return z >= 0 and x >= -a * z + max(-y, 0)

    def khat1(x, y, z):
        return y >= 1 and z >= 0 and x <= -n - 2 * a - 1

    def khat2(x, y, z):
        return y <= z - 1 and z >= 0 and x <= -n - 2 * a - 1 + z - y

    def k0(x, y, z):
        return y <= min(-k - 1, z - 1) and x <= -a * (y + k) - n - 2 * a

    def khat0(x, y, z):
        return y >= max(1, z + n + 1) and x >= -a * y + 2 * a - 1

    def k3(x, y, z):
        return y >= max(z + n + 1, 1) and x <= a * (y - z - n - 1) - n - a - 1

    def khat3(x, y, z):
        return y <= min(z - 1, -k - 1) and x >= a * (y - z) + 2 * a

    def k4(x, y, z):
        return z >= 0 and x <= -n - 2 * a - 1 + min(0, z - y)

    def dual(pred):
        return lambda x, y, z: pred(K[0] - x, K[1] - y, K[2] - z)

    return {
        "eff": eff,
        "neg": dual(eff),
        "K_0": k0,
        "Khat_0": khat0,
        "K_1": dual(khat1),
        "Khat_1": khat1,
        "K_2": dual(khat2),
        "Khat_2": khat2,
        "K_3": k3,
        "Khat_3": khat3,
        "K_4": k4,
        "Khat_4": dual(k4),
    }


def family_index_sets(inst: FamilyInstance) -> dict[str, tuple]:
    """Index sets matching the labels of :func:`closed_form_forbidden`."""
    X = inst.X

    def union(*idx):
        return tuple(sorted(j for i in idx for j in X[i % 5]))

    out = {"eff": (), "neg": tuple(range(len(inst.divisors)))}
    for i in range(5):
        out[f"K_{i}"] = union(i, i + 1, i + 2)
        out[f"Khat_{i}"] = union(i + 3, i + 4)
    return out


def in_K_all(inst: FamilyInstance, L, forms: dict | None = None) -> bool:
    forms = forms or closed_form_forbidden(inst)
    return any(f(*L) for f in forms.values())


def slab_bounds(p: FamilyParams) -> dict:
    """Amplitude and fixed-``z`` bounds on exceptional collections."""
    n, k, a = p.n, p.k, p.a
    c = _ceil_div(n, a)
    return {"amplitude": n + k + c + 1, "z_fixed": (n + 2 * a + 1) * (n + 3)}
