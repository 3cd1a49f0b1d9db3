"""Rational polyhedra: exact LP feasibility, lattice points, integer feasibility.

Feasibility is decided by Fourier-Motzkin elimination with Chernikov's
redundancy rule.  Strict inequalities are carried as flags; internally they
become ``a.x + s <= b`` with one auxiliary slack ``s`` that must end up
positive, so a Motzkin-type certificate comes out of the same elimination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Iterator, Sequence

from .errors import DimensionTooLarge, UnboundedPolyhedron
from .linalg import inverse, matvec, primitive, unimodular_completion


@dataclass(frozen=True)
class Polyhedron:
    """``{x : A x <= b}`` with per-row strictness flags (``<`` where set)."""

    dim: int
    A: tuple
    b: tuple
    strict: tuple = ()

    def __post_init__(self):
        A = tuple(tuple(Fraction(x) for x in row) for row in self.A)
        b = tuple(Fraction(x) for x in self.b)
        strict = tuple(bool(s) for s in self.strict) or (False,) * len(A)
        if len(A) != len(b) or len(strict) != len(A):
            raise ValueError("inconsistent row counts")
        if any(len(row) != self.dim for row in A):
            raise ValueError("row length does not match dimension")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "strict", strict)

    @classmethod
    def build(cls, dim, le=(), lt=(), eq=()):
        """Rows given as ``(normal, offset)`` pairs: ``le`` for ``<=``,
        ``lt`` for ``<`` and ``eq`` for ``==``."""
        A, b, s = [], [], []
        for a, off in le:
            A.append(tuple(a)); b.append(off); s.append(False)
        for a, off in lt:
            A.append(tuple(a)); b.append(off); s.append(True)
        for a, off in eq:
            A.append(tuple(a)); b.append(off); s.append(False)
            A.append(tuple(-x for x in a)); b.append(-Fraction(off)); s.append(False)
        return cls(dim, tuple(A), tuple(b), tuple(s))

    def contains(self, x: Sequence) -> bool:
        for a, bi, st in zip(self.A, self.b, self.strict):
            v = sum(ai * xi for ai, xi in zip(a, x))
            if v > bi or (st and v == bi):
                return False
        return True

    def substitute(self, index: int, value) -> "Polyhedron":
        """Fix coordinate ``index`` to ``value``; returns a polyhedron in ``dim-1``."""
        A, b = [], []
        for a, bi in zip(self.A, self.b):
            A.append(a[:index] + a[index + 1:])
            b.append(bi - a[index] * value)
        return Polyhedron(self.dim - 1, tuple(A), tuple(b), self.strict)

    def transform(self, M) -> "Polyhedron":
        """Polyhedron ``{y : M y in P}`` for a square matrix ``M``."""
        A = [tuple(sum(a[k] * M[k][j] for k in range(self.dim)) for j in range(self.dim)) for a in self.A]
        return Polyhedron(self.dim, tuple(A), self.b, self.strict)

    def closure(self) -> "Polyhedron":
        return Polyhedron(self.dim, self.A, self.b, (False,) * len(self.A))

    def integer_tightened(self) -> "Polyhedron":
        """Same integer points, no strict rows, primitive integer normals."""
        A, b = [], []
        for a, bi, st in zip(self.A, self.b, self.strict):
            if not any(a):
                A.append(a)
                b.append(bi if not (st and bi <= 0) else Fraction(-1))
                continue
            p = primitive(a)
            scale = next(Fraction(pi) / ai for pi, ai in zip(p, a) if ai)
            off = bi * scale
            off = Fraction(ceil(off) - 1) if st else Fraction(floor(off))
            A.append(tuple(Fraction(x) for x in p))
            b.append(off)
        return Polyhedron(self.dim, tuple(A), tuple(b))


@dataclass
class LPResult:
    feasible: bool
    witness: tuple | None = None
    certificate: tuple | None = None

    def check(self, P: Polyhedron) -> bool:
        """Re-verify by substitution (witness) or by recombination (certificate)."""
        if self.feasible:
            return self.certificate is None and self.witness is not None and P.contains(self.witness)
        return self.witness is None and self.certificate is not None and is_farkas_certificate(P, self.certificate)


def is_farkas_certificate(P: Polyhedron, lam: Sequence) -> bool:
    if len(lam) != len(P.A) or any(x < 0 for x in lam):
        return False
    for j in range(P.dim):
        if sum(l * a[j] for l, a in zip(lam, P.A)) != 0:
            return False
    rhs = sum(l * bi for l, bi in zip(lam, P.b))
    if rhs < 0:
        return True
    return rhs == 0 and any(l > 0 and s for l, s in zip(lam, P.strict))


@dataclass
class _Row:
    coef: tuple          # ints; last entry is the slack coefficient when present
    rhs: int
    mult: dict = field(default_factory=dict)   # original row index -> Fraction

    @property
    def support(self):
        return self.mult.keys()


def _normalize(coef, rhs, mult):
    g = 0
    for c in coef:
        g = gcd(g, c)
    g = gcd(g, rhs) if g else 0
    if g > 1:
        coef = tuple(c // g for c in coef)
        rhs //= g
        mult = {k: v / g for k, v in mult.items()}
    return _Row(tuple(coef), rhs, mult)


def _initial_rows(P: Polyhedron, with_slack: bool):
    rows = []
    for i, (a, bi, st) in enumerate(zip(P.A, P.b, P.strict)):
        den = 1
        for x in a + (bi,):
            den = den * x.denominator // gcd(den, x.denominator)
        coef = [int(x * den) for x in a]
        if with_slack:
            coef.append(den if st else 0)
        rows.append(_normalize(tuple(coef), int(bi * den), {i: Fraction(den)}))
    return rows


def _dedup(rows):
    """Drop rows dominated by a row with the same normal, an offset at least
    as tight and a multiplier support that is a subset.  The subset clause
    keeps the Chernikov skip sound."""
    groups: dict = {}
    for r in rows:
        groups.setdefault(r.coef, []).append(r)
    out = []
    for group in groups.values():
        group.sort(key=lambda r: (r.rhs, len(r.mult)))
        kept = []
        for r in group:
            sup = r.mult.keys()
            if any(k.rhs <= r.rhs and k.mult.keys() <= sup for k in kept):
                continue
            kept.append(r)
        out.extend(kept)
    return out


def _eliminate(rows, k, n_done):
    """Eliminate variable ``k``; ``n_done`` counts eliminations so far."""
    pos = [r for r in rows if r.coef[k] > 0]
    neg = [r for r in rows if r.coef[k] < 0]
    out = [r for r in rows if r.coef[k] == 0]
    limit = n_done + 2
    for rp in pos:
        p = rp.coef[k]
        for rn in neg:
            q = -rn.coef[k]
            sup = rp.mult.keys() | rn.mult.keys()
            if len(sup) > limit:
                continue  # Chernikov: implied by rows with smaller support
            coef = tuple(q * a + p * b for a, b in zip(rp.coef, rn.coef))
            rhs = q * rp.rhs + p * rn.rhs
            mult = {}
            for key in sup:
                mult[key] = q * rp.mult.get(key, 0) + p * rn.mult.get(key, 0)
            out.append(_normalize(coef, rhs, mult))
    return _dedup(out)


def _pick(lo, hi):
    """A pleasant value in ``[lo, hi]`` (either end may be ``None``)."""
    if (lo is None or lo <= 0) and (hi is None or hi >= 0):
        return Fraction(0)
    if lo is not None and (hi is None or ceil(lo) <= hi):
        return Fraction(ceil(lo))
    if hi is not None and (lo is None or floor(hi) >= lo):
        return Fraction(floor(hi))
    return lo


def _bounds(rows, k, values):
    """Bounds for variable ``k`` given ``values`` for the other variables."""
    lo = hi = None
    for r in rows:
        c = r.coef[k]
        if c == 0:
            continue
        rest = r.rhs - sum(r.coef[j] * v for j, v in values.items() if j != k)
        bound = Fraction(rest, 1) / c
        if c > 0:
            hi = bound if hi is None or bound < hi else hi
        else:
            lo = bound if lo is None or bound > lo else lo
    return lo, hi


def lp_feasible(P: Polyhedron) -> LPResult:
    """Exact feasibility of ``P``; returns a witness or a Farkas certificate."""
    with_slack = any(P.strict)
    rows = _initial_rows(P, with_slack)
    nvar = P.dim + int(with_slack)
    stages = []
    for k in range(P.dim):
        stages.append(rows)
        rows = _eliminate(rows, k, k)
    # remaining rows involve only the slack (if present)
    s_hi = None
    for r in rows:
        c = r.coef[-1] if with_slack else 0
        if c == 0:
            if r.rhs < 0:
                return _infeasible(P, r)
        else:
            # c > 0 always: slack only enters with positive sign
            if r.rhs <= 0:
                return _infeasible(P, r)
            b = Fraction(r.rhs, c)
            s_hi = b if s_hi is None or b < s_hi else s_hi
    values = {}
    if with_slack:
        values[nvar - 1] = Fraction(1) if s_hi is None else min(Fraction(1), s_hi / 2)
    for k in reversed(range(P.dim)):
        lo, hi = _bounds(stages[k], k, values)
        values[k] = _pick(lo, hi)
    x = tuple(values[k] for k in range(P.dim))
    if not P.contains(x):
        raise AssertionError("elimination produced a point outside the polyhedron")
    return LPResult(True, witness=x)


def _infeasible(P, row):
    lam = [Fraction(0)] * len(P.A)
    for key, v in row.mult.items():
        lam[key] = v
    if not is_farkas_certificate(P, lam):
        raise AssertionError("elimination produced an invalid infeasibility certificate")
    return LPResult(False, certificate=tuple(lam))


def project(P: Polyhedron, keep: int) -> Polyhedron:
    """Projection onto the first ``keep`` coordinates (closure semantics for
    strictness is preserved: a derived row is strict if any parent is)."""
    with_slack = any(P.strict)
    rows = _initial_rows(P, with_slack)
    for n_done, k in enumerate(reversed(range(keep, P.dim))):
        rows = _eliminate(rows, k, n_done)
    A, b, s = [], [], []
    for r in rows:
        a = r.coef[:keep]
        strict = with_slack and r.coef[-1] > 0
        if not any(a):
            if r.rhs < 0 or (strict and r.rhs <= 0):
                # empty: emit 0 <= -1
                return Polyhedron(keep, ((Fraction(0),) * keep,), (Fraction(-1),))
            continue
        A.append(a); b.append(r.rhs); s.append(strict)
    return Polyhedron(keep, tuple(A), tuple(b), tuple(s))


def _interval(P: Polyhedron):
    """Bounds of a 1-dimensional polyhedron: (lo, lo_strict, hi, hi_strict, empty)."""
    lo = hi = None
    lo_s = hi_s = False
    for a, bi, st in zip(P.A, P.b, P.strict):
        c = a[0]
        if c == 0:
            if bi < 0 or (st and bi <= 0):
                return None
            continue
        v = bi / c
        if c > 0:
            if hi is None or v < hi or (v == hi and st):
                hi, hi_s = v, st
        else:
            if lo is None or v > lo or (v == lo and st):
                lo, lo_s = v, st
    return lo, lo_s, hi, hi_s


def _int_range(iv):
    lo, lo_s, hi, hi_s = iv
    a = None if lo is None else (floor(lo) + 1 if lo_s and lo == floor(lo) else ceil(lo))
    b = None if hi is None else (ceil(hi) - 1 if hi_s and hi == ceil(hi) else floor(hi))
    return a, b


def recession_direction(P: Polyhedron) -> tuple | None:
    """A primitive integer vector in the recession cone, or ``None``."""
    base = [(a, 0) for a in P.A]
    for k in range(P.dim):
        for sign in (1, -1):
            e = tuple(Fraction(-sign if j == k else 0) for j in range(P.dim))
            Q = Polyhedron.build(P.dim, le=base + [(e, -1)])
            res = lp_feasible(Q)
            if res.feasible:
                return primitive(res.witness)
    return None


def enumerate_lattice_points(P: Polyhedron) -> list[tuple]:
    """All integer points of a bounded polyhedron, lexicographically sorted."""
    if not lp_feasible(P).feasible:
        return []
    if recession_direction(P.closure()) is not None:
        raise UnboundedPolyhedron("polyhedron has a nonzero recession direction")
    return sorted(_points(P.integer_tightened()))


def _points(P: Polyhedron) -> Iterator[tuple]:
    if P.dim == 0:
        if all(bi >= 0 for bi in P.b):
            yield ()
        return
    iv = _interval(project(P, 1))
    if iv is None:
        return
    a, b = _int_range(iv)
    if a is None or b is None:
        raise UnboundedPolyhedron("unbounded coordinate during enumeration")
    for v in range(a, b + 1):
        for rest in _points(P.substitute(0, v)):
            yield (v,) + rest


@dataclass
class IntegerResult:
    feasible: bool
    witness: tuple | None = None
    certificate: tuple | None = None   # Farkas certificate of the LP relaxation
    reason: str = ""


MAX_INTEGER_DIM = 4


def integer_feasible(P: Polyhedron) -> IntegerResult:
    """Decide whether ``P`` contains an integer point (``P`` may be unbounded)."""
    if P.dim > MAX_INTEGER_DIM:
        raise DimensionTooLarge(f"integer_feasible supports dim <= {MAX_INTEGER_DIM}, got {P.dim}")
    T = P.integer_tightened()
    lp = lp_feasible(T)
    if not lp.feasible:
        return IntegerResult(False, certificate=lp.certificate, reason="lp-infeasible")
    w = _integer_search(T)
    if w is None:
        return IntegerResult(False, reason="exhausted")
    return IntegerResult(True, witness=w)


def _integer_search(T: Polyhedron):
    if T.dim == 0:
        return () if all(bi >= 0 for bi in T.b) else None
    if T.dim == 1:
        iv = _interval(T)
        if iv is None:
            return None
        a, b = _int_range(iv)
        if a is None and b is None:
            return (0,)
        if a is None:
            return (b,)
        if b is None:
            return (a,)
        return (a,) if a <= b else None
    if not lp_feasible(T).feasible:
        return None
    w = recession_direction(T)
    if w is not None:
        return _search_along(T, w)
    iv = _interval(project(T, 1))
    if iv is None:
        return None
    a, b = _int_range(iv)
    for v in range(a, b + 1):
        rest = _integer_search(T.substitute(0, v).integer_tightened())
        if rest is not None:
            return (v,) + rest
    return None


def _search_along(T: Polyhedron, w):
    """Quotient by the recession direction ``w`` and recurse."""
    U = unimodular_completion(w)          # U w = e1
    Uinv = [[int(x) for x in row] for row in inverse(U)]
    Ty = T.transform(Uinv)                # y-coordinates, x = Uinv y
    # move y0 to the end so that projection keeps the leading coordinates
    d = T.dim
    perm = [[1 if j == (i - 1) % d else 0 for j in range(d)] for i in range(d)]
    # z = (y1..y_{d-1}, y0); y = perm z
    Tz = Ty.transform(perm)
    rest = project(Tz, d - 1).integer_tightened()
    sub = _integer_search(rest)
    if sub is None:
        return None
    Tfix = Tz
    for v in sub:
        Tfix = Tfix.substitute(0, v)
    iv = _interval(Tfix)
    lo, _ = _int_range(iv)
    y0 = 0 if lo is None else lo
    z = list(sub) + [y0]
    y = matvec(perm, z)
    x = matvec(Uinv, y)
    return tuple(int(v) for v in x)
