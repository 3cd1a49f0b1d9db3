"""Exact integer and rational linear algebra.

Matrices are plain lists of rows holding ``int`` or ``Fraction`` entries.
Nothing in this module touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def columns(A: Sequence[Sequence]) -> list:
    return transpose(A)


def copy_matrix(A: Sequence[Sequence]) -> list:
    return [list(r) for r in A]


def primitive(v: Sequence) -> tuple:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def det(A: Sequence[Sequence]) -> Fraction | int:
    """Determinant by fraction-free Bareiss elimination (exact)."""
    n = len(A)
    if n == 0:
        return 1
    if all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for row in A for x in row):
        return _det_integer([[int(x) for x in row] for row in A])
    M = [[Fraction(x) for x in row] for row in A]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev
        prev = M[k][k]
    d = sign * M[n - 1][n - 1]
    return int(d) if d.denominator == 1 else d


def _det_integer(M: list) -> int:
    """Bareiss on integers: every division is exact."""
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            row, lead = M[i], M[i][k]
            top = M[k]
            for j in range(k + 1, n):
                row[j] = (row[j] * pivot - lead * top[j]) // prev
        prev = pivot
    return sign * M[n - 1][n - 1]


def rref(A: Sequence[Sequence]) -> tuple[list, list]:
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def solve(A: Sequence[Sequence], b: Sequence) -> list | None:
    """One rational solution of ``A x = b`` or ``None`` if inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def inverse(A: Sequence[Sequence]) -> list:
    n = len(A)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def nullspace_rational(A: Sequence[Sequence], ncols: int | None = None) -> list:
    """Basis of the rational kernel of ``A`` (list of vectors)."""
    if ncols is None:
        ncols = len(A[0])
    if not A:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(A)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


# --- Smith and Hermite normal forms -------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U * A * V == diag(d)`` with ``U``, ``V`` unimodular.

    ``d`` has length ``min(rows, cols)``; nonzero entries come first and
    each divides the next.
    """

    U: tuple
    d: tuple
    V: tuple
    rank: int

    def diagonal_matrix(self, rows: int, cols: int) -> Matrix:
        D = [[0] * cols for _ in range(rows)]
        for i, x in enumerate(self.d):
            D[i][i] = x
        return D


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithForm:
    if not A or not A[0]:
        raise ValueError("smith_normal_form needs a nonempty matrix")
    m, n = len(A), len(A[0])
    M = [[int(x) for x in row] for row in A]
    U = identity(m)
    V = identity(n)
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if M[i][j] and (best is None or abs(M[i][j]) < abs(M[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        _swap_rows(M, t, i)
        _swap_rows(U, t, i)
        _swap_cols(M, t, j)
        _swap_cols(V, t, j)
        done = False
        while not done:
            done = True
            p = M[t][t]
            for i in range(t + 1, m):
                q = M[i][t] // p
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
            for j in range(t + 1, n):
                q = M[t][j] // p
                if q:
                    for row in M:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
            # a remainder smaller than the pivot takes over as pivot
            best = None
            for i in range(t + 1, m):
                if M[i][t] and (best is None or abs(M[i][t]) < abs(M[best[0]][best[1]])):
                    best = (i, t)
            for j in range(t + 1, n):
                if M[t][j] and (best is None or abs(M[t][j]) < abs(M[best[0]][best[1]])):
                    best = (t, j)
            if best is not None:
                done = False
                i, j = best
                if j == t:
                    _swap_rows(M, t, i)
                    _swap_rows(U, t, i)
                else:
                    _swap_cols(M, t, j)
                    _swap_cols(V, t, j)
                continue
            # enforce divisibility of the trailing block
            p = M[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p),
                None,
            )
            if bad is not None:
                M[t] = [a + b for a, b in zip(M[t], M[bad])]
                U[t] = [a + b for a, b in zip(U[t], U[bad])]
                done = False
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    d = tuple(M[i][i] for i in range(min(m, n)))
    r = sum(1 for x in d if x)
    return SmithForm(tuple(map(tuple, U)), d, tuple(map(tuple, V)), r)


def smith_diagonal(A: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors only (no transforms); used for homology."""
    if not A or not A[0]:
        return []
    M = [[int(x) for x in row] for row in A]
    m, n = len(M), len(M[0])
    diag = []
    # unit pivots first: cheap elimination that keeps entries small
    alive_r = list(range(m))
    alive_c = list(range(n))
    changed = True
    while changed:
        changed = False
        for i in alive_r:
            row = M[i]
            j = next((c for c in alive_c if abs(row[c]) == 1), None)
            if j is None:
                continue
            p = row[j]
            for k in alive_r:
                if k != i and M[k][j]:
                    f = M[k][j] * p
                    rk = M[k]
                    for c in alive_c:
                        if row[c]:
                            rk[c] -= f * row[c]
            alive_r.remove(i)
            alive_c.remove(j)
            diag.append(1)
            changed = True
            break
    rest = [[M[i][j] for j in alive_c] for i in alive_r]
    if rest and rest[0] and any(any(r) for r in rest):
        diag.extend(x for x in smith_normal_form(rest).d if x)
    return sorted(diag)


def hermite_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style HNF: returns ``(H, W)`` with ``W * A == H``, ``W`` unimodular.

    Pivots are positive, entries above a pivot are reduced into
    ``[0, pivot)``, zero rows sink to the bottom.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [[int(x) for x in row] for row in A]
    W = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            _swap_rows(H, r, piv)
            _swap_rows(W, r, piv)
            clean = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    W[i] = [a - q * b for a, b in zip(W[i], W[r])]
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if not H[r][c]:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            W[r] = [-x for x in W[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                W[i] = [a - q * b for a, b in zip(W[i], W[r])]
        r += 1
    return H, W


def integer_kernel(A: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Lattice basis of ``{x in Z^n : A x = 0}`` (rows of the result)."""
    if ncols is None:
        ncols = len(A[0])
    if not A or not any(any(r) for r in A):
        return identity(ncols)
    snf = smith_normal_form(A)
    V = snf.V
    basis = [[V[i][j] for i in range(ncols)] for j in range(snf.rank, ncols)]
    if not basis:
        return []
    H, _ = hermite_normal_form(basis)
    return [row for row in H if any(row)]


def integer_solution(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """One integer solution of ``A x = b`` or ``None``."""
    m = len(A)
    n = len(A[0])
    snf = smith_normal_form(A)
    Ub = matvec(snf.U, b)
    y = [0] * n
    for i in range(m):
        di = snf.d[i] if i < len(snf.d) else 0
        if di == 0:
            if Ub[i] != 0:
                return None
        else:
            if Ub[i] % di:
                return None
            y[i] = Ub[i] // di
    return matvec(snf.V, y)


def unimodular_completion(w: Sequence[int]) -> Matrix:
    """Unimodular ``U`` with ``U @ w == e_1`` for a primitive integer ``w``."""
    snf = smith_normal_form([[x] for x in w])
    if snf.d[0] != 1:
        raise ValueError("vector is not primitive")
    # snf.U * w * V = e1 * 1, V = (+-1)
    s = snf.V[0][0]
    return [[s * x for x in row] for row in snf.U]


def is_unimodular(A: Sequence[Sequence[int]]) -> bool:
    return len(A) == len(A[0]) and abs(det(A)) == 1


def unimodular_equivalence(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix | None:
    """Integer ``M`` with ``det M = +-1`` and ``M A == B`` (columns are the
    ordered vectors), or ``None`` when no such matrix exists."""
    if len(A) != len(B) or (A and len(A[0]) != len(B[0])):
        return None
    d = len(A)
    if d == 0:
        return []
    _, piv = rref(A)
    if len(piv) != d:
        return None
    As = [[A[i][j] for j in piv] for i in range(d)]
    Bs = [[B[i][j] for j in piv] for i in range(d)]
    M = matmul(Bs, inverse(As))
    if any(x.denominator != 1 for row in M for x in row):
        return None
    M = [[int(x) for x in row] for row in M]
    if abs(det(M)) != 1:
        return None
    if matmul(M, [list(r) for r in A]) != [list(r) for r in B]:
        return None
    return M
