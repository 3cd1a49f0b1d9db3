"""Normal forms and kernels against sympy and determinantal divisors."""
import random
from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from toricexc.linalg import (
    det,
    hermite_normal_form,
    integer_kernel,
    integer_solution,
    inverse,
    is_unimodular,
    matmul,
    matvec,
    nullspace_rational,
    rank,
    smith_diagonal,
    smith_normal_form,
    solve,
    unimodular_completion,
    unimodular_equivalence,
)

matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def determinantal_divisors(A):
    """Invariant factors from gcds of minors; independent of any elimination."""
    m, n = len(A), len(A[0])
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                minor = sympy.Matrix([[A[r][c] for c in cols] for r in rows]).det()
                g = gcd(g, int(minor))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_form_is_certified_and_matches_minors(A):
    snf = smith_normal_form(A)
    D = snf.diagonal_matrix(len(A), len(A[0]))
    assert matmul(matmul(snf.U, A), snf.V) == D
    assert is_unimodular(snf.U) and is_unimodular(snf.V)
    nonzero = [x for x in snf.d if x]
    assert nonzero == determinantal_divisors(A)
    assert snf.rank == len(nonzero) == sympy.Matrix(A).rank()


def test_smith_diagonal_against_sympy():
    rng = random.Random(3)
    from sympy.matrices.normalforms import smith_normal_form as sym_snf

    for _ in range(40):
        A = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(3)]
        S = sym_snf(sympy.Matrix(A), domain=sympy.ZZ)
        theirs = sorted(abs(int(S[i, i])) for i in range(3) if S[i, i] != 0)
        ours = sorted(x for x in smith_diagonal(A) if x)
        assert ours == theirs


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_hermite_form(A):
    H, W = hermite_normal_form(A)
    assert matmul(W, A) == H
    assert is_unimodular(W)
    pivots = []
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            pivots.append(nz[0])
            assert row[nz[0]] > 0
    assert pivots == sorted(set(pivots))
    for r, c in enumerate(pivots):
        for i in range(r):
            assert 0 <= H[i][c] < H[r][c]


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_integer_kernel_is_saturated_basis(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    assert len(K) == n - sympy.Matrix(A).rank()
    for row in K:
        assert matvec(A, row) == [0] * len(A)
    if K:
        # a saturated sublattice has trivial invariant factors
        assert all(x == 1 for x in smith_diagonal(K))


def test_det_rank_inverse_against_sympy():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 5)
        A = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        M = sympy.Matrix(A)
        assert det(A) == int(M.det())
        assert rank(A) == M.rank()
        if M.det() != 0:
            inv = inverse(A)
            assert matmul(inv, A) == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def test_solve_and_nullspace():
    A = [[1, 2, 3], [4, 5, 6]]
    x = solve(A, [6, 15])
    assert matvec(A, x) == [6, 15]
    for v in nullspace_rational(A):
        assert matvec(A, v) == [0, 0]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_integer_solution_respects_divisibility():
    assert integer_solution([[2, 4]], [3]) is None
    x = integer_solution([[2, 4]], [6])
    assert 2 * x[0] + 4 * x[1] == 6
    x = integer_solution([[3, 5, 7], [1, 1, 1]], [10, 2])
    assert matvec([[3, 5, 7], [1, 1, 1]], x) == [10, 2]


def test_unimodular_completion_and_equivalence():
    U = unimodular_completion([6, 10, 15])
    assert is_unimodular(U)
    assert matvec(U, [6, 10, 15]) == [1, 0, 0]
    with pytest.raises(ValueError):
        unimodular_completion([2, 4])
    A = [[1, 0, 1], [0, 1, 1]]
    M = [[2, 1], [1, 1]]
    B = matmul(M, A)
    assert unimodular_equivalence(A, B) == M
    assert unimodular_equivalence(A, [[2, 0, 2], [0, 1, 1]]) is None
