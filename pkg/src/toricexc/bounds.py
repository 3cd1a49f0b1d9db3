"""Exact evaluation of the length bound ``E(n, k, a, eps)`` for ``Y_{n,k,a}``
and the search for the smallest ``k`` past which ``rk K0`` exceeds it."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParams, EpsilonOutOfRange
from .family import rk_k0_closed_form

QUARTER = Fraction(1, 4)


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _params(n, k, a):
    if n < 2 or k < 2 or a < 1:
        raise BadParams("need n >= 2, k >= 2, a >= 1")


def check_epsilon(n: int, a: int, eps) -> Fraction:
    eps = Fraction(eps)
    if not (Fraction(2 * a, n) <= eps < QUARTER):
        raise EpsilonOutOfRange(f"need 2a/n <= eps < 1/4; got eps = {eps}, 2a/n = {Fraction(2 * a, n)}")
    return eps


def amplitude_bound(n: int, k: int, a: int) -> int:
    return n + k + ceil_div(n, a) + 1


def t_eps_bound(n: int, k: int, a: int, eps) -> Fraction:
    c = ceil_div(n, a)
    eps = Fraction(eps)
    return Fraction((c + 2)) * (k + eps * n) / (eps * n * (n + k + c + 2))


def z_fixed_bound(n: int, a: int) -> int:
    return (n + 2 * a + 1) * (n + 3)


def z_fixed_strong_bound(n: int, a: int, eps) -> Fraction:
    eps = Fraction(eps)
    return (Fraction(3, 4) + eps) * n * n + (Fraction(3, 2) + eps + a + 2 * eps * a) * n - a * a + a + 1


def _slab_factor(n: int, a: int, eps) -> Fraction:
    """Per-slice excess weight multiplying the ``T_eps`` bound."""
    eps = Fraction(eps)
    return (QUARTER - eps) * n * n + (a + Fraction(5, 2)) * n + a * a + 3 * a + 2


def _base_factor(n: int, a: int, eps) -> Fraction:
    eps = Fraction(eps)
    return (Fraction(3, 4) + eps) * n * n + (Fraction(3, 2) * a + 2) * n - a * a + a + 1


def evaluate_E(n: int, k: int, a: int, eps) -> Fraction:
    """Upper bound on the length of exceptional collections of line bundles."""
    _params(n, k, a)
    eps = check_epsilon(n, a, eps)
    c = ceil_div(n, a)
    return t_eps_bound(n, k, a, eps) * _slab_factor(n, a, eps) + (n + c + k + 2) * _base_factor(n, a, eps)


def intermediate_bound(n: int, k: int, a: int, eps) -> Fraction:
    """Length bound before the slab terms are regrouped; never exceeds ``E``."""
    _params(n, k, a)
    eps = check_epsilon(n, a, eps)
    c = ceil_div(n, a)
    T = t_eps_bound(n, k, a, eps)
    return T * z_fixed_bound(n, a) + (n + k + c + 2 - T) * z_fixed_strong_bound(n, a, eps)


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    a: int
    eps: Fraction
    c: Fraction
    amplitude_bound: int
    t_eps_bound: Fraction
    z_fixed_bound: int
    z_fixed_strong_bound: Fraction
    E_value: Fraction
    rk_k0: int
    margin: Fraction

    def to_json(self) -> dict:
        def q(x):
            return str(x) if isinstance(x, Fraction) else x

        return {key: q(getattr(self, key)) for key in self.__dataclass_fields__}


def bound_components(n: int, k: int, a: int, eps=Fraction(1, 8), c=Fraction(1)) -> BoundReport:
    _params(n, k, a)
    eps = check_epsilon(n, a, eps)
    c = Fraction(c)
    E = evaluate_E(n, k, a, eps)
    rk = rk_k0_closed_form(n, k, a)
    return BoundReport(
        n, k, a, eps, c,
        amplitude_bound(n, k, a),
        t_eps_bound(n, k, a, eps),
        z_fixed_bound(n, a),
        z_fixed_strong_bound(n, a, eps),
        E, rk, c * rk - E,
    )


def leading_coefficient_P2(n: int, a: int, eps, c=Fraction(1)) -> Fraction:
    """Coefficient of ``k^2`` in the numerator of ``c rk K0 - E``."""
    eps, c = Fraction(eps), Fraction(c)
    return eps * n * (
        (c - Fraction(3, 4) - eps) * n * n
        + (2 * a * c + c - Fraction(3, 2) * a - 2) * n
        + 2 * a * c + c + a * a - a - 1
    )


def numerator(n: int, k: int, a: int, eps, c=Fraction(1)) -> Fraction:
    """``(c rk K0 - E) * eps n (n + ceil(n/a) + k + 2)``; same sign as the margin."""
    eps, c = Fraction(eps), Fraction(c)
    cn = ceil_div(n, a)
    rk = rk_k0_closed_form(n, k, a)
    T = Fraction(cn + 2) * (k + eps * n) / (eps * n * (n + k + cn + 2))
    E = T * _slab_factor(n, a, eps) + (n + cn + k + 2) * _base_factor(n, a, eps)
    return (c * rk - E) * eps * n * (n + cn + k + 2)


def quadratic_coefficients(n: int, a: int, eps, c=Fraction(1)) -> tuple:
    """Exact ``(P2, P1, P0)`` recovered by interpolating the numerator at three points."""
    q0, q1, q2 = (numerator(n, k, a, eps, c) for k in (0, 1, 2))
    P2 = (q2 - 2 * q1 + q0) / 2
    P1 = q1 - q0 - P2
    return P2, P1, q0


def counterexample_threshold(n: int, a: int, eps=Fraction(1, 8), c=Fraction(1), cutoff: int = 10**6):
    """Smallest ``k0 >= 2`` with ``c rk K0 > E`` for every ``k >= k0``.

    Returns ``None`` when no such ``k0`` exists at or below ``cutoff``.
    """
    if n < 2 or a < 1:
        raise BadParams("need n >= 2, a >= 1")
    eps = check_epsilon(n, a, eps)
    c = Fraction(c)
    P2, P1, _ = quadratic_coefficients(n, a, eps, c)
    if P2 != leading_coefficient_P2(n, a, eps, c):
        raise AssertionError("interpolated leading coefficient disagrees with the closed form")

    def bad(k):
        return numerator(n, k, a, eps, c) <= 0

    if P2 < 0 or (P2 == 0 and P1 <= 0):
        return None
    if P2 == 0:
        start = 2
    else:
        vertex = -P1 / (2 * P2)
        start = max(2, ceil_div(vertex.numerator, vertex.denominator))
    # to the right of the vertex the numerator is increasing
    if not bad(start):
        last_bad = None
        if start - 1 >= 2 and bad(start - 1):
            last_bad = start - 1
        threshold = 2 if last_bad is None else last_bad + 1
    else:
        lo, hi = start, start + 1
        while bad(hi):
            lo, hi = hi, 2 * hi
            if hi > 4 * cutoff:
                return None
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bad(mid):
                lo = mid
            else:
                hi = mid
        threshold = hi
    return threshold if threshold <= cutoff else None


def smallest_n_with_P2_positive(a: int, eps, c=Fraction(1), start: int = 2, cutoff: int = 10**4):
    for n in range(start, cutoff + 1):
        if leading_coefficient_P2(n, a, eps, c) > 0:
            return n
    return None
