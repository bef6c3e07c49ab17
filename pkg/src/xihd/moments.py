"""Exact finite-sample null moments of the coefficient.

When all p columns are mutually independent with continuous marginals, the
rank pattern feeding each pairwise coefficient is a uniformly random
permutation, so every null moment is a ratio of integer polynomials in n.
This module evaluates those closed forms and, independently, recomputes the
same moments by brute-force enumeration over all n! permutations
(:func:`exact_moments_by_enumeration`) so the polynomials can be validated
exactly at small n.

Closed forms (valid for n >= 4; at n = 3 the enumerated variance departs from
the polynomial because the case counts behind it collapse):

    E xi         = 0
    E xi^2       = u_n    = (n-2)(4n-7) / (10 (n-1)^2 (n+1))
    Var xi^2     = v_n^2  = (224 n^5 - 1792 n^4 + 5051 n^3 - 4969 n^2
                            - 2458 n + 18128) / (700 (n-1)^4 (n+1)^3)
    Cov(xi_kl^2, xi_lk^2) = (n-2)(784 n^5 - 8022 n^4 + 27301 n^3 - 24228 n^2
                            - 5045 n - 44070) / (50 n (n+1)^4 (n-1)^5)

and for the sum T = sum_{k != l} xi_kl^2 over p >= 2 independent columns,

    E T   = p (p-1) u_n
    Var T = p (p-1) (v_n^2 + Cov(xi_kl^2, xi_lk^2)),

which :func:`stat_moments` evaluates through a single combined polynomial
ratio.  The identity between that combined form and v_n^2 + cov is part of
the test suite.

Everything is evaluated in double precision via Horner-form polynomials; the
leading terms dominate for large n so there is no catastrophic cancellation,
and n^8 stays far inside double range for any realistic sample size.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, DomainTooSmall, TooLarge

_ENUMERATION_CEILING = 8  # 8! = 40320 permutations; 9! would already be 362880


def _require_n(n: int, floor: int = 3) -> int:
    if int(n) != n or n < floor:
        raise DomainTooSmall(f"n must be an integer >= {floor}, got {n!r}")
    return int(n)


def u_n(n: int) -> float:
    """E(xi^2) under the null: (n-2)(4n-7) / (10 (n-1)^2 (n+1)).

    Decreasing in n for n >= 5 and asymptotically 2/(5n).
    """
    m = float(_require_n(n))
    return (m - 2.0) * (4.0 * m - 7.0) / (10.0 * (m - 1.0) ** 2 * (m + 1.0))


def v_n2(n: int) -> float:
    """Var(xi^2) under the null; asymptotically 0.32 / n^2."""
    m = float(_require_n(n))
    num = ((((224.0 * m - 1792.0) * m + 5051.0) * m - 4969.0) * m - 2458.0) * m + 18128.0
    return num / (700.0 * (m - 1.0) ** 4 * (m + 1.0) ** 3)


def cov_xi2(n: int) -> float:
    """Cov(xi_kl^2, xi_lk^2): the two orientations of a pair share ranks."""
    m = float(_require_n(n))
    num = ((((784.0 * m - 8022.0) * m + 27301.0) * m - 24228.0) * m - 5045.0) * m - 44070.0
    return (m - 2.0) * num / (50.0 * m * (m + 1.0) ** 4 * (m - 1.0) ** 5)


@dataclass(frozen=True)
class StatMoments:
    """Null mean and variance of the off-diagonal sum of squared coefficients."""

    mu_np: float
    sigma_np2: float


def stat_moments(n: int, p: int) -> StatMoments:
    """Exact null mean/variance of T = sum_{k != l} xi_kl^2 for an n x p sample."""
    m = float(_require_n(n))
    if int(p) != p or p < 2:
        raise DomainTooSmall(f"p must be an integer >= 2, got {p!r}")
    pairs = float(p) * (float(p) - 1.0)
    num = (((((((224.0 * m - 1792.0) * m + 15803.0) * m - 137437.0) * m + 599321.0) * m
             - 1080523.0) * m + 610212.0) * m - 493848.0) * m + 1233960.0
    sigma2 = pairs * num / (700.0 * m * (1.0 + m) ** 4 * (m - 1.0) ** 5)
    return StatMoments(mu_np=pairs * u_n(n), sigma_np2=sigma2)


@dataclass(frozen=True)
class EnumeratedMoments:
    """Moments recomputed exactly over all n! rank patterns (no closed forms)."""

    n: int
    mean_xi: Fraction
    mean_xi2: Fraction
    var_xi2: Fraction
    cov_xi2: Fraction


def exact_moments_by_enumeration(n: int) -> EnumeratedMoments:
    """Enumerate every permutation of 1..n and average the coefficient exactly.

    Under the null the concomitant rank vector of a pair is a uniform random
    permutation pi, the coefficient is xi(pi) = 1 - 3 S(pi) / (n^2 - 1) with
    S(pi) = sum |pi[i+1] - pi[i]|, and the opposite orientation of the same
    pair has the law of xi(pi^{-1}).  All accumulation is over exact integers
    (xi = a / (n^2-1) with a = n^2 - 1 - 3 S), so the returned rationals are
    exact for every admissible n.  Refuses n > 8: 9! permutations and beyond
    buy nothing that n <= 8 does not already pin down.
    """
    m = _require_n(n)
    if m > _ENUMERATION_CEILING:
        raise TooLarge(f"full enumeration supported for n <= {_ENUMERATION_CEILING}, got {m}")
    d = m * m - 1
    count = math.factorial(m)
    sum_a = sum_a2 = sum_a4 = sum_cross = 0
    inverse = [0] * m
    for perm in itertools.permutations(range(1, m + 1)):
        s = 0
        prev = perm[0]
        for v in perm[1:]:
            s += abs(v - prev)
            prev = v
        for i, v in enumerate(perm):
            inverse[v - 1] = i + 1
        t = 0
        prev = inverse[0]
        for v in inverse[1:]:
            t += abs(v - prev)
            prev = v
        a = d - 3 * s
        b = d - 3 * t
        a2 = a * a
        sum_a += a
        sum_a2 += a2
        sum_a4 += a2 * a2
        sum_cross += a2 * b * b
    mean_xi = Fraction(sum_a, count * d)
    mean_xi2 = Fraction(sum_a2, count * d**2)
    var_xi2 = Fraction(sum_a4, count * d**4) - mean_xi2**2
    cov = Fraction(sum_cross, count * d**4) - mean_xi2**2
    return EnumeratedMoments(n=m, mean_xi=mean_xi, mean_xi2=mean_xi2, var_xi2=var_xi2, cov_xi2=cov)
