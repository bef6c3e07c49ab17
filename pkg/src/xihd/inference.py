"""Complete-independence tests and their calibration.

Three tests of H0: "all p columns are mutually independent", all driven by the
matrix of pairwise coefficients xi_kl of an n x p sample:

* quadratic -- standardizes T = sum_{k != l} xi_kl^2 by its exact null moments
  (:mod:`xihd.moments`); the statistic J is asymptotically standard normal and
  the test rejects for J above the upper-alpha normal quantile.  Sensitive to
  dense, individually weak dependence.

* extreme -- takes L = max_{k != l} |xi_kl| and forms
  M = L^2 / u_n - c_p with c_p = 4 log(sqrt(2) p) - log log(sqrt(2) p).  Under
  H0, P(M <= y) -> exp(-exp(-y/2) / sqrt(8 pi)), a Gumbel-type law; the test
  rejects for M above that law's upper-alpha quantile.  Sensitive to a few
  strong pairs.

* enhanced -- augments the quadratic statistic with a nonnegative screening
  term J0 that is 0 with probability tending to one under H0 but diverges
  whenever some pair is strongly dependent: with threshold
  sqrt(u_n) * delta_np and delta_np = sqrt(c_p) * log log n, the screening set
  is S = {(k,l): |xi_kl| > sqrt(u_n) * delta_np} and
  J0 = sqrt(p(p-1)) * sum_S xi_kl^2 / u_n.  The enhanced statistic J0 + J uses
  the same normal critical value, costs nothing in size, and recovers power
  against sparse alternatives the quadratic test misses.

All logarithms here are natural, and reported pair indices are 1-based to
match the usual matrix-subscript convention.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from .coeff import XiMatrix, xi_matrix
from .data import as_data_matrix, break_ties
from .errors import DomainError, DomainTooSmall
from .moments import stat_moments, u_n

KINDS = ("quadratic", "extreme", "enhanced")

_SQRT_2 = math.sqrt(2.0)
_SQRT_8PI = math.sqrt(8.0 * math.pi)
_NORMAL = statistics.NormalDist()

# Floors for any test entry point: below n = 5 the normal/Gumbel calibration
# is meaningless, and p = 1 has no pairs to test.
MIN_N = 5
MIN_P = 2


def normal_sf(x: float) -> float:
    """Standard normal upper tail P(Z > x), accurate into the far tail."""
    return 0.5 * math.erfc(x / _SQRT_2)


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(q: float) -> float:
    """Upper-tail standard normal quantile: the z with P(Z > z) = q.

    Rational approximation polished by one Newton step on the erfc-based
    survival function; good to full double precision across (0, 1).
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie strictly between 0 and 1, got {q!r}")
    z = -_NORMAL.inv_cdf(q)
    d = _normal_pdf(z)
    if d > 1e-300:
        z += (normal_sf(z) - q) / d
    return z


def gumbel_sf(y: float) -> float:
    """Upper tail of the extreme statistic's limit law: 1 - exp(-e^{-y/2} / sqrt(8 pi))."""
    return -math.expm1(-math.exp(-0.5 * y) / _SQRT_8PI)


def gumbel_quantile(q: float) -> float:
    """Inverse of :func:`gumbel_sf`: -2 log(sqrt(8 pi) * (-log(1 - q)))."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie strictly between 0 and 1, got {q!r}")
    return -2.0 * math.log(_SQRT_8PI * (-math.log1p(-q)))


def cp(p: int) -> float:
    """Centering constant 4 log(sqrt(2) p) - log log(sqrt(2) p) for the extreme test."""
    if int(p) != p or p < 2:
        raise DomainTooSmall(f"p must be an integer >= 2, got {p!r}")
    t = math.log(_SQRT_2 * p)
    return 4.0 * t - math.log(t)


def delta_np(n: int, p: int) -> float:
    """Screening scale sqrt(c_p) * log log n (natural logs, n >= 3)."""
    if int(n) != n or n < 3:
        raise DomainTooSmall(f"n must be an integer >= 3, got {n!r}")
    return math.sqrt(cp(p)) * math.log(math.log(n))


def quadratic_stat(xi: XiMatrix) -> float:
    """Standardized off-diagonal sum of squares, (T - mu_np) / sigma_np."""
    mom = stat_moments(xi.n, xi.p)
    t = float(np.nansum(xi.values * xi.values))
    return (t - mom.mu_np) / math.sqrt(mom.sigma_np2)


def extreme_stat(xi: XiMatrix) -> float:
    """(max_{k != l} |xi_kl|)^2 / u_n - c_p."""
    l_max = float(np.nanmax(np.abs(xi.values)))
    return l_max * l_max / u_n(xi.n) - cp(xi.p)


def screening_threshold(n: int, p: int) -> float:
    """Absolute-coefficient cutoff sqrt(u_n) * delta_np for entering the screening set."""
    return math.sqrt(u_n(n)) * delta_np(n, p)


def screening_set(xi: XiMatrix) -> list[tuple[int, int]]:
    """Ordered pairs (k, l), 1-based, with |xi_kl| strictly above the cutoff.

    Returned in lexicographic order.  Both orientations of a dependent pair
    may appear; they are distinct entries.
    """
    mask = np.abs(xi.values) > screening_threshold(xi.n, xi.p)
    return [(int(k) + 1, int(l) + 1) for k, l in np.argwhere(mask)]


def j0(xi: XiMatrix) -> float:
    """Screening statistic sqrt(p(p-1)) * sum over the screening set of xi^2 / u_n.

    Nonnegative by construction and exactly 0.0 when the screening set is
    empty, which is what makes the enhanced test free of size distortion.
    """
    mask = np.abs(xi.values) > screening_threshold(xi.n, xi.p)
    if not mask.any():
        return 0.0
    vals = xi.values[mask]
    p = xi.p
    return math.sqrt(p * (p - 1.0)) * float(np.sum(vals * vals)) / u_n(xi.n)


@dataclass
class TestReport:
    """Outcome of a single test run, flat enough to round-trip through JSON."""

    __test__ = False  # not a pytest test class, despite the name

    kind: str
    statistic: float
    p_value: float
    reject: bool
    alpha: float
    n: int
    p: int
    threshold: float
    screened: bool = False
    screened_pairs: list[tuple[int, int, float]] = field(default_factory=list)
    j0: float | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["screened_pairs"] = [list(t) for t in self.screened_pairs]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TestReport":
        d = dict(d)
        d["screened_pairs"] = [(int(k), int(l), float(v)) for k, l, v in d["screened_pairs"]]
        return cls(**d)


def _validated(data, alpha: float, seed: int | None):
    dm = as_data_matrix(data)
    if seed is not None:
        dm = break_ties(dm, seed)
    if dm.n < MIN_N:
        raise DomainTooSmall(f"tests require n >= {MIN_N} observations, got n={dm.n}")
    if dm.p < MIN_P:
        raise DomainTooSmall(f"tests require p >= {MIN_P} columns, got p={dm.p}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")
    return dm


def report_from_xi(xi: XiMatrix, kind: str, alpha: float = 0.05,
                   seed: int | None = None) -> TestReport:
    """Build a TestReport for one test kind from a precomputed coefficient matrix."""
    if kind not in KINDS:
        raise DomainError(f"unknown test kind {kind!r}; expected one of {KINDS}")
    if kind == "extreme":
        stat = extreme_stat(xi)
        threshold = gumbel_quantile(alpha)
        p_value = gumbel_sf(stat)
        screened_pairs: list[tuple[int, int, float]] = []
        screen_term = None
    else:
        stat = quadratic_stat(xi)
        threshold = normal_quantile(alpha)
        screened_pairs = []
        screen_term = None
        if kind == "enhanced":
            screen_term = j0(xi)
            stat = screen_term + stat
            screened_pairs = [
                (k, l, float(xi.values[k - 1, l - 1])) for k, l in screening_set(xi)
            ]
        p_value = normal_sf(stat)
    return TestReport(
        kind=kind,
        statistic=stat,
        p_value=p_value,
        reject=bool(stat > threshold),
        alpha=alpha,
        n=xi.n,
        p=xi.p,
        threshold=threshold,
        screened=bool(screened_pairs),
        screened_pairs=screened_pairs,
        j0=screen_term,
        seed=seed,
    )


def run_test(data, kind: str = "quadratic", alpha: float = 0.05,
             seed: int | None = None) -> TestReport:
    """Run one complete-independence test on an n x p sample.

    ``seed`` enables random tie-breaking (and is recorded in the report);
    without it, tied columns raise :class:`~xihd.errors.TiesPresent`.
    """
    dm = _validated(data, alpha, seed)
    return report_from_xi(xi_matrix(dm), kind, alpha, seed)


def run_all_tests(data, kinds=KINDS, alpha: float = 0.05,
                  seed: int | None = None) -> list[TestReport]:
    """Run several test kinds on one sample, computing the coefficient matrix once."""
    dm = _validated(data, alpha, seed)
    xi = xi_matrix(dm)
    return [report_from_xi(xi, kind, alpha, seed) for kind in kinds]
