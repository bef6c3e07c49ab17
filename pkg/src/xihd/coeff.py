"""The rank correlation coefficient and its all-pairs matrix form.

For paired samples (x_i, y_i), i = 1..n, with no ties in either coordinate,
sort the pairs by x and let r_1, ..., r_n be the ranks of the y values read
off in that order (the concomitant ranks).  The coefficient is

    xi = 1 - 3 * sum_{i<n} |r_{i+1} - r_i| / (n^2 - 1).

It is asymmetric by design: xi(x, y) is large when y is close to a (noisy)
function of x, monotone or not, and it is invariant under strictly increasing
transformations of either coordinate because only ranks enter.  Under
independence it concentrates around 0; its exact maximum at sample size n is
(n - 2) / (n + 1), attained precisely when y is a monotone rearrangement of x.

Two independent computation routes are provided on purpose.  :func:`xi_pair`
is the production O(n log n) path.  :func:`xi_pair_neighbor` evaluates the
same quantity through the right-neighbor identity

    xi = 1 - 3 * sum_i |R_i - R_{N(i)}| / (n^2 - 1),

where R_i is the rank of y_i and N(i) indexes the observation whose x value
is the immediate successor of x_i (N(i) = i when x_i is the maximum).  The
neighbor route never orders the pairs and is quadratic; it exists as a
cross-check oracle and the two routes must agree bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, as_data_matrix
from .errors import BadShape, DomainTooSmall, LengthMismatch, NonFiniteValue, TiesPresent


def _as_clean_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise BadShape(f"{name} must be 1-dimensional, got ndim={v.ndim}")
    if not np.isfinite(v).all():
        raise NonFiniteValue(f"{name} contains NaN or infinite values")
    return v


def rank_vector(x) -> np.ndarray:
    """Ranks of a tie-free vector: rank[i] = #{j: x[j] <= x[i]}, values 1..n."""
    v = _as_clean_vector(x, "x")
    order = np.argsort(v, kind="stable")
    if v.shape[0] > 1 and (v[order[1:]] == v[order[:-1]]).any():
        raise TiesPresent("tied values present; enable tie-breaking to proceed")
    ranks = np.empty(v.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, v.shape[0] + 1, dtype=np.int64)
    return ranks


def concomitant_ranks(x, y) -> np.ndarray:
    """Ranks of y listed in the order that sorts x ascending."""
    xv = _as_clean_vector(x, "x")
    yv = _as_clean_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise LengthMismatch(f"x has length {xv.shape[0]}, y has length {yv.shape[0]}")
    order = np.argsort(xv, kind="stable")
    if xv.shape[0] > 1 and (xv[order[1:]] == xv[order[:-1]]).any():
        raise TiesPresent("tied values in x; enable tie-breaking to proceed")
    return rank_vector(yv)[order]


def xi_pair(x, y) -> float:
    """The coefficient of ``y`` against ``x`` (order-of-arguments matters).

    Requires n >= 2 tie-free observations.  Runs in O(n log n).
    """
    r = concomitant_ranks(x, y)
    n = r.shape[0]
    if n < 2:
        raise DomainTooSmall(f"need at least 2 observations, got {n}")
    s = int(np.abs(r[1:] - r[:-1]).sum())
    return 1.0 - 3.0 * s / (n * n - 1.0)


def xi_pair_neighbor(x, y) -> float:
    """Same value as :func:`xi_pair`, computed via the right-neighbor identity.

    Never sorts the (x, y) pairs: neighbors and ranks are found by pairwise
    comparison, so this is an O(n^2) time and memory reference implementation.
    Intended for cross-checking; results are bit-identical to :func:`xi_pair`.
    """
    xv = _as_clean_vector(x, "x")
    yv = _as_clean_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise LengthMismatch(f"x has length {xv.shape[0]}, y has length {yv.shape[0]}")
    n = xv.shape[0]
    if n < 2:
        raise DomainTooSmall(f"need at least 2 observations, got {n}")
    # Tie detection by pairwise comparison (the diagonal accounts for n hits).
    if (xv[None, :] == xv[:, None]).sum() > n or (yv[None, :] == yv[:, None]).sum() > n:
        raise TiesPresent("tied values present; enable tie-breaking to proceed")
    # Right neighbor: the index holding the smallest x strictly above x[i].
    bigger = np.where(xv[None, :] > xv[:, None], xv[None, :], np.inf)
    nbr = np.argmin(bigger, axis=1)
    no_successor = np.isinf(bigger[np.arange(n), nbr])
    nbr[no_successor] = np.flatnonzero(no_successor)
    # Counting definition of ranks, no sort involved.
    ry = (yv[None, :] <= yv[:, None]).sum(axis=1).astype(np.int64)
    s = int(np.abs(ry - ry[nbr]).sum())
    return 1.0 - 3.0 * s / (n * n - 1.0)


@dataclass
class XiMatrix:
    """All ordered-pair coefficients of a sample matrix.

    ``values[k, l]`` holds xi(column k, column l) for k != l; the diagonal is
    NaN as a quiet "not a pair" sentinel and is excluded from every aggregate
    computed downstream (serializers emit it as null/blank).
    """

    values: np.ndarray
    n: int

    @property
    def p(self) -> int:
        return self.values.shape[0]


def xi_matrix(data) -> XiMatrix:
    """Compute the full p x p coefficient matrix of an n x p sample.

    The sorting permutation of each conditioning column k is computed once and
    reused against all p target columns, giving O(p^2 n + p n log n) total
    work with exact integer accumulation of the rank differences (the per-pair
    sum is < n^2, so it cannot overflow).  The function is pure and
    deterministic: no random state, no dependence on execution schedule.
    """
    dm = as_data_matrix(data)
    n, p = dm.n, dm.p
    if n < 2:
        raise DomainTooSmall(f"need at least 2 observations, got n={n}")
    if p < 2:
        raise DomainTooSmall(f"need at least 2 columns, got p={p}")

    order = np.argsort(dm.values, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(dm.values, order, axis=0)
    tied = (sorted_vals[1:] == sorted_vals[:-1]).any(axis=0)
    if tied.any():
        j = int(np.flatnonzero(tied)[0])
        label = dm.column_labels[j]
        raise TiesPresent(
            f"tied values in column {label!r}; enable tie-breaking to proceed", column=label
        )

    ranks = np.empty((n, p), dtype=np.int64)
    np.put_along_axis(ranks, order, np.arange(1, n + 1, dtype=np.int64)[:, None], axis=0)

    denom = n * n - 1.0
    xi = np.empty((p, p), dtype=np.float64)
    for k in range(p):
        concomitant = ranks[order[:, k], :]          # ranks of every column, sorted by column k
        s = np.abs(concomitant[1:] - concomitant[:-1]).sum(axis=0)
        xi[k, :] = 1.0 - 3.0 * s / denom
    np.fill_diagonal(xi, np.nan)
    return XiMatrix(xi, n)
