"""Data ingestion: validated sample matrices, CSV parsing, tie handling.

The statistics in this package are rank-based and therefore only defined for
columns without tied values.  By default a tied column is a hard error
(:class:`~xihd.errors.TiesPresent`).  Callers who know their data are
discretized or rounded can opt in to random tie-breaking via
:func:`break_ties`, which resolves each group of equal values in a uniformly
random order drawn from a caller-supplied seeded generator.  Because every
downstream quantity depends on the data only through within-column ranks,
tie-breaking replaces each column by its (tie-broken) rank vector outright.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BadShape, CsvFormatError, DomainError, NonFiniteValue


@dataclass
class DataMatrix:
    """An n x p sample matrix with one row per observation, one column per variable."""

    values: np.ndarray
    column_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise BadShape(f"expected a 2-dimensional sample matrix, got ndim={self.values.ndim}")
        n, p = self.values.shape
        if not self.column_labels:
            self.column_labels = [f"x{j + 1}" for j in range(p)]
        if len(self.column_labels) != p:
            raise BadShape(f"{len(self.column_labels)} column labels for {p} columns")
        bad = np.argwhere(~np.isfinite(self.values))
        if bad.size:
            i, j = bad[0]
            raise NonFiniteValue(
                f"non-finite value {self.values[i, j]!r} at row {i + 1}, "
                f"column {self.column_labels[j]!r}"
            )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def as_data_matrix(data) -> DataMatrix:
    """Coerce an array-like or DataMatrix into a validated DataMatrix."""
    if isinstance(data, DataMatrix):
        return data
    return DataMatrix(np.asarray(data, dtype=np.float64))


def read_csv(path) -> DataMatrix:
    """Read a numeric CSV file (RFC 4180, UTF-8, one header row) into a DataMatrix.

    Structural problems -- ragged rows, non-numeric cells, an empty file --
    raise :class:`CsvFormatError` with the offending file line and column
    named.  Values that parse but are not finite raise
    :class:`~xihd.errors.NonFiniteValue`.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        labels = [h.strip() for h in header]
        if not labels or all(not h for h in labels):
            raise CsvFormatError(f"{path}: header row is empty")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue  # tolerate a trailing blank line
            if len(row) != len(labels):
                raise CsvFormatError(
                    f"{path}: line {lineno} has {len(row)} fields, expected {len(labels)}"
                )
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: line {lineno}, column {labels[j]!r}: "
                        f"could not parse {cell!r} as a number"
                    ) from None
            rows.append(parsed)
        if not rows:
            raise CsvFormatError(f"{path}: no data rows after the header")
    return DataMatrix(np.array(rows, dtype=np.float64), labels)


def _tiebroken_ranks(column: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # Rank with ties resolved uniformly at random: pre-shuffle, then a stable
    # sort makes equal values fall in shuffle order.
    n = column.shape[0]
    perm = rng.permutation(n)
    order = perm[np.argsort(column[perm], kind="stable")]
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1, dtype=np.int64)
    return ranks


def break_ties(data: DataMatrix, seed: int) -> DataMatrix:
    """Return a tie-free copy of ``data`` with each column rank-transformed.

    Equal values within a column are put in a uniformly random relative order
    driven by ``seed``.  Columns that were already tie-free keep exactly the
    ranks they had, so on tie-free data this transform changes no downstream
    statistic.
    """
    if int(seed) != seed or seed < 0:
        raise DomainError(f"tie-breaking seed must be a nonnegative integer, got {seed!r}")
    rng = np.random.default_rng(int(seed))
    out = np.empty_like(data.values)
    for j in range(data.p):
        out[:, j] = _tiebroken_ranks(data.values[:, j], rng)
    return DataMatrix(out, list(data.column_labels))
