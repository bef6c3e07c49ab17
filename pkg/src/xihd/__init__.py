"""Complete-independence tests for high-dimensional data.

The package tests whether the p coordinates of an i.i.d. sample are mutually
independent, using the pairwise rank correlation coefficient xi as the
building block.  Three test statistics are provided: a studentized sum of
squared coefficients (``quadratic``), a calibrated maximum (``extreme``) and
a screening-enhanced combination of the two (``enhanced``).  All calibration
constants come from exact finite-sample null moments, not from resampling.

Entry points
------------
``xi_pair`` / ``xi_matrix``
    The coefficient for one ordered pair, or all p*(p-1) ordered pairs.
``run_test`` / ``run_all_tests``
    Test a data matrix and get a serializable :class:`TestReport`.
``run_simulation``
    Seeded Monte-Carlo size/power studies over the built-in model catalog.
``exact_moments_by_enumeration``
    Brute-force null moments for small n, for validating the closed forms.
"""

from .coeff import XiMatrix, concomitant_ranks, rank_vector, xi_matrix, xi_pair, xi_pair_neighbor
from .data import DataMatrix, as_data_matrix, break_ties, read_csv
from .errors import (
    BadShape,
    CsvFormatError,
    DomainError,
    DomainTooSmall,
    LengthMismatch,
    NonFiniteValue,
    NotPositiveDefinite,
    TiesPresent,
    TooLarge,
    XihdError,
)
from .inference import (
    KINDS,
    TestReport,
    cp,
    delta_np,
    extreme_stat,
    gumbel_quantile,
    gumbel_sf,
    j0,
    normal_quantile,
    normal_sf,
    quadratic_stat,
    report_from_xi,
    run_all_tests,
    run_test,
    screening_set,
    screening_threshold,
)
from .moments import (
    EnumeratedMoments,
    StatMoments,
    cov_xi2,
    exact_moments_by_enumeration,
    stat_moments,
    u_n,
    v_n2,
)
from .simulate import (
    MODEL_IDS,
    ModelSpec,
    SimResult,
    SimSpec,
    cholesky,
    generate,
    replicate_stream,
    run_simulation,
    worker_count,
)

__version__ = "0.1.0"

__all__ = [
    "BadShape",
    "CsvFormatError",
    "DataMatrix",
    "DomainError",
    "DomainTooSmall",
    "EnumeratedMoments",
    "KINDS",
    "LengthMismatch",
    "MODEL_IDS",
    "ModelSpec",
    "NonFiniteValue",
    "NotPositiveDefinite",
    "SimResult",
    "SimSpec",
    "StatMoments",
    "TestReport",
    "TiesPresent",
    "TooLarge",
    "XiMatrix",
    "XihdError",
    "as_data_matrix",
    "break_ties",
    "cholesky",
    "concomitant_ranks",
    "cov_xi2",
    "cp",
    "delta_np",
    "exact_moments_by_enumeration",
    "extreme_stat",
    "generate",
    "gumbel_quantile",
    "gumbel_sf",
    "j0",
    "normal_quantile",
    "normal_sf",
    "quadratic_stat",
    "rank_vector",
    "read_csv",
    "replicate_stream",
    "report_from_xi",
    "run_all_tests",
    "run_simulation",
    "run_test",
    "screening_set",
    "screening_threshold",
    "stat_moments",
    "u_n",
    "v_n2",
    "worker_count",
    "xi_matrix",
    "xi_pair",
    "xi_pair_neighbor",
    "__version__",
]
