"""Seeded Monte-Carlo engine for size and power studies.

A catalog of twelve data-generating models (ids ``E1a`` .. ``E3d``) covers
three regimes: complete independence with assorted marginals (E1*), dense
dependence spread over many pairs (E2*), and sparse dependence concentrated
in one or two pairs (E3*).  :func:`run_simulation` draws ``reps`` independent
samples from one model, runs the requested tests on each, and tallies
rejection frequencies plus how often the screening set is nonempty.

Reproducibility contract: replicate r of a run seeded with s draws from a
counter-based Philox stream keyed by the pair (s, r).  Substreams therefore
never depend on execution order, results are identical no matter how many
worker threads run (``XIHD_THREADS``), and tallies are order-independent
integer counts.  Per-replicate draw order within a model is fixed by its
sampler's code path.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coeff import xi_matrix
from .errors import BadShape, DomainError, DomainTooSmall, NotPositiveDefinite
from .inference import (
    KINDS,
    MIN_N,
    MIN_P,
    extreme_stat,
    gumbel_quantile,
    j0,
    normal_quantile,
    quadratic_stat,
    screening_threshold,
)

MODEL_IDS = (
    "E1a", "E1b", "E1c", "E1d",
    "E2a", "E2b", "E2c", "E2d",
    "E3a", "E3b", "E3c", "E3d",
)

_DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    "E1a": {},
    "E1b": {},
    "E1c": {},
    "E1d": {},
    "E2a": {"rho": 0.1},
    "E2b": {"rho": 0.3},
    "E2c": {"noise": 0.4},
    "E2d": {"scale": 3.0},
    "E3a": {"signal": 2.7},
    "E3b": {},
    "E3c": {},
    "E3d": {"lam": 0.05},
}


@dataclass(frozen=True)
class ModelSpec:
    """A model id plus its resolved parameter set."""

    model: str
    params: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, model) -> "ModelSpec":
        if isinstance(model, ModelSpec):
            spec = model
        else:
            spec = cls(model=str(model))
        if spec.model not in MODEL_IDS:
            raise DomainError(f"unknown model {spec.model!r}; expected one of {MODEL_IDS}")
        defaults = _DEFAULT_PARAMS[spec.model]
        unknown = set(spec.params) - set(defaults)
        if unknown:
            raise DomainError(
                f"model {spec.model!r} does not take parameter(s) {sorted(unknown)}"
            )
        return cls(spec.model, {**defaults, **spec.params})


def cholesky(sigma) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T reconstructing ``sigma``.

    Accepts a symmetric positive-definite matrix; reconstruction error stays
    below 1e-10 for the well-conditioned covariances used here.
    """
    a = np.asarray(sigma, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadShape(f"covariance must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
        raise BadShape("covariance must be symmetric")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("covariance matrix is not positive definite") from None


def _make_sampler(spec: ModelSpec, n: int, p: int):
    """Build a ``rng -> (n, p) float64`` sampler, hoisting per-run setup out of the loop."""
    model, prm = spec.model, spec.params

    if model == "E1a":
        return lambda rng: rng.standard_normal((n, p))

    if model == "E1b":
        return lambda rng: rng.standard_normal((n, p)) ** 3

    if model == "E1c":
        # Cauchy via the inverse CDF: tan(pi (U - 1/2)) with U uniform on [0, 1).
        return lambda rng: np.tan(np.pi * (rng.random((n, p)) - 0.5))

    if model == "E1d":
        def sample(rng):
            z = rng.standard_normal((n, p))
            return z / np.sqrt(rng.chisquare(3, (n, p)) / 3.0)
        return sample

    if model == "E2a":
        # Equicorrelated Gaussian: every off-diagonal correlation equals rho.
        # One shared factor per row gives the exact covariance in O(np).
        rho = float(prm["rho"])
        if not 0.0 <= rho < 1.0:
            raise DomainError(f"E2a requires 0 <= rho < 1, got {rho}")
        a, b = math.sqrt(rho), math.sqrt(1.0 - rho)

        def sample(rng):
            shared = rng.standard_normal((n, 1))
            return a * shared + b * rng.standard_normal((n, p))
        return sample

    if model == "E2b":
        # AR(1) Gaussian, correlation rho^|i-j|, via the O(p) recursion
        # X_1 = Z_1, X_j = rho X_{j-1} + sqrt(1 - rho^2) Z_j.
        rho = float(prm["rho"])
        if not -1.0 < rho < 1.0:
            raise DomainError(f"E2b requires |rho| < 1, got {rho}")
        c = math.sqrt(1.0 - rho * rho)

        def sample(rng):
            z = rng.standard_normal((n, p))
            x = np.empty((n, p))
            x[:, 0] = z[:, 0]
            for jcol in range(1, p):
                x[:, jcol] = rho * x[:, jcol - 1] + c * z[:, jcol]
            return x
        return sample

    if model == "E2c":
        # Five blocks driven by one latent Gaussian block W: the columns are
        # (W, sin 2piW, cos 2piW, sin 4piW, cos 4piW) plus independent noise.
        if p % 5 != 0:
            raise BadShape(f"model E2c needs p divisible by 5, got p={p}")
        noise = float(prm["noise"])

        def sample(rng):
            w = rng.standard_normal((n, p // 5))
            eps = rng.standard_normal((n, p))
            blocks = np.hstack([
                w,
                np.sin(2.0 * np.pi * w), np.cos(2.0 * np.pi * w),
                np.sin(4.0 * np.pi * w), np.cos(4.0 * np.pi * w),
            ])
            return blocks + noise * eps
        return sample

    if model == "E2d":
        # First half latent normals W, second half log(W^2) + scale * V.
        if p % 2 != 0:
            raise BadShape(f"model E2d needs even p, got p={p}")
        scale = float(prm["scale"])

        def sample(rng):
            w = rng.standard_normal((n, p // 2))
            v = rng.standard_normal((n, p // 2))
            return np.hstack([w, np.log(w * w) + scale * v])
        return sample

    if model == "E3a":
        # Identity covariance except one correlated pair at
        # r = signal * sqrt(log p / n); sampled through a generic Cholesky
        # factor computed once per run.
        r = float(prm["signal"]) * math.sqrt(math.log(p) / n)
        sigma = np.eye(p)
        sigma[0, 1] = sigma[1, 0] = r
        lower = cholesky(sigma)

        def sample(rng):
            return rng.standard_normal((n, p)) @ lower.T
        return sample

    if model == "E3b":
        # Quadratic link with noise: X_1 = X_2^2 + Z/3.
        def sample(rng):
            vw = rng.standard_normal((n, p - 1))
            z = rng.standard_normal(n)
            u = vw[:, 0] ** 2 + z / 3.0
            return np.column_stack([u, vw])
        return sample

    if model == "E3c":
        # Noiseless W-shaped fold of X_2: |V + 1/2| on V < 0, |V - 1/2| on V >= 0.
        def sample(rng):
            vw = rng.standard_normal((n, p - 1))
            v = vw[:, 0]
            u = np.where(v < 0.0, np.abs(v + 0.5), np.abs(v - 0.5))
            return np.column_stack([u, vw])
        return sample

    if model == "E3d":
        # Oscillation with faint noise: X_1 = cos(2 pi X_2) + lam * eps.
        lam = float(prm["lam"])

        def sample(rng):
            vw = rng.standard_normal((n, p - 1))
            eps = rng.standard_normal(n)
            u = np.cos(2.0 * np.pi * vw[:, 0]) + lam * eps
            return np.column_stack([u, vw])
        return sample

    raise DomainError(f"unknown model {model!r}")  # unreachable after resolve()


def replicate_stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based substream for one replicate, keyed by (seed, index)."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def generate(model, n: int, p: int, stream: np.random.Generator) -> np.ndarray:
    """Draw one n x p sample from a catalog model using the supplied stream."""
    spec = ModelSpec.resolve(model)
    if n < 1 or p < 1:
        raise DomainTooSmall(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    if spec.model.startswith("E3") and p < 2:
        raise DomainTooSmall(f"model {spec.model} needs p >= 2, got p={p}")
    return _make_sampler(spec, n, p)(stream)


@dataclass(frozen=True)
class SimSpec:
    """One simulation request: model, dimensions, replicate count, level, seed."""

    model: str | ModelSpec
    n: int
    p: int
    reps: int = 1000
    alpha: float = 0.05
    seed: int = 0
    tests: tuple = KINDS


@dataclass
class SimResult:
    """Rejection frequencies for one (model, n, p) cell.

    ``wall_time`` is informational only and is deliberately excluded from
    :meth:`to_dict`, so serialized results from identical seeds are identical
    regardless of worker count or machine load.
    """

    model: str
    params: dict
    n: int
    p: int
    reps: int
    alpha: float
    seed: int
    tests: tuple
    rejection_rate: dict
    screen_rate: float
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "n": self.n,
            "p": self.p,
            "reps": self.reps,
            "alpha": self.alpha,
            "seed": self.seed,
            "tests": list(self.tests),
            "rejection_rate": dict(self.rejection_rate),
            "screen_rate": self.screen_rate,
        }


def worker_count(threads: int | None = None) -> int:
    """Resolve the worker cap: explicit argument, else XIHD_THREADS, else CPU count."""
    if threads is None:
        env = os.environ.get("XIHD_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise DomainError(f"XIHD_THREADS must be an integer >= 1, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise DomainError(f"worker count must be >= 1, got {threads}")
    return threads


def run_simulation(spec: SimSpec, threads: int | None = None) -> SimResult:
    """Run one simulation cell and tally how often each test rejects.

    The result is a pure function of ``spec``: replicate substreams come from
    (seed, replicate index) alone, and per-replicate outcomes are collected
    positionally, so any ``threads`` value yields the identical SimResult
    (apart from ``wall_time``).
    """
    model = ModelSpec.resolve(spec.model)
    if spec.n < MIN_N:
        raise DomainTooSmall(f"simulations require n >= {MIN_N}, got n={spec.n}")
    if spec.p < MIN_P:
        raise DomainTooSmall(f"simulations require p >= {MIN_P}, got p={spec.p}")
    if spec.reps < 1:
        raise DomainError(f"reps must be >= 1, got {spec.reps}")
    if not 0.0 < spec.alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {spec.alpha!r}")
    if not 0 <= int(spec.seed) < 2**64:
        raise DomainError(f"seed must fit in an unsigned 64-bit integer, got {spec.seed!r}")
    kinds = tuple(spec.tests)
    for kind in kinds:
        if kind not in KINDS:
            raise DomainError(f"unknown test kind {kind!r}; expected one of {KINDS}")

    sampler = _make_sampler(model, spec.n, spec.p)
    z_normal = normal_quantile(spec.alpha)
    z_gumbel = gumbel_quantile(spec.alpha)
    need_quad = "quadratic" in kinds or "enhanced" in kinds

    def one(rep: int) -> tuple:
        rng = replicate_stream(spec.seed, rep)
        xi = xi_matrix(sampler(rng))
        quad = quadratic_stat(xi) if need_quad else math.nan
        screen_term = j0(xi)
        rejected = []
        for kind in kinds:
            if kind == "quadratic":
                rejected.append(quad > z_normal)
            elif kind == "extreme":
                rejected.append(extreme_stat(xi) > z_gumbel)
            else:
                rejected.append(screen_term + quad > z_normal)
        return (*rejected, screen_term > 0.0)

    start = time.perf_counter()
    workers = min(worker_count(threads), spec.reps)
    if workers == 1:
        outcomes = [one(rep) for rep in range(spec.reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(spec.reps)))
    elapsed = time.perf_counter() - start

    counts = [int(c) for c in np.asarray(outcomes, dtype=np.int64).sum(axis=0)]
    rates = {kind: counts[i] / spec.reps for i, kind in enumerate(kinds)}
    return SimResult(
        model=model.model,
        params=dict(model.params),
        n=spec.n,
        p=spec.p,
        reps=spec.reps,
        alpha=spec.alpha,
        seed=int(spec.seed),
        tests=kinds,
        rejection_rate=rates,
        screen_rate=counts[-1] / spec.reps,
        wall_time=elapsed,
    )
