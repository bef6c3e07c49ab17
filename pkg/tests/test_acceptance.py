"""Acceptance gate: every shipped guarantee, one test per guarantee.

Each test here pins one user-facing promise at its stated tolerance:

1. exact-moment oracle      -- enumeration over n! permutations reproduces the
                               closed-form null moments for n in {4, 5, 6}
2. variance identity        -- the three big moment polynomials agree with each
                               other across n from 5 to 1e6
3. dual representation      -- sorting route == neighbor route, bit for bit,
                               on 10^4 random inputs
4. null size                -- empirical size at the 5% level for Gaussian and
                               Cauchy nulls (distribution-free, same bands)
5. sparse-alternative power -- fold and cosine signals: screening and the
                               extreme statistic essentially always fire
6. dense-alternative power  -- log-square pairs and equicorrelation: the
                               quadratic statistic carries the power
7. enhancement properties   -- the screening add-on is nonnegative, exactly
                               zero-cost when nothing is screened, and never
                               loses power on sparse signals
8. calibration constants    -- quantile functions invert the limit survival
                               functions, pinned to closed-form values
9. reproducibility          -- a seeded simulation report is byte-identical
                               for every worker count

The Monte-Carlo runs use one frozen master seed, so every frequency below is
a deterministic regression value; the bands additionally contain the long-run
frequencies with room for 1000-replicate noise, so the tests are not
seed-hacked.
"""

import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from xihd import (
    SimSpec,
    cov_xi2,
    exact_moments_by_enumeration,
    gumbel_quantile,
    gumbel_sf,
    j0,
    normal_quantile,
    normal_sf,
    run_simulation,
    run_test,
    stat_moments,
    u_n,
    v_n2,
    xi_matrix,
    xi_pair,
    xi_pair_neighbor,
)

MASTER_SEED = 99
REPS = 1000
ALPHA = 0.05


def _cell(model, n, p):
    return run_simulation(SimSpec(model=model, n=n, p=p, reps=REPS,
                                  alpha=ALPHA, seed=MASTER_SEED))


@pytest.fixture(scope="module")
def null_runs():
    return {"E1a": _cell("E1a", 50, 100), "E1c": _cell("E1c", 50, 100)}


@pytest.fixture(scope="module")
def sparse_runs():
    return {"E3c": _cell("E3c", 50, 100), "E3d": _cell("E3d", 50, 200)}


@pytest.fixture(scope="module")
def dense_runs():
    return {"E2d": _cell("E2d", 100, 200), "E2a": _cell("E2a", 50, 400)}


def test_exact_moment_oracle():
    """Enumeration over all n! permutations reproduces every closed form."""
    start = time.perf_counter()
    for n in (4, 5, 6):
        m = exact_moments_by_enumeration(n)
        assert m.mean_xi == Fraction(0)
        assert abs(float(m.mean_xi)) < 1e-12
        assert float(m.mean_xi2) == pytest.approx(u_n(n), rel=1e-10)
        assert float(m.var_xi2) == pytest.approx(v_n2(n), rel=1e-10)
        assert float(m.cov_xi2) == pytest.approx(cov_xi2(n), rel=1e-10)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    print(f"PASS exact-moment oracle: n=4,5,6 enumerated in {elapsed:.2f}s, "
          f"all four moments at 1e-10 relative")


def test_variance_identity_across_n():
    """sigma^2_np / (p(p-1)) == v_n^2 + cov_n for n log-spaced in [5, 1e6]."""
    p = 13
    grid = np.geomspace(5, 10 ** 6, 50).astype(int)
    worst = 0.0
    for n in grid:
        n = int(n)
        lhs = stat_moments(n, p).sigma_np2 / (p * (p - 1.0))
        rhs = v_n2(n) + cov_xi2(n)
        worst = max(worst, abs(lhs - rhs) / rhs)
        assert lhs == pytest.approx(rhs, rel=1e-9)
    print(f"PASS variance identity: 50 values of n in [5, 1e6], "
          f"worst relative gap {worst:.2e}")


def test_dual_routes_bit_identical():
    """Sorting and right-neighbor evaluations agree exactly on 1e4 random inputs."""
    rng = np.random.default_rng(20260814)
    for trial in range(10_000):
        n = int(rng.integers(2, 201))
        x = rng.permutation(n).astype(float)
        y = rng.standard_normal(n)
        assert xi_pair_neighbor(x, y) == xi_pair(x, y)
    print("PASS dual representation: 10000 random inputs with n in [2, 200], "
          "bit-exact agreement")


def test_null_size(null_runs):
    """Size at the nominal 5% level, Gaussian and Cauchy marginals alike."""
    gauss = null_runs["E1a"]
    quad, extreme = gauss.rejection_rate["quadratic"], gauss.rejection_rate["extreme"]
    enhanced = gauss.rejection_rate["enhanced"]
    assert 0.020 <= quad <= 0.060
    assert 0.020 <= enhanced <= 0.060
    assert 0.004 <= extreme <= 0.054
    assert gauss.screen_rate <= 0.005

    cauchy = null_runs["E1c"]
    assert 0.032 <= cauchy.rejection_rate["quadratic"] <= 0.072
    print(f"PASS null size: gaussian quad={quad:.3f} extreme={extreme:.3f} "
          f"enhanced={enhanced:.3f} screen={gauss.screen_rate:.3f}; "
          f"cauchy quad={cauchy.rejection_rate['quadratic']:.3f}")


def test_sparse_alternative_power(sparse_runs):
    """Few strong pairs: screening and the extreme statistic must catch them."""
    fold = sparse_runs["E3c"]
    assert fold.rejection_rate["enhanced"] >= 0.99
    assert fold.screen_rate >= 0.99
    assert 0.109 <= fold.rejection_rate["quadratic"] <= 0.189

    cosine = sparse_runs["E3d"]
    assert cosine.rejection_rate["extreme"] >= 0.99
    assert 0.768 <= cosine.rejection_rate["enhanced"] <= 0.868
    print(f"PASS sparse power: fold enhanced={fold.rejection_rate['enhanced']:.3f} "
          f"screen={fold.screen_rate:.3f} quad={fold.rejection_rate['quadratic']:.3f}; "
          f"cosine extreme={cosine.rejection_rate['extreme']:.3f} "
          f"enhanced={cosine.rejection_rate['enhanced']:.3f}")


def test_dense_alternative_power(dense_runs):
    """Many weak pairs: the quadratic statistic must carry the power."""
    logsq = dense_runs["E2d"]
    assert 0.920 <= logsq.rejection_rate["quadratic"] <= 0.980
    assert 0.971 <= logsq.rejection_rate["extreme"] <= 1.0

    equi = dense_runs["E2a"]
    assert 0.932 <= equi.rejection_rate["quadratic"] <= 0.992
    print(f"PASS dense power: log-square quad={logsq.rejection_rate['quadratic']:.3f} "
          f"extreme={logsq.rejection_rate['extreme']:.3f}; "
          f"equicorrelated quad={equi.rejection_rate['quadratic']:.3f}")


def test_enhancement_properties(sparse_runs):
    """Screening add-on: nonnegative, exact no-op when empty, never hurts."""
    # nonnegative on null and alternative data alike
    rng = np.random.default_rng(MASTER_SEED)
    for trial in range(200):
        n = int(rng.integers(5, 60))
        p = int(rng.integers(2, 12))
        data = rng.standard_normal((n, p))
        if trial % 3 == 0 and p >= 3:
            data[:, 1] = data[:, 0] ** 2 + 0.2 * rng.standard_normal(n)
        assert j0(xi_matrix(data)) >= 0.0

    # nothing screened -> the enhanced statistic IS the quadratic statistic
    null_data = np.random.default_rng(MASTER_SEED + 1).standard_normal((60, 12))
    quad = run_test(null_data, "quadratic")
    enh = run_test(null_data, "enhanced")
    assert enh.j0 == 0.0
    assert enh.statistic == quad.statistic  # exact float equality

    # on sparse signals the enhanced test is at least as powerful at every
    # (n, p) tried: the heavy (50, 100) cell plus an independent smaller one
    big = sparse_runs["E3c"]
    assert big.rejection_rate["enhanced"] >= big.rejection_rate["quadratic"]
    small = run_simulation(SimSpec(model="E3c", n=40, p=60, reps=300,
                                   alpha=ALPHA, seed=MASTER_SEED))
    assert small.rejection_rate["enhanced"] >= small.rejection_rate["quadratic"]
    print(f"PASS enhancement: j0 >= 0 on 200 datasets; exact no-op on empty "
          f"screen; power {big.rejection_rate['enhanced']:.3f} >= "
          f"{big.rejection_rate['quadratic']:.3f} at (50,100) and "
          f"{small.rejection_rate['enhanced']:.3f} >= "
          f"{small.rejection_rate['quadratic']:.3f} at (40,60)")


def test_calibration_constants():
    """Quantiles pinned to closed forms and inverse to the survival functions."""
    # Phi^{-1}(0.95), high-precision reference value
    assert normal_quantile(0.05) == pytest.approx(1.6448536270, abs=1e-8)
    # -2 log(sqrt(8 pi) (-log(1 - q))) at q = 0.05
    reference = -2.0 * math.log(math.sqrt(8.0 * math.pi) * (-math.log(0.95)))
    assert reference == pytest.approx(2.7162190705550917, abs=1e-12)
    assert gumbel_quantile(0.05) == pytest.approx(2.7162190705550917, abs=1e-5)
    for q in (0.2, 0.1, 0.05, 0.01, 0.005):
        assert normal_sf(normal_quantile(q)) == pytest.approx(q, abs=1e-10)
        assert gumbel_sf(gumbel_quantile(q)) == pytest.approx(q, abs=1e-10)
    print(f"PASS calibration: normal quantile {normal_quantile(0.05):.10f}, "
          f"extreme-value quantile {gumbel_quantile(0.05):.10f}, "
          f"round-trips at 1e-10")


def test_reproducibility_across_worker_counts(tmp_path):
    """One seeded CLI simulation, many thread settings, identical bytes."""
    base = [sys.executable, "-m", "xihd.cli", "simulate", "--model", "E3b",
            "--n", "25", "--p", "8", "--reps", "50", "--seed", str(MASTER_SEED),
            "--output"]
    payloads = []
    for threads in ("1", "2", "5"):
        out_path = tmp_path / f"t{threads}.json"
        env = dict(os.environ, XIHD_THREADS=threads)
        proc = subprocess.run(base + [str(out_path)], env=env,
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        payloads.append(out_path.read_bytes())
    assert payloads[0] == payloads[1] == payloads[2]
    print("PASS reproducibility: XIHD_THREADS in {1,2,5} gave byte-identical reports")
