"""Tests for the Monte-Carlo limit laws, quantiles, and tables."""

import numpy as np
import pytest

from hdchange import limits
from tests.conftest import (
    CRIT_GRID,
    CRIT_REPS,
    CRIT_SEED,
    cvm_integral_draws,
    kolmogorov_sup_quantile,
    kuiper_range_quantile,
)


def test_bridge_sup_draws_nonnegative_and_kolmogorov_quantile(bridge_crit_95):
    vals = limits.draws(limits.bridge_sup(), reps=20_000, grid=CRIT_GRID, seed=5)
    assert np.all(vals >= 0.0)
    oracle = kolmogorov_sup_quantile(0.95)
    assert oracle == pytest.approx(1.3581, abs=5e-4)  # frozen series value
    assert bridge_crit_95 == pytest.approx(oracle, abs=0.01)


def test_bridge_int_cvm_quantile():
    got = limits.quantile(limits.bridge_int(), 0.05, reps=CRIT_REPS,
                          grid=CRIT_GRID, seed=CRIT_SEED)
    # independent high-resolution oracle: Karhunen-Loeve series draws
    oracle_draws = cvm_integral_draws(np.random.default_rng(9), 400_000)
    oracle = np.quantile(oracle_draws, 0.95)
    assert oracle == pytest.approx(0.46136, abs=0.004)  # frozen CvM value
    assert got == pytest.approx(0.46136, abs=0.01)


def test_epidemic_sup_matches_kuiper_law():
    got = limits.quantile(limits.epidemic_sup(), 0.05, reps=CRIT_REPS,
                          grid=CRIT_GRID, seed=3)
    oracle = kuiper_range_quantile(0.95)
    assert oracle == pytest.approx(1.7473, abs=5e-4)
    assert got == pytest.approx(oracle, abs=0.015)


def test_epidemic_int_mean_matches_quadrature():
    # E intint |B(x2)-B(x1)| over x1<x2 equals sqrt(2 pi)/16
    vals = limits.draws(limits.epidemic_int(), reps=20_000, grid=500, seed=1)
    expect = np.sqrt(2.0 * np.pi) / 16.0
    assert vals.mean() == pytest.approx(expect, abs=0.005)


def test_bridge_abs_int_mean_matches_quadrature():
    # E int |B| = sqrt(2/pi) int sqrt(t(1-t)) dt = sqrt(2/pi) pi/8
    vals = limits.draws(limits.bridge_abs_int(), reps=20_000, grid=500, seed=2)
    expect = np.sqrt(2.0 / np.pi) * np.pi / 8.0
    assert vals.mean() == pytest.approx(expect, abs=0.005)


def test_weighted_bridge_sup_exceeds_unweighted():
    flat = limits.quantile(limits.bridge_sup(0.0), 0.05, reps=20_000,
                           grid=500, seed=4)
    weighted = limits.quantile(limits.bridge_sup(0.25), 0.05, reps=20_000,
                               grid=500, seed=4)
    assert weighted > flat  # w >= 1 everywhere for beta > 0


def test_panel_process_pointwise_variance():
    # Var at x is 2 x^2 (1-x)^2 (0.125 at x = 1/2); 3e4 paths, 5% tolerance
    # (the acceptance suite repeats this at 1e5 paths)
    N = 1000
    rng = np.random.default_rng(17)
    cols = {x: [] for x in (0.25, 0.5, 0.75)}
    for _ in range(6):
        g = limits._panel_paths(rng, 5000, N)
        for xq in cols:
            cols[xq].append(g[:, int(xq * N) - 1])
    for xq, parts in cols.items():
        theory = 2.0 * xq**2 * (1.0 - xq) ** 2
        assert np.concatenate(parts).var() == pytest.approx(theory, rel=0.05)


def test_panel_quantile_stable_across_seeds():
    a = limits.quantile(limits.panel_sup(), 0.05, reps=100_000, grid=500, seed=1)
    b = limits.quantile(limits.panel_sup(), 0.05, reps=100_000, grid=500, seed=2)
    assert abs(a - b) / a < 0.02


def test_mixture_panel_xi_zero_equals_panel_sup():
    pan = limits.draws(limits.panel_sup(), reps=2000, grid=200, seed=11)
    mix = limits.draws(limits.mixture_panel(0.0), reps=2000, grid=200, seed=11)
    np.testing.assert_array_equal(pan, mix)


def test_bridge_squared_sup_bounds():
    vals = limits.draws(limits.bridge_squared_sup(), reps=2000, grid=200, seed=6)
    assert np.all(vals >= -0.25)  # B^2 >= 0 and x(1-x) <= 1/4
    assert vals.max() > 0.5


def test_grid_refinement_stability(bridge_crit_95):
    q2 = limits.quantile(limits.bridge_sup(), 0.05, reps=100_000, grid=4000,
                         seed=9)
    assert abs(bridge_crit_95 - q2) / bridge_crit_95 < 0.01


def test_draws_deterministic_and_prefix_stable():
    law = limits.bridge_int()
    a = limits.draws(law, reps=10_000, grid=200, seed=3)
    b = limits.draws(law, reps=10_000, grid=200, seed=3)
    np.testing.assert_array_equal(a, b)
    # block-indexed streams: a longer run reproduces earlier full blocks
    bs = limits.block_size(200)
    c = limits.draws(law, reps=2 * bs, grid=200, seed=3)
    np.testing.assert_array_equal(c[: min(bs, 10_000)], a[: min(bs, 10_000)])


def test_simulate_path_uses_callers_rng():
    law = limits.bridge_sup(grid=200)
    a = limits.simulate_path(law, np.random.default_rng(5))
    b = limits.simulate_path(law, np.random.default_rng(5))
    assert a == b
    assert a > 0.0


def test_quantiles_monotone_in_alpha():
    table = limits.build_table(limits.bridge_sup(), reps=20_000, grid=300, seed=1)
    alphas = [a for a, _ in table.levels]
    quants = [q for _, q in table.levels]
    assert alphas == sorted(alphas)
    assert all(q1 >= q2 for q1, q2 in zip(quants, quants[1:]))


def test_mc_pvalue_extremes_and_quantile_consistency():
    law = limits.bridge_sup()
    reps, grid, seed = 20_000, 300, 12
    assert limits.mc_pvalue(-np.inf, law, reps, grid, seed) == 1.0
    assert limits.mc_pvalue(np.inf, law, reps, grid, seed) == 1.0 / (reps + 1)
    q = limits.quantile(law, 0.05, reps, grid, seed)
    p_at_q = limits.mc_pvalue(q, law, reps, grid, seed)
    assert p_at_q == pytest.approx(0.05, abs=0.005)
    eps = 1e-9
    assert limits.mc_pvalue(q + eps, law, reps, grid, seed) <= 0.05
    assert limits.mc_pvalue(q - eps, law, reps, grid, seed) > 0.05


def test_quantile_table_roundtrip_and_rerun_identical(tmp_path):
    law = limits.panel_sup()
    t1 = limits.build_table(law, reps=5000, grid=200, seed=7,
                            extra_levels=(0.033,))
    path = tmp_path / "table.txt"
    t1.save(path)
    t2 = limits.QuantileTable.load(path)
    assert t2 == t1
    assert t1.lookup(0.033) is not None
    # byte-identical rerun
    t3 = limits.build_table(law, reps=5000, grid=200, seed=7,
                            extra_levels=(0.033,))
    assert t3.dumps() == t1.dumps()


def test_table_cache_merges_levels(tmp_path):
    law = limits.bridge_int()
    q1 = limits.quantile(law, 0.05, reps=5000, grid=200, seed=1,
                         cache_dir=tmp_path)
    q2 = limits.quantile(law, 0.033, reps=5000, grid=200, seed=1,
                         cache_dir=tmp_path)
    table = limits.QuantileTable.load(
        limits.table_path(tmp_path, law, 5000, 200, 1))
    assert table.lookup(0.05) == q1
    assert table.lookup(0.033) == q2


def test_law_validation():
    with pytest.raises(ValueError):
        limits.LimitLaw(limits.LimitLawKind.BRIDGE_SUP, grid=50)
    with pytest.raises(ValueError):
        limits.LimitLaw(limits.LimitLawKind.BRIDGE_SUP, reps=10)
    with pytest.raises(ValueError):
        limits.bridge_sup(0.6)
    with pytest.raises(ValueError):
        limits.LimitLaw(limits.LimitLawKind.PANEL_SUP, beta=0.2)
    with pytest.raises(ValueError):
        limits.quantile(limits.panel_sup(), 1.5)
