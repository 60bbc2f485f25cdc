"""Shared fixtures: expensive Monte-Carlo critical values, computed once."""

import numpy as np
import pytest

from hdchange import limits

# matches the harness defaults so the in-memory draw cache is shared
CRIT_REPS = 100_000
CRIT_GRID = 1000
CRIT_SEED = 2024


@pytest.fixture(scope="session")
def bridge_crit_95():
    return limits.quantile(limits.bridge_sup(), 0.05, reps=CRIT_REPS,
                           grid=CRIT_GRID, seed=CRIT_SEED)


@pytest.fixture(scope="session")
def panel_crit_95():
    return limits.quantile(limits.panel_sup(), 0.05, reps=CRIT_REPS,
                           grid=CRIT_GRID, seed=CRIT_SEED)


def kolmogorov_sup_quantile(prob: float) -> float:
    """Invert K(x) = 1 - 2 sum (-1)^{k-1} exp(-2 k^2 x^2) for sup|B|."""
    from scipy.optimize import brentq

    k = np.arange(1, 101)

    def cdf(x):
        return 1.0 - 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k**2 * x**2))

    return brentq(lambda x: cdf(x) - prob, 0.3, 3.0)


def kuiper_range_quantile(prob: float) -> float:
    """Invert P(range > v) = sum 2(4k^2v^2 - 1)exp(-2k^2v^2) for sup B - inf B."""
    from scipy.optimize import brentq

    k = np.arange(1, 101)

    def sf(v):
        return np.sum(2.0 * (4.0 * k**2 * v**2 - 1.0) * np.exp(-2.0 * k**2 * v**2))

    return brentq(lambda v: sf(v) - (1.0 - prob), 0.5, 4.0)


def cvm_integral_draws(rng: np.random.Generator, n: int, terms: int = 200):
    """Karhunen-Loeve oracle for int B^2: sum_k Z_k^2/(k pi)^2, tail-corrected."""
    k2 = (np.arange(1, terms + 1) * np.pi) ** 2
    tail = float(np.sum(1.0 / ((np.arange(terms + 1, 200_000) * np.pi) ** 2)))
    out = np.empty(n)
    block = 20_000
    for lo in range(0, n, block):
        m = min(block, n - lo)
        z = rng.standard_normal((m, terms))
        out[lo:lo + m] = (z**2 / k2).sum(axis=1) + tail
    return out
