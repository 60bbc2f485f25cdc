"""Tests for projection constructors and the matrix inverse square root."""

import numpy as np
import pytest

from hdchange import projection as proj
from hdchange.efficiency import eff_projection
from hdchange.errors import NotPositiveDefinite, ZeroChange


def random_spd(rng, d, jitter=0.1):
    A = rng.standard_normal((d, d))
    return A @ A.T + jitter * np.eye(d)


def test_inverse_sqrt_identity():
    np.testing.assert_allclose(proj.inverse_sqrt(np.eye(3)), np.eye(3),
                               atol=1e-12)


def test_inverse_sqrt_diagonal():
    R = proj.inverse_sqrt(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(R, np.diag([0.5, 1.0 / 3.0]), atol=1e-12)


def test_inverse_sqrt_defining_property():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = proj.inverse_sqrt(M)
    np.testing.assert_allclose(R @ M @ R, np.eye(2), atol=1e-8)
    assert np.abs(R - R.T).max() <= 1e-12


def test_inverse_sqrt_commutes_with_argument():
    rng = np.random.default_rng(5)
    for _ in range(20):
        M = random_spd(rng, int(rng.integers(2, 8)))
        R = proj.inverse_sqrt(M)
        assert np.abs(R @ M - M @ R).max() <= 1e-8


def test_inverse_sqrt_rejects_singular_and_asymmetric():
    with pytest.raises(NotPositiveDefinite):
        proj.inverse_sqrt(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        proj.inverse_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_oracle_examples():
    np.testing.assert_allclose(
        proj.oracle(np.eye(2), np.array([1.0, 2.0])).vector, [1.0, 2.0])
    np.testing.assert_allclose(
        proj.oracle(np.diag([1.0, 4.0]), np.array([1.0, 2.0])).vector,
        [1.0, 0.5])
    np.testing.assert_allclose(
        proj.oracle(np.array([[2.0, 1.0], [1.0, 2.0]]),
                    np.array([1.0, 1.0])).vector,
        [1.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_oracle_rejects_rank_one_covariance():
    # fully dependent case: the oracle of Definition 2 does not exist
    phi = np.array([1.0, 2.0])
    with pytest.raises(NotPositiveDefinite):
        proj.oracle(np.outer(phi, phi), np.array([1.0, 0.0]))


def test_oracle_zero_change():
    with pytest.raises(ZeroChange):
        proj.oracle(np.eye(2), np.zeros(2))


def test_pre_and_quasi_oracle():
    np.testing.assert_array_equal(proj.pre_oracle(np.array([3.0, 4.0])).vector,
                                  [3.0, 4.0])
    np.testing.assert_allclose(
        proj.quasi_oracle(np.array([1.0, 4.0]), np.array([1.0, 2.0])).vector,
        [1.0, 0.5])
    np.testing.assert_array_equal(
        proj.quasi_oracle(np.ones(3), np.array([1.0, -2.0, 3.0])).vector,
        proj.pre_oracle(np.array([1.0, -2.0, 3.0])).vector)


def test_random_unit_norm_and_1d():
    rng = np.random.default_rng(0)
    for d in (1, 2, 5, 100):
        r = proj.random_unit(d, rng)
        assert abs(np.linalg.norm(r.vector) - 1.0) <= 1e-12
    draws = {proj.random_unit(1, rng).vector[0] for _ in range(20)}
    assert draws <= {1.0, -1.0}


def test_random_unit_moments():
    # symmetry and exchangeability: <r, e1> has mean 0 and variance 1/d
    rng = np.random.default_rng(123)
    d = 8
    n = 100_000
    z = rng.standard_normal((n, d))
    coords = z[:, 0] / np.linalg.norm(z, axis=1)
    assert abs(coords.mean()) < 0.01
    assert abs(coords.var() - 1.0 / d) < 0.1 / d


def test_scaled_search_examples():
    got = proj.scaled_search(np.diag([1.0, 4.0]), np.array([1.0, 2.0]))
    np.testing.assert_allclose(got.vector, [1.0, 0.5])
    sigma = random_spd(np.random.default_rng(9), 4)
    delta = np.array([1.0, -1.0, 2.0, 0.5])
    np.testing.assert_allclose(proj.scaled_search(sigma, delta).vector,
                               proj.oracle(sigma, delta).vector, atol=1e-12)


def test_scaled_random_identity_scaling():
    rng = np.random.default_rng(21)
    r = proj.scaled_random(np.eye(6), rng)
    assert abs(np.linalg.norm(r.vector) - 1.0) <= 1e-10
    assert r.provenance is proj.Provenance.SCALED_RANDOM


def test_oracle_maximizes_efficiency():
    # Proposition 1 consequence: E1(delta, oracle) >= E1(delta, p) for any p
    rng = np.random.default_rng(77)
    for _ in range(200):
        d = int(rng.integers(2, 9))
        sigma = random_spd(rng, d)
        delta = rng.standard_normal(d)
        if np.linalg.norm(delta) < 1e-9:
            continue
        p = rng.standard_normal(d)
        e_star = eff_projection(delta, proj.oracle(sigma, delta).vector, sigma)
        assert e_star >= eff_projection(delta, p, sigma) - 1e-10


def test_projection_validation():
    with pytest.raises(ValueError):
        proj.Projection(np.zeros(3))
    with pytest.raises(ValueError):
        proj.Projection(np.array([np.inf, 1.0]))
