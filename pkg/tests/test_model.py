"""Tests for the data-generating model."""

import numpy as np
import pytest

from hdchange import model
from hdchange.errors import DimensionMismatch


def test_amoc_noise_free_mean_path():
    spec = model.ChangeSpec(delta=np.array([1.0]), shape=model.Amoc(0.5))
    X = model.generate(spec, model.GeneralLinear([], d=1), T=4, seed=0)
    np.testing.assert_array_equal(X.data, [[0.0, 0.0, 1.0, 1.0]])


def test_generate_null_mean_converges():
    mu = np.array([2.0, -1.0])
    spec = model.ChangeSpec(delta=np.zeros(2), shape=model.Amoc(0.5), mu=mu)
    X = model.generate(spec, model.IndependentComponents(np.ones(2)), T=20_000,
                       seed=42)
    np.testing.assert_allclose(X.data.mean(axis=1), mu, atol=0.05)


def test_generate_change_is_deterministic_mean_shift():
    structure = model.Mixed(np.ones(3), 0.5 * np.ones(3))
    delta = np.array([1.0, -2.0, 0.5])
    shape = model.Amoc(0.3)
    null = model.generate(model.ChangeSpec(np.zeros(3), shape), structure,
                          T=50, seed=7)
    alt = model.generate(model.ChangeSpec(delta, shape), structure, T=50, seed=7)
    g = shape.evaluate(np.arange(1, 51) / 50)
    # identical noise for the shared seed; difference is the mean path to ulp
    np.testing.assert_allclose(alt.data - null.data, np.outer(delta, g),
                               atol=1e-12)


def test_mixed_empirical_covariance():
    # Sigma = diag(s^2) + phi phi^T computed directly
    structure = model.Mixed(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    rng = np.random.default_rng(3)
    e = structure.draw(100_000, rng)
    emp = np.cov(e)
    np.testing.assert_allclose(emp, [[2.0, 1.0], [1.0, 2.0]], atol=0.05)


def test_covariance_closed_forms():
    np.testing.assert_array_equal(
        model.covariance(model.IndependentComponents(np.array([1.0, 2.0]))),
        np.diag([1.0, 4.0]))
    np.testing.assert_array_equal(
        model.covariance(model.Mixed(np.array([1.0, 1.0]), np.array([1.0, 1.0]))),
        [[2.0, 1.0], [1.0, 2.0]])
    full = model.covariance(model.FullyDependent(np.array([1.0, 2.0])))
    np.testing.assert_array_equal(full, [[1.0, 2.0], [2.0, 4.0]])
    assert np.linalg.matrix_rank(full) == 1


def test_covariance_symmetric_psd_random_structures():
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = rng.integers(1, 7)
        m = rng.integers(0, 4)
        loadings = [rng.standard_normal(d) for _ in range(m)]
        sigma = model.covariance(model.GeneralLinear(loadings, d=d))
        assert np.abs(sigma - sigma.T).max() <= 1e-10
        assert np.linalg.eigvalsh(sigma).min() >= -1e-8


def test_drift_curve_amoc_closed_form():
    # (x - theta)_+ - x (1 - theta); at x = theta = 0.5 this is -0.25
    H = model.drift_curve(model.Amoc(0.5), 4)
    np.testing.assert_allclose(H, [0.0, -0.125, -0.25, -0.125, 0.0], atol=1e-12)
    grid = 1000
    x = np.arange(grid + 1) / grid
    expect = np.maximum(x - 0.3, 0.0) - x * 0.7
    np.testing.assert_allclose(model.drift_curve(model.Amoc(0.3), grid), expect,
                               atol=2 / grid)


def test_drift_curve_epidemic_hand_values():
    # piecewise integration by hand: H(0.5) = 0.25 - 0.5*0.5 = 0,
    # H(0.25) = 0 - 0.25*0.5 = -0.125; Riemann sums carry O(1/grid) error
    grid = 400
    H = model.drift_curve(model.Epidemic(0.25, 0.75), grid)
    assert H[grid // 2] == pytest.approx(0.0, abs=2.0 / grid)
    assert H[grid // 4] == pytest.approx(-0.125, abs=2.0 / grid)


def test_drift_curve_constant_shape_vanishes():
    H = model.drift_curve(model.Tabulated(np.full(16, 3.7)), 16)
    np.testing.assert_allclose(H, 0.0, atol=1e-12)


def test_drift_curve_endpoints_zero_every_shape():
    shapes = [model.Amoc(0.3), model.Epidemic(0.2, 0.6),
              model.Tabulated(np.sin(np.arange(1, 33)))]
    for shape in shapes:
        H = model.drift_curve(shape, 32)
        assert H[0] == 0.0
        assert H[-1] == pytest.approx(0.0, abs=1e-15)


def test_drift_curve_amoc_argmax_at_theta():
    for theta in (0.2, 0.37, 0.5, 0.81):
        grid = 500
        H = model.drift_curve(model.Amoc(theta), grid)
        k = np.argmax(np.abs(H))
        assert abs(k / grid - theta) <= 1.0 / grid + 1e-12
        assert np.abs(H).max() == pytest.approx(theta * (1 - theta), abs=2 / grid)


def test_tabulated_matches_left_endpoint_grid():
    vals = np.array([1.0, 2.0, 3.0, 4.0])
    shape = model.Tabulated(vals)
    np.testing.assert_array_equal(shape.evaluate(np.arange(1, 5) / 4), vals)


def test_generate_validation_errors():
    spec = model.ChangeSpec(np.ones(2), model.Amoc(0.5))
    with pytest.raises(DimensionMismatch):
        model.generate(spec, model.IndependentComponents(np.ones(3)), 10, 0)
    with pytest.raises(ValueError):
        model.IndependentComponents(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        model.generate(spec, model.IndependentComponents(np.ones(2)), 1, 0)
    with pytest.raises(ValueError):
        model.Amoc(1.5)
    with pytest.raises(ValueError):
        model.Epidemic(0.7, 0.3)


def test_custom_innovation_law():
    def rademacher(rng, size):
        return rng.choice([-1.0, 1.0], size=size)

    structure = model.IndependentComponents(np.ones(2),
                                            innovation_law=rademacher)
    e = structure.draw(1000, np.random.default_rng(0))
    assert set(np.unique(e)) == {-1.0, 1.0}
