"""CUSUM processes, variance estimators, and the test statistics built on them.

All trajectories are evaluated on the discrete grid k/T.  The projected CUSUM is

    U(k/T) = T^{-1/2} ( sum_{t<=k} <X_t, p> - (k/T) sum_{t<=T} <X_t, p> ),

and the componentwise version Z_i(k/T) uses the same centering per row.  Max and
sum statistics run over k = 1..T-1: U(1) vanishes identically and the weight
w(t) = (t(1-t))^{-beta} diverges there for beta > 0, so the endpoint is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import (
    AllZero,
    DegenerateProjection,
    DimensionMismatch,
    NonPositiveVariance,
    ZeroVariance,
)
from .model import PanelSeries
from .projection import Projection

__all__ = [
    "CusumProcess",
    "WeightFunction",
    "TestResult",
    "project_series",
    "cusum_from_series",
    "projected_cusum",
    "tau",
    "tau_hat1",
    "tau_hat2",
    "amoc_statistic",
    "epidemic_statistic",
    "changepoint_estimate",
    "panel_cusum",
    "panel_statistic",
    "component_variances",
]

# variance estimates at or below this are treated as a degenerate series
ZERO_VARIANCE_TOL = 1e-14


@dataclass(frozen=True)
class CusumProcess:
    """Trajectory U(k/T), k=1..T, plus the normalizer used to studentize it."""

    values: np.ndarray
    normalizer: float | None = None
    kind: Literal["projected", "component"] = "projected"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("values must be a vector of length T >= 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("CUSUM values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def T(self):
        return self.values.size

    def with_normalizer(self, normalizer: float) -> "CusumProcess":
        return replace(self, normalizer=float(normalizer))


@dataclass(frozen=True)
class WeightFunction:
    """w(t) = (t(1-t))^{-beta} with 0 <= beta < 1/2."""

    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.beta < 0.5:
            raise ValueError("beta must lie in [0, 1/2)")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.beta == 0.0:
            return np.ones_like(t)
        return (t * (1.0 - t)) ** (-self.beta)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one calibrated test."""

    statistic: float
    critical_value: float
    p_value: float
    reject: bool
    estimated_changepoint: float | None = None


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, PanelSeries):
        return X.data
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a PanelSeries or a d x T array")
    return X


def _as_vector(p) -> np.ndarray:
    if isinstance(p, Projection):
        return p.vector
    return np.asarray(p, dtype=float)


def project_series(X, p) -> np.ndarray:
    """Projected observations <X_t, p> as a length-T series."""
    data = _as_matrix(X)
    v = _as_vector(p)
    if v.shape != (data.shape[0],):
        raise DimensionMismatch(
            f"projection has length {v.size} but the panel has d={data.shape[0]}"
        )
    return v @ data


def cusum_from_series(y) -> CusumProcess:
    """Centered partial-sum process of a univariate series, scaled by T^{-1/2}."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("y must be a vector of length T >= 2")
    T = y.size
    cs = np.cumsum(y)
    frac = np.arange(1, T + 1) / T  # frac[-1] == 1.0, so U(1) == 0 exactly
    return CusumProcess((cs - frac * cs[-1]) / np.sqrt(T))


def projected_cusum(X, p) -> CusumProcess:
    """CUSUM of the projected series; normalizer left unset."""
    return cusum_from_series(project_series(X, p))


def tau(p, sigma: np.ndarray) -> float:
    """Projected noise standard deviation sqrt(p^T Sigma p)."""
    v = _as_vector(p)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (v.size, v.size):
        raise DimensionMismatch("sigma and projection dimensions disagree")
    quad = float(v @ sigma @ v)
    scale = float(np.linalg.norm(v) ** 2 * max(1.0, np.abs(sigma).max()))
    if quad <= ZERO_VARIANCE_TOL * scale:
        raise DegenerateProjection("projected noise variance is not positive")
    return np.sqrt(quad)


def tau_hat1(y) -> float:
    """Global variance estimator: centered second moment of the whole series."""
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("need T >= 3 observations")
    est2 = float(np.mean((y - y.mean()) ** 2))
    if est2 <= ZERO_VARIANCE_TOL:
        raise ZeroVariance("series is (numerically) constant")
    return np.sqrt(est2)


def tau_hat2(y, U: CusumProcess) -> float:
    """Split variance estimator accounting for one mean change.

    Splits the series at k = argmax_k |U(k/T)| (smallest index on ties), centers
    each segment at its own mean, and pools the two sums of squares over T.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("need T >= 3 observations")
    if U.T != y.size:
        raise DimensionMismatch("U and y must have the same length")
    k = int(np.argmax(np.abs(U.values))) + 1
    left, right = y[:k], y[k:]
    ss = float(np.sum((left - left.mean()) ** 2))
    if right.size:
        ss += float(np.sum((right - right.mean()) ** 2))
    est2 = ss / y.size
    if est2 <= ZERO_VARIANCE_TOL:
        raise ZeroVariance("both segments are (numerically) constant")
    return np.sqrt(est2)


def _check_normalizer(U: CusumProcess) -> float:
    if U.normalizer is None:
        raise ValueError("CusumProcess has no normalizer; attach tau or tau_hat")
    if not U.normalizer > 0.0:
        raise ValueError("normalizer must be positive")
    return U.normalizer


def amoc_statistic(U: CusumProcess, w: WeightFunction,
                   mode: Literal["max", "sum"] = "max") -> float:
    """Weighted max or sum statistic of |U|/tau over the interior grid."""
    norm = _check_normalizer(U)
    T = U.T
    frac = np.arange(1, T) / T
    weighted = w(frac) * np.abs(U.values[: T - 1]) / norm
    if mode == "max":
        return float(weighted.max())
    if mode == "sum":
        return float(weighted.sum() / T)
    raise ValueError(f"unknown mode {mode!r}")


def epidemic_statistic(U: CusumProcess,
                       mode: Literal["max", "sum"] = "max") -> float:
    """Max or mean of |U(k2/T) - U(k1/T)| over all pairs k1 < k2."""
    norm = _check_normalizer(U)
    vals = U.values
    if mode == "max":
        return float((vals.max() - vals.min()) / norm)
    if mode == "sum":
        # sum of |v_i - v_j| over pairs equals sum_i (2i-1-T) v_(i) on sorted values
        T = vals.size
        s = np.sort(vals)
        coef = 2.0 * np.arange(1, T + 1) - 1.0 - T
        return float((coef @ s) / (T * T * norm))
    raise ValueError(f"unknown mode {mode!r}")


def changepoint_estimate(U: CusumProcess, w: WeightFunction | None = None) -> float:
    """Change location k/T maximizing w^2(k/T) U^2(k/T), smallest index on ties."""
    if w is None:
        w = WeightFunction(0.0)
    T = U.T
    frac = np.arange(1, T) / T
    score = (w(frac) * U.values[: T - 1]) ** 2
    if not np.any(score > 0.0):
        raise AllZero("CUSUM vanishes on the interior grid")
    return float((int(np.argmax(score)) + 1) / T)


def panel_cusum(X, variances) -> np.ndarray:
    """Centered aggregate of squared componentwise CUSUMs, V(k/T) for k=1..T.

    V(k/T) = d^{-1/2} sum_i ( Z_i^2(k/T)/sigma_i^2 - k(T-k)/T^2 ).
    """
    data = _as_matrix(X)
    d, T = data.shape
    variances = np.asarray(variances, dtype=float)
    if variances.shape != (d,):
        raise DimensionMismatch("variances must have one entry per component")
    if np.any(variances <= 0):
        raise NonPositiveVariance("all component variances must be positive")
    cs = np.cumsum(data, axis=1)
    frac = np.arange(1, T + 1) / T
    Z = (cs - frac * cs[:, -1:]) / np.sqrt(T)
    k = np.arange(1, T + 1)
    centering = k * (T - k) / T**2
    return ((Z**2 / variances[:, None]).sum(axis=0) - d * centering) / np.sqrt(d)


def panel_statistic(V, mode: Literal["max", "int"] = "max") -> float:
    """Signed max over the interior grid, or the Riemann sum T^{-1} sum_k V."""
    V = np.asarray(V, dtype=float)
    T = V.size
    if mode == "max":
        return float(V[: T - 1].max())
    if mode == "int":
        return float(V[: T - 1].sum() / T)
    raise ValueError(f"unknown mode {mode!r}")


def component_variances(X, method: Literal["naive", "split"] = "split") -> np.ndarray:
    """Per-component variance estimates (tau_hat1^2 or tau_hat2^2 on each row).

    The split variant splits each row at the argmax of its own univariate
    CUSUM (in absolute value, smallest index on ties) and centers each segment
    at its own mean, exactly as tau_hat2 does.
    """
    data = _as_matrix(X)
    d, T = data.shape
    if T < 3:
        raise ValueError("need T >= 3 observations")
    # center each row first: both estimators are location invariant and this
    # keeps the cumulative-sum formulas below numerically safe
    data = data - data.mean(axis=1, keepdims=True)
    if method == "naive":
        est2 = np.mean(data**2, axis=1)
    elif method == "split":
        cs = np.cumsum(data, axis=1)
        frac = np.arange(1, T + 1) / T
        Z = cs - frac * cs[:, -1:]  # sqrt(T) scaling is argmax-irrelevant
        k = np.argmax(np.abs(Z), axis=1) + 1
        rows = np.arange(d)
        cs2 = np.cumsum(data**2, axis=1)
        left_sum, left_sq = cs[rows, k - 1], cs2[rows, k - 1]
        ss_left = left_sq - left_sum**2 / k
        n_right = T - k
        right_sum, right_sq = cs[:, -1] - left_sum, cs2[:, -1] - left_sq
        ss_right = np.where(n_right > 0,
                            right_sq - right_sum**2 / np.maximum(n_right, 1), 0.0)
        est2 = (ss_left + ss_right) / T
    else:
        raise ValueError(f"unknown method {method!r}")
    bad = np.nonzero(est2 <= ZERO_VARIANCE_TOL)[0]
    if bad.size:
        raise ZeroVariance(f"component {bad[0]} is (numerically) constant")
    return est2
