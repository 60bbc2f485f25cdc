"""Binary segmentation for multiple change points, plus the market-data transform.

A segmentation run repeatedly applies a configured single-change test: when a
segment rejects, it is split at the estimated change (assigned to the left
half) and both halves are examined recursively.  Variances are re-estimated on
every segment.  Segments shorter than twice ``min_segment`` are not tested,
and split candidates are restricted so that every resulting segment keeps at
least ``min_segment`` points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import limits
from .errors import NonPositivePrice, ZeroVariance
from .model import PanelSeries
from .stats import (
    TestResult,
    WeightFunction,
    amoc_statistic,
    component_variances,
    cusum_from_series,
    epidemic_statistic,
    panel_cusum,
    panel_statistic,
    project_series,
    tau,
    tau_hat1,
    tau_hat2,
)

__all__ = [
    "fuller_transform",
    "ProjectionTester",
    "PanelTester",
    "Detection",
    "SegmentationResult",
    "binary_segmentation",
]


def fuller_transform(prices, tau_f: float = 0.02) -> np.ndarray:
    """Variance-stabilized log squared returns of a positive price series.

    With r_t = log(P_t/P_{t-1}) and s^2 the sample variance (ddof=1) of r,
    returns y_t = log(r_t^2 + tau_f s^2) - tau_f s^2 / (r_t^2 + tau_f s^2),
    turning volatility changes into mean changes.  Symmetric in the sign of r.
    """
    prices = np.asarray(prices, dtype=float)
    if prices.ndim != 1 or prices.size < 3:
        raise ValueError("need a price series of length at least 3")
    if np.any(prices <= 0.0) or not np.all(np.isfinite(prices)):
        raise NonPositivePrice("prices must be finite and strictly positive")
    if tau_f <= 0.0:
        raise ValueError("tau_f must be positive")
    r = np.diff(np.log(prices))
    pert = tau_f * float(np.var(r, ddof=1))
    shifted = r**2 + pert
    if np.all(shifted == 0.0):  # constant prices: keep the output finite-constant
        return np.zeros(r.size)
    return np.log(shifted) - pert / shifted


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, PanelSeries):
        return X.data
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return X[None, :]
    return X


@dataclass(frozen=True)
class ProjectionTester:
    """Single-change test of the series projected on a fixed direction.

    ``variance`` selects the studentizer: "known" uses sqrt(p' sigma p) with
    the supplied covariance, "global" the whole-segment estimator, "split" the
    argmax-split estimator (the small-sample default).  ``shape`` picks the
    alternative: "amoc" uses the weighted one-change statistics, "epidemic"
    the unweighted pair-difference statistics (no location estimate).
    """

    direction: np.ndarray
    alpha: float = 0.05
    beta: float = 0.0
    mode: Literal["max", "sum"] = "max"
    shape: Literal["amoc", "epidemic"] = "amoc"
    variance: Literal["known", "global", "split"] = "split"
    sigma: np.ndarray | None = None
    mc_reps: int = 20_000
    mc_grid: int = 1000
    seed: int = 0
    cache_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "direction",
                           np.asarray(self.direction, dtype=float))
        if self.variance == "known" and self.sigma is None:
            raise ValueError('variance="known" requires sigma')

    def law(self) -> limits.LimitLaw:
        if self.shape == "epidemic":
            return (limits.epidemic_sup() if self.mode == "max"
                    else limits.epidemic_int())
        if self.mode == "max":
            return limits.bridge_sup(self.beta)
        return limits.bridge_abs_int(self.beta)

    def evaluate(self, X) -> tuple[TestResult, np.ndarray]:
        """Test one segment; also return the location score over k=1..T-1."""
        data = _as_matrix(X)
        y = project_series(data, self.direction)
        U = cusum_from_series(y)
        if self.variance == "known":
            norm = tau(self.direction, self.sigma)
        elif self.variance == "global":
            norm = tau_hat1(y)
        else:
            norm = tau_hat2(y, U)
        U = U.with_normalizer(norm)
        w = WeightFunction(self.beta)
        if self.shape == "epidemic":
            stat = epidemic_statistic(U, self.mode)
        else:
            stat = amoc_statistic(U, w, self.mode)
        crit = limits.quantile(self.law(), self.alpha, reps=self.mc_reps,
                               grid=self.mc_grid, seed=self.seed,
                               cache_dir=self.cache_dir)
        p = limits.mc_pvalue(stat, self.law(), reps=self.mc_reps,
                             grid=self.mc_grid, seed=self.seed)
        T = U.T
        frac = np.arange(1, T) / T
        score = (w(frac) * U.values[: T - 1]) ** 2
        cp = None
        if self.shape == "amoc" and np.any(score > 0.0):
            cp = (int(np.argmax(score)) + 1) / T
        return TestResult(stat, crit, p, stat > crit, cp), score

    def test(self, X) -> TestResult:
        return self.evaluate(X)[0]


@dataclass(frozen=True)
class PanelTester:
    """Single-change test aggregating all components' squared CUSUMs.

    ``variances`` is either a fixed d-vector of known component variances or
    one of "naive"/"split" for per-segment estimation.
    """

    variances: np.ndarray | Literal["naive", "split"] = "split"
    alpha: float = 0.05
    mode: Literal["max", "int"] = "max"
    mc_reps: int = 20_000
    mc_grid: int = 1000
    seed: int = 0
    cache_dir: str | None = None

    def law(self) -> limits.LimitLaw:
        return limits.panel_sup() if self.mode == "max" else limits.panel_int()

    def evaluate(self, X) -> tuple[TestResult, np.ndarray]:
        data = _as_matrix(X)
        if isinstance(self.variances, str):
            var = component_variances(data, self.variances)
        else:
            var = np.asarray(self.variances, dtype=float)
        V = panel_cusum(data, var)
        stat = panel_statistic(V, self.mode)
        crit = limits.quantile(self.law(), self.alpha, reps=self.mc_reps,
                               grid=self.mc_grid, seed=self.seed,
                               cache_dir=self.cache_dir)
        p = limits.mc_pvalue(stat, self.law(), reps=self.mc_reps,
                             grid=self.mc_grid, seed=self.seed)
        T = V.size
        score = V[: T - 1]
        cp = (int(np.argmax(score)) + 1) / T
        return TestResult(stat, crit, p, stat > crit, cp), score

    def test(self, X) -> TestResult:
        return self.evaluate(X)[0]


@dataclass(frozen=True)
class Detection:
    """One accepted split: segment bounds, split location, and test outcome."""

    order: int      # position in the recursion (preorder)
    depth: int
    start: int      # segment start, 0-based inclusive
    end: int        # segment end, exclusive
    location: int   # last pre-change time index, 1-based
    statistic: float
    p_value: float


@dataclass(frozen=True)
class SegmentationResult:
    """All detected changes (sorted by location) plus the detection tree."""

    changes: tuple       # ((location, statistic, p_value), ...)
    tree: tuple          # (Detection, ...) in detection order

    def locations(self) -> list[int]:
        return [c[0] for c in self.changes]


def binary_segmentation(X, tester, level: float = 0.05,
                        min_segment: int = 10) -> SegmentationResult:
    """Recursive change-point search with a configured single-change test.

    Splits happen only when the segment's MC p-value is at or below ``level``;
    the change point is assigned to the left segment.  Deterministic for fixed
    inputs and tester seed.
    """
    if min_segment < 5:
        raise ValueError("min_segment must be at least 5")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0,1)")
    data = _as_matrix(X)
    T = data.shape[1]
    detections: list[Detection] = []

    def recurse(lo: int, hi: int, depth: int):
        length = hi - lo
        if length < 2 * min_segment:
            return
        try:
            result, score = tester.evaluate(data[:, lo:hi])
        except ZeroVariance:
            return  # a (numerically) constant segment contains no change
        if result.p_value > level:
            return
        window = score[min_segment - 1: length - min_segment]
        split = lo + min_segment + int(np.argmax(window))  # left gets the change
        detections.append(Detection(
            order=len(detections), depth=depth, start=lo, end=hi,
            location=split, statistic=result.statistic, p_value=result.p_value,
        ))
        recurse(lo, split, depth + 1)
        recurse(split, hi, depth + 1)

    recurse(0, T, 0)
    changes = tuple(sorted((d.location, d.statistic, d.p_value)
                           for d in detections))
    return SegmentationResult(changes=changes, tree=tuple(detections))
