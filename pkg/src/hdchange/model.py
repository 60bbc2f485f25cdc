"""Data-generating model: signal shapes, factor error structures, synthetic panels.

The observation model is

    X[i, t] = mu[i] + delta[i] * g(t/T) + e[i, t],      1 <= i <= d, 1 <= t <= T,

with g a Riemann-integrable signal shape on [0, 1] and the noise vectors
e_t = A @ eta_t drawn i.i.d. across time from a finite linear factor model
(columns of A are the factor loadings).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._rng import as_rng
from .errors import DimensionMismatch

__all__ = [
    "SignalShape",
    "Amoc",
    "Epidemic",
    "Tabulated",
    "ErrorStructure",
    "IndependentComponents",
    "FullyDependent",
    "Mixed",
    "GeneralLinear",
    "ChangeSpec",
    "PanelSeries",
    "generate",
    "covariance",
    "drift_curve",
]


# ---------------------------------------------------------------------------
# signal shapes
# ---------------------------------------------------------------------------

class SignalShape:
    """Signal shape g: [0, 1] -> R describing the type of mean change."""

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Amoc(SignalShape):
    """At most one change: g jumps from 0 to 1 at rescaled time ``theta``."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0,1), got {self.theta}")

    def evaluate(self, u):
        return (np.asarray(u, dtype=float) > self.theta).astype(float)


@dataclass(frozen=True)
class Epidemic(SignalShape):
    """Epidemic change: g is 1 exactly on the open interval (theta1, theta2)."""

    theta1: float
    theta2: float

    def __post_init__(self):
        if not 0.0 < self.theta1 < self.theta2 < 1.0:
            raise ValueError("need 0 < theta1 < theta2 < 1")

    def evaluate(self, u):
        u = np.asarray(u, dtype=float)
        return ((u > self.theta1) & (u < self.theta2)).astype(float)


class Tabulated(SignalShape):
    """Signal shape given by its values on the left-endpoint grid t/n, t=1..n."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("values must be a non-empty vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("tabulated values must be finite")
        self.values = values

    def evaluate(self, u):
        u = np.asarray(u, dtype=float)
        n = self.values.size
        # u in ((k-1)/n, k/n] maps to values[k-1]; u=0 maps to the first cell
        idx = np.clip(np.ceil(u * n).astype(int), 1, n) - 1
        return self.values[idx]


# ---------------------------------------------------------------------------
# error structures
# ---------------------------------------------------------------------------

def _standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size)


def _check_vector(v, name, positive=False) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    if positive and np.any(v <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return v


class ErrorStructure:
    """Cross-sectional dependence via factor loadings; e_t = A @ eta_t.

    ``innovation_law`` draws the i.i.d. innovations eta; it must produce
    zero-mean, unit-variance variates with a finite moment of order > 2
    (documented requirement, not enforced at runtime).
    """

    innovation_law: Callable[[np.random.Generator, tuple], np.ndarray]

    @property
    def d(self) -> int:
        raise NotImplementedError

    def loading_matrix(self) -> np.ndarray:
        """d x m matrix A whose columns are the factor loadings a_j."""
        raise NotImplementedError

    def covariance(self) -> np.ndarray:
        """Noise covariance Sigma = sum_j a_j a_j^T in closed form."""
        raise NotImplementedError

    def draw(self, T: int, rng: np.random.Generator) -> np.ndarray:
        """d x T noise matrix, i.i.d. columns from the factor model."""
        A = self.loading_matrix()
        eta = self.innovation_law(rng, (A.shape[1], T))
        return A @ eta


@dataclass(frozen=True)
class IndependentComponents(ErrorStructure):
    """Independent components; component j has standard deviation s[j] > 0."""

    s: np.ndarray
    innovation_law: Callable = field(default=_standard_normal, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "s", _check_vector(self.s, "s", positive=True))

    @property
    def d(self):
        return self.s.size

    def loading_matrix(self):
        return np.diag(self.s)

    def covariance(self):
        return np.diag(self.s**2)


@dataclass(frozen=True)
class FullyDependent(ErrorStructure):
    """A single common factor with loadings phi; Sigma = phi phi^T (rank one)."""

    phi: np.ndarray
    innovation_law: Callable = field(default=_standard_normal, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "phi", _check_vector(self.phi, "phi"))

    @property
    def d(self):
        return self.phi.size

    def loading_matrix(self):
        return self.phi[:, None]

    def covariance(self):
        return np.outer(self.phi, self.phi)


@dataclass(frozen=True)
class Mixed(ErrorStructure):
    """Idiosyncratic noise plus one common factor.

    Sigma = diag(s^2) + phi phi^T, so component j has variance s[j]^2 + phi[j]^2.
    """

    s: np.ndarray
    phi: np.ndarray
    innovation_law: Callable = field(default=_standard_normal, repr=False)

    def __post_init__(self):
        s = _check_vector(self.s, "s", positive=True)
        phi = _check_vector(self.phi, "phi")
        if s.size != phi.size:
            raise DimensionMismatch("s and phi must have the same length")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "phi", phi)

    @property
    def d(self):
        return self.s.size

    def loading_matrix(self):
        return np.concatenate([np.diag(self.s), self.phi[:, None]], axis=1)

    def covariance(self):
        return np.diag(self.s**2) + np.outer(self.phi, self.phi)


class GeneralLinear(ErrorStructure):
    """Arbitrary finite list of factor loadings a_j (possibly empty: no noise)."""

    def __init__(self, loadings: Sequence, d: int | None = None,
                 innovation_law: Callable = _standard_normal):
        loadings = tuple(_check_vector(a, "loading") for a in loadings)
        if loadings:
            d = loadings[0].size
            if any(a.size != d for a in loadings):
                raise DimensionMismatch("all loadings must have the same length")
        elif d is None:
            raise ValueError("d is required when the loading list is empty")
        self.loadings = loadings
        self._d = d
        self.innovation_law = innovation_law

    @property
    def d(self):
        return self._d

    def loading_matrix(self):
        if not self.loadings:
            return np.zeros((self._d, 1))
        return np.stack(self.loadings, axis=1)

    def covariance(self):
        A = self.loading_matrix()
        return A @ A.T


def covariance(structure: ErrorStructure) -> np.ndarray:
    """Noise covariance of an error structure (symmetric PSD by construction)."""
    return structure.covariance()


# ---------------------------------------------------------------------------
# change specification and panel container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChangeSpec:
    """Per-component change sizes, the signal shape, and baseline means.

    ``norm(delta) == 0`` encodes the null hypothesis of no change.
    """

    delta: np.ndarray
    shape: SignalShape
    mu: np.ndarray | None = None

    def __post_init__(self):
        delta = _check_vector(self.delta, "delta")
        object.__setattr__(self, "delta", delta)
        mu = np.zeros(delta.size) if self.mu is None else _check_vector(self.mu, "mu")
        if mu.size != delta.size:
            raise DimensionMismatch("mu and delta must have the same length")
        object.__setattr__(self, "mu", mu)

    @property
    def d(self):
        return self.delta.size


@dataclass(frozen=True)
class PanelSeries:
    """d x T matrix of observations; rows are components, columns are times."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be a d x T matrix")
        if data.shape[0] < 1 or data.shape[1] < 2:
            raise ValueError("need d >= 1 components and T >= 2 time points")
        if not np.all(np.isfinite(data)):
            raise ValueError("observations must be finite")
        object.__setattr__(self, "data", data)

    @property
    def d(self):
        return self.data.shape[0]

    @property
    def T(self):
        return self.data.shape[1]


def generate(spec: ChangeSpec, structure: ErrorStructure, T: int, seed) -> PanelSeries:
    """Draw a synthetic panel X[i,t] = mu[i] + delta[i] g(t/T) + e[i,t].

    The noise is i.i.d. across time from the factor model; the draw is
    deterministic given ``seed`` (an int or a numpy Generator).
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    if spec.d != structure.d:
        raise DimensionMismatch(
            f"change spec has d={spec.d} but structure has d={structure.d}"
        )
    rng = as_rng(seed)
    g = spec.shape.evaluate(np.arange(1, T + 1) / T)
    signal = spec.mu[:, None] + np.outer(spec.delta, g)
    return PanelSeries(signal + structure.draw(T, rng))


def drift_curve(shape: SignalShape, grid: int) -> np.ndarray:
    """H(x) = int_0^x g(t) dt - x int_0^1 g(t) dt on the grid k/grid, k=0..grid.

    Integrals are left-endpoint Riemann sums over t/grid, matching the discrete
    sums inside the CUSUM statistics.  For an AMOC shape this reproduces the
    closed form (x - theta)_+ - x (1 - theta) up to grid error.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    g = shape.evaluate(np.arange(1, grid + 1) / grid)
    partial = np.concatenate([[0.0], np.cumsum(g)]) / grid
    x = np.arange(grid + 1) / grid
    return partial - x * partial[-1]
