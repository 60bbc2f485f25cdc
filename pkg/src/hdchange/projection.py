"""Search directions: oracle-type, random, and covariance-scaled projections.

Every projection is used scale-free downstream (the studentized statistics are
invariant under nonzero rescaling), so each constructor returns one convenient
representative of its class.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._rng import as_rng
from .errors import (
    DimensionMismatch,
    NonPositiveVariance,
    NotPositiveDefinite,
    ZeroChange,
)

__all__ = [
    "Provenance",
    "Projection",
    "inverse_sqrt",
    "oracle",
    "misscaled_oracle",
    "pre_oracle",
    "quasi_oracle",
    "random_unit",
    "scaled_random",
    "scaled_search",
]

# relative eigenvalue tolerance below which a matrix is treated as singular
SPD_RTOL = 1e-12


class Provenance(enum.Enum):
    ORACLE = "oracle"
    PRE_ORACLE = "pre_oracle"
    QUASI_ORACLE = "quasi_oracle"
    SCALED_SEARCH = "scaled_search"
    RANDOM_UNIT = "random_unit"
    SCALED_RANDOM = "scaled_random"
    MISSCALED_ORACLE = "misscaled_oracle"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Projection:
    """A d-vector search direction together with how it was constructed."""

    vector: np.ndarray
    provenance: Provenance = Provenance.CUSTOM

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("projection vector must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("projection vector must be finite")
        if not np.any(v != 0.0):
            raise ValueError("projection vector must have a nonzero entry")
        object.__setattr__(self, "vector", v)

    @property
    def d(self):
        return self.vector.size


def _check_spd(M: np.ndarray, name="matrix"):
    """Validate symmetry and positive definiteness; return (eigvals, eigvecs)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-10):
        raise ValueError(f"{name} must be symmetric (within 1e-10)")
    w, v = np.linalg.eigh(M)
    if w[-1] <= 0 or w[0] <= SPD_RTOL * w[-1]:
        raise NotPositiveDefinite(
            f"{name} has eigenvalue {w[0]:.3e} below tolerance "
            f"{SPD_RTOL:.0e} * {w[-1]:.3e}"
        )
    return w, v


def inverse_sqrt(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Symmetric inverse square root M^{-1/2} via spectral decomposition.

    Raises NotPositiveDefinite when the smallest eigenvalue is at or below
    1e-12 times the largest.  The result R satisfies R @ M @ R = I to 1e-8.
    """
    w, v = _check_spd(M, name)
    R = (v / np.sqrt(w)) @ v.T
    return (R + R.T) / 2


def _spd_solve(M: np.ndarray, b: np.ndarray, name="matrix") -> np.ndarray:
    """Solve M x = b after SPD validation (Cholesky, no explicit inverse)."""
    _check_spd(M, name)
    c = np.linalg.cholesky(np.asarray(M, dtype=float))
    y = np.linalg.solve(c, b)
    return np.linalg.solve(c.T, y)


def _check_change(delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 1:
        raise ValueError("delta must be a vector")
    if np.linalg.norm(delta) == 0.0:
        raise ZeroChange("the change vector must have positive norm")
    return delta


def oracle(sigma: np.ndarray, delta) -> Projection:
    """Efficiency-maximizing projection Sigma^{-1} delta (solved, not inverted)."""
    delta = _check_change(delta)
    if np.shape(sigma) != (delta.size, delta.size):
        raise DimensionMismatch("sigma and delta dimensions disagree")
    return Projection(_spd_solve(sigma, delta, "sigma"), Provenance.ORACLE)


def misscaled_oracle(assumed: np.ndarray, delta) -> Projection:
    """M^{-1} delta for an assumed covariance M (possibly != the true Sigma)."""
    delta = _check_change(delta)
    return Projection(_spd_solve(assumed, delta, "assumed covariance"),
                      Provenance.MISSCALED_ORACLE)


def pre_oracle(delta) -> Projection:
    """The change direction itself, using no covariance information."""
    return Projection(_check_change(delta).copy(), Provenance.PRE_ORACLE)


def quasi_oracle(variances, delta) -> Projection:
    """Componentwise scaling delta / sigma^2 using the diagonal variances only."""
    delta = _check_change(delta)
    variances = np.asarray(variances, dtype=float)
    if variances.shape != delta.shape:
        raise DimensionMismatch("variances and delta must have the same length")
    if np.any(variances <= 0):
        raise NonPositiveVariance("all component variances must be positive")
    return Projection(delta / variances, Provenance.QUASI_ORACLE)


def random_unit(d: int, rng) -> Projection:
    """Uniform draw on the d-dimensional unit sphere (normalized Gaussians)."""
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = as_rng(rng)
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 0.0:  # a zero draw has probability zero; regenerate
            return Projection(v / norm, Provenance.RANDOM_UNIT)


def scaled_random(M: np.ndarray, rng) -> Projection:
    """M^{-1/2} r for a uniform unit-sphere draw r; misscaled when M != Sigma."""
    R = inverse_sqrt(M, "scaling matrix")
    r = random_unit(R.shape[0], rng)
    return Projection(R @ r.vector, Provenance.SCALED_RANDOM)


def scaled_search(M: np.ndarray, s) -> Projection:
    """M^{-1} s, the search direction s rescaled by an assumed covariance M."""
    s = np.asarray(s, dtype=float)
    if np.linalg.norm(s) == 0.0:
        raise ZeroChange("the search direction must have positive norm")
    if np.shape(M) != (s.size, s.size):
        raise DimensionMismatch("M and s dimensions disagree")
    return Projection(_spd_solve(M, s, "M"), Provenance.SCALED_SEARCH)
