"""Closed-form high-dimensional efficiency calculators.

The efficiency of a statistic is the rate at which a shrinking change stays
detectable as d and T grow; values are the fixed class representatives

    projection:           E1(delta, p) = |<delta, p>| / sqrt(p^T Sigma p)
    oracle projection:    E1(delta, Sigma^-1 delta) = ||Sigma^{-1/2} delta||
    panel (diagonal Sigma):   E2(delta) = d^{-1/4} sqrt(sum delta_i^2/sigma_i^2)
    misspecified panel:       E3(delta) = A_d^{-1/2} sqrt(delta' Lambda^{-1} delta)

with A_d = sum phi_i^2 / (s_i^2 + phi_i^2) the common-factor contamination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateProjection,
    DimensionMismatch,
    NonPositiveVariance,
    NotProportional,
    ZeroChange,
    ZeroDependence,
)
from .projection import Projection, _spd_solve, inverse_sqrt
from .stats import tau

__all__ = [
    "EfficiencyReport",
    "eff_projection",
    "eff_oracle",
    "eff_mixed_oracle",
    "eff_panel",
    "eff_panel_misspecified",
    "detection_cone",
    "eff_random_bounds",
]


@dataclass(frozen=True)
class EfficiencyReport:
    """Efficiency values for a (delta, covariance, method) configuration."""

    e_oracle: float
    cone_halfangle: float
    e1: float | None = None
    e2: float | None = None
    e3: float | None = None
    a_d: float | None = None

    def as_lines(self) -> list[str]:
        out = [f"e_oracle={self.e_oracle:.10g}"]
        if self.e1 is not None:
            out.append(f"e1={self.e1:.10g}")
        if self.e2 is not None:
            out.append(f"e2={self.e2:.10g}")
        if self.e3 is not None:
            out.append(f"e3={self.e3:.10g}")
        if self.a_d is not None:
            out.append(f"a_d={self.a_d:.10g}")
        out.append(f"cone_halfangle={self.cone_halfangle:.10g}")
        return out


def _vec(x, name) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{name} must be a vector")
    return x


def _change(delta) -> np.ndarray:
    delta = _vec(delta, "delta")
    if np.linalg.norm(delta) == 0.0:
        raise ZeroChange("the change vector must have positive norm")
    return delta


def eff_projection(delta, p, sigma) -> float:
    """E1 = |<delta, p>| / tau(p) for an arbitrary search direction."""
    delta = _vec(delta, "delta")
    v = p.vector if isinstance(p, Projection) else _vec(p, "p")
    if v.shape != delta.shape:
        raise DimensionMismatch("delta and p must have the same length")
    return float(abs(delta @ v) / tau(v, sigma))


def eff_oracle(delta, sigma) -> float:
    """Best attainable projection efficiency ||Sigma^{-1/2} delta||."""
    delta = _change(delta)
    if np.shape(sigma) != (delta.size, delta.size):
        raise DimensionMismatch("sigma and delta dimensions disagree")
    return float(np.sqrt(delta @ _spd_solve(sigma, delta, "sigma")))


def eff_mixed_oracle(delta, s, phi) -> float:
    """Oracle efficiency in the one-factor mixed case with delta || phi.

    Closed form ||delta|| / sqrt(1 + sum phi_j^2/s_j^2)
    * sqrt( (sum delta_j^2/s_j^2) / sum delta_j^2 ); requires delta
    proportional to phi (cosine within 1e-10 of 1).
    """
    delta = _change(delta)
    s = _vec(s, "s")
    phi = _vec(phi, "phi")
    if not delta.shape == s.shape == phi.shape:
        raise DimensionMismatch("delta, s, phi must have the same length")
    if np.any(s <= 0):
        raise NonPositiveVariance("s must be strictly positive")
    nphi = np.linalg.norm(phi)
    cos = abs(delta @ phi) / (np.linalg.norm(delta) * nphi) if nphi > 0 else 0.0
    if cos < 1.0 - 1e-10:
        raise NotProportional("delta must be proportional to phi")
    norm2 = float(delta @ delta)
    return float(np.sqrt(norm2 / (1.0 + np.sum(phi**2 / s**2)))
                 * np.sqrt(np.sum(delta**2 / s**2) / norm2))


def eff_panel(delta, variances) -> float:
    """Panel efficiency d^{-1/4} sqrt(sum delta_i^2 / sigma_i^2)."""
    delta = _vec(delta, "delta")
    variances = _vec(variances, "variances")
    if variances.shape != delta.shape:
        raise DimensionMismatch("delta and variances must have the same length")
    if np.any(variances <= 0):
        raise NonPositiveVariance("all component variances must be positive")
    d = delta.size
    return float(d ** (-0.25) * np.sqrt(np.sum(delta**2 / variances)))


def eff_panel_misspecified(delta, s, phi) -> tuple[float, float]:
    """(E3, A_d) for the panel statistic run as if components were independent.

    A_d = sum phi_i^2/(s_i^2+phi_i^2); E3 = A_d^{-1/2}
    sqrt(sum delta_i^2/(s_i^2+phi_i^2)).  Raises ZeroDependence when A_d
    vanishes (the uncontaminated regime, where E2 applies instead).
    """
    delta = _vec(delta, "delta")
    s = _vec(s, "s")
    phi = _vec(phi, "phi")
    if not delta.shape == s.shape == phi.shape:
        raise DimensionMismatch("delta, s, phi must have the same length")
    if np.any(s <= 0):
        raise NonPositiveVariance("s must be strictly positive")
    sig2 = s**2 + phi**2
    a_d = float(np.sum(phi**2 / sig2))
    if a_d <= 1e-14:
        raise ZeroDependence("A_d vanishes; use eff_panel for this regime")
    e3 = float(np.sqrt(np.sum(delta**2 / sig2) / a_d))
    return e3, a_d


def detection_cone(d: int) -> float:
    """Half-angle arccos(d^{-1/4}) of the cone where projecting beats the panel.

    The angle is measured between Sigma^{1/2} p and Sigma^{-1/2} delta: the
    projection efficiency is ||Sigma^{-1/2}delta|| cos(angle) and exceeds the
    panel efficiency d^{-1/4} ||Sigma^{-1/2}delta|| exactly inside the cone.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    return float(np.arccos(d ** (-0.25)))


def eff_random_bounds(delta, sigma, assumed=None) -> float:
    """Deterministic scale of the squared misscaled-random-projection efficiency.

    Returns ||M^{-1/2} delta||^2 / tr(M^{-1/2} Sigma M^{-1/2}); the squared
    efficiency of M^{-1/2} r for a uniform unit r concentrates within constant
    factors of this value.  With M = Sigma it reduces to eff_oracle^2 / d.
    """
    delta = _change(delta)
    sigma = np.asarray(sigma, dtype=float)
    M = sigma if assumed is None else np.asarray(assumed, dtype=float)
    if sigma.shape != (delta.size, delta.size) or M.shape != sigma.shape:
        raise DimensionMismatch("delta, sigma, assumed dimensions disagree")
    R = inverse_sqrt(M, "assumed covariance")
    num = float(np.sum((R @ delta) ** 2))
    denom = float(np.trace(R @ sigma @ R))
    if denom <= 0:
        raise DegenerateProjection("trace of the scaled covariance is not positive")
    return num / denom
