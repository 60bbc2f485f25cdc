"""Size and power experiments over the mixed-factor model (paper figures 1-5).

Every experiment draws panels from the mean-change model with the change (when
present) at rescaled time 1/2, evaluates the Max-type statistic of each
configured method, and reports Monte-Carlo rejection rates.  Power experiments
reject against empirically size-corrected critical values: the (1-alpha)
quantile of each method's statistic over matched null replications.  Size
experiments reject against the asymptotic Monte-Carlo critical values, which
is the point of the exercise.

Replications use per-replicate random streams derived from the master seed, so
results are bit-identical across runs and independent of how replications are
scheduled.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import limits
from ._rng import child_rng
from .model import ErrorStructure, IndependentComponents, Mixed
from .projection import random_unit
from .stats import (
    WeightFunction,
    amoc_statistic,
    component_variances,
    cusum_from_series,
    panel_cusum,
    panel_statistic,
    tau,
    tau_hat1,
    tau_hat2,
)

__all__ = [
    "ExperimentConfig",
    "MethodSpec",
    "PowerCurve",
    "default_config",
    "empirical_size_correct",
    "pivot_critical_values",
    "size_experiment",
    "power_vs_angle",
    "power_vs_dimension",
    "power_vs_phi",
    "power_vs_changesize",
    "run_figure",
    "write_figure_csvs",
]

PROJECTION_METHODS = ("oracle", "quasi_oracle", "pre_oracle", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment knobs; figure-specific sweeps have their own fields."""

    d: int = 50
    T: int = 100
    reps: int = 500
    null_reps: int = 1000
    level: float = 0.05
    seed: int = 0
    beta: float = 0.0
    phi: tuple = (0.0, 0.25, 0.5, 1.0)
    angles: tuple = (0.0,)
    dims: tuple = (20, 50, 100)
    change_sizes: tuple = (0.0, 0.04, 0.08, 0.12, 0.16)
    change_norm: float | None = None
    methods: tuple | None = None
    crit_reps: int = 100_000
    crit_grid: int = 1000
    crit_seed: int = 2024

    def __post_init__(self):
        if self.reps < 100 or self.null_reps < 100:
            raise ValueError("reps and null_reps must be at least 100")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0,1)")


@dataclass(frozen=True)
class MethodSpec:
    """Everything needed to evaluate one method's statistic on one panel."""

    name: str
    kind: Literal["projection", "random", "panel"]
    direction: np.ndarray | None = None
    policy: Literal["known", "global", "split"] = "split"
    sigma: np.ndarray | None = None          # known-tau projections
    variances: object = "split"              # panel: d-vector or "naive"/"split"

    def law(self, beta: float) -> limits.LimitLaw:
        if self.kind == "panel":
            return limits.panel_sup()
        return limits.bridge_sup(beta)


@dataclass
class PowerCurve:
    """Per-method rejection rates along one sweep, with provenance."""

    figure: str
    panel: str
    x_name: str
    x_values: np.ndarray
    rates: dict
    mc_se: dict
    reps: int
    seed: int
    size_corrected: bool
    config: dict = field(default_factory=dict)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"# figure={self.figure} panel={self.panel} "
                     f"x={self.x_name} size_corrected={self.size_corrected}\n")
            items = " ".join(f"{k}={v}" for k, v in sorted(self.config.items()))
            if items:
                fh.write(f"# {items}\n")
            fh.write("sweep_value,method,rejection_rate,mc_se,reps,seed\n")
            for j, x in enumerate(self.x_values):
                for name in self.rates:
                    fh.write(f"{x:.10g},{name},{self.rates[name][j]:.6f},"
                             f"{self.mc_se[name][j]:.6f},{self.reps},"
                             f"{self.seed}\n")


# ---------------------------------------------------------------------------
# simulation engine
# ---------------------------------------------------------------------------

def _one_stat(spec: MethodSpec, data: np.ndarray, random_direction, beta: float):
    if spec.kind == "panel":
        if isinstance(spec.variances, str):
            var = component_variances(data, spec.variances)
        else:
            var = spec.variances
        return panel_statistic(panel_cusum(data, var), "max")
    direction = random_direction if spec.kind == "random" else spec.direction
    y = direction @ data
    U = cusum_from_series(y)
    if spec.policy == "known":
        norm = tau(direction, spec.sigma)
    elif spec.policy == "global":
        norm = tau_hat1(y)
    else:
        norm = tau_hat2(y, U)
    return amoc_statistic(U.with_normalizer(norm), WeightFunction(beta), "max")


def _simulate_stats(specs, structure: ErrorStructure, delta, T: int, seed: int,
                    phase: int, sweep_idx: int, n_reps: int,
                    beta: float = 0.0) -> dict:
    """Statistics of every method over n_reps panels; delta=None is the null."""
    g = (np.arange(1, T + 1) / T > 0.5).astype(float)  # change at theta = 1/2
    signal = None if delta is None else np.outer(delta, g)
    need_random = any(s.kind == "random" for s in specs)
    out = {s.name: np.empty(n_reps) for s in specs}
    for rep in range(n_reps):
        rng = child_rng(seed, phase, sweep_idx, rep)
        data = structure.draw(T, rng)
        if signal is not None:
            data = data + signal
        rdir = random_unit(structure.d, rng).vector if need_random else None
        for s in specs:
            out[s.name][rep] = _one_stat(s, data, rdir, beta)
    return out


def empirical_size_correct(spec: MethodSpec, structure: ErrorStructure,
                           config: ExperimentConfig, sweep_idx: int = 0) -> float:
    """Empirical (1-level) null quantile of the method's statistic.

    Uses config.null_reps replications on the same (d, T, structure) with the
    dedicated null phase of the config's seed stream.
    """
    stats = _simulate_stats([spec], structure, None, config.T, config.seed,
                            phase=0, sweep_idx=sweep_idx, n_reps=config.null_reps,
                            beta=config.beta)[spec.name]
    return limits.empirical_upper_quantile(stats, config.level)


_PIVOT_CACHE: dict[tuple, dict] = {}


def pivot_critical_values(T: int, beta: float, level: float,
                          reps: int = 200_000, seed: int = 77) -> dict:
    """Exact finite-T critical values of the studentized projection statistics.

    A projected Gaussian panel is an i.i.d. Gaussian series, so the Max
    statistic with each studentizer (known tau, global tau1, split tau2) is an
    exact pivot: one univariate simulation calibrates every projection method
    at every dependency strength.  Returns {"known": q, "global": q, "split": q}.
    """
    key = (T, beta, level, reps, seed)
    cached = _PIVOT_CACHE.get(key)
    if cached is not None:
        return cached
    frac = np.arange(1, T + 1) / T
    w = WeightFunction(beta)(np.arange(1, T) / T)
    pools = {"known": [], "global": [], "split": []}
    block = max(1, 2_000_000 // T)
    done = 0
    b = 0
    while done < reps:
        n = min(block, reps - done)
        rng = child_rng(seed, 31, b)
        y = rng.standard_normal((n, T))
        cs = np.cumsum(y, axis=1)
        U = (cs - frac * cs[:, -1:]) / np.sqrt(T)
        sup = (w * np.abs(U[:, : T - 1])).max(axis=1)
        pools["known"].append(sup)
        centered = y - y.mean(axis=1, keepdims=True)
        pools["global"].append(sup / np.sqrt((centered**2).mean(axis=1)))
        k = np.argmax(np.abs(U), axis=1) + 1
        rows = np.arange(n)
        cs2 = np.cumsum(centered**2, axis=1)
        csc = np.cumsum(centered, axis=1)
        left_sum, left_sq = csc[rows, k - 1], cs2[rows, k - 1]
        ss_left = left_sq - left_sum**2 / k
        n_right = T - k
        right_sum, right_sq = csc[:, -1] - left_sum, cs2[:, -1] - left_sq
        ss_right = np.where(n_right > 0,
                            right_sq - right_sum**2 / np.maximum(n_right, 1),
                            0.0)
        pools["split"].append(sup / np.sqrt((ss_left + ss_right) / T))
        done += n
        b += 1
    out = {name: limits.empirical_upper_quantile(np.concatenate(parts), level)
           for name, parts in pools.items()}
    if len(_PIVOT_CACHE) > 8:
        _PIVOT_CACHE.clear()
    _PIVOT_CACHE[key] = out
    return out


def _rates_curve(specs, structure, delta, config, sweep_idx, crits) -> dict:
    stats = _simulate_stats(specs, structure, delta, config.T, config.seed,
                            phase=1, sweep_idx=sweep_idx, n_reps=config.reps,
                            beta=config.beta)
    out = {}
    for s in specs:
        rate = float(np.mean(stats[s.name] > crits[s.name]))
        out[s.name] = (rate, math.sqrt(rate * (1.0 - rate) / config.reps))
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _orth_complement(u: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to u (Gram-Schmidt on a basis vector)."""
    d = u.size
    e = np.zeros(d)
    e[0 if abs(u[0]) < 0.9 else 1] = 1.0
    v = e - (e @ u) * u
    return _unit(v)


def _rotated(u: np.ndarray, angle: float) -> np.ndarray:
    """Unit vector at the given angle from u, in the plane span(u, complement)."""
    return math.cos(angle) * u + math.sin(angle) * _orth_complement(u)


def _projection_specs(structure: Mixed, delta_dir: np.ndarray, policy: str,
                      include_random: bool = True) -> list:
    """Oracle / quasi / pre / random specs for a mixed structure."""
    sigma = structure.covariance()
    variances = np.diag(sigma)
    specs = [
        MethodSpec("oracle", "projection",
                   direction=np.linalg.solve(sigma, delta_dir),
                   policy=policy, sigma=sigma),
        MethodSpec("quasi_oracle", "projection",
                   direction=delta_dir / variances, policy=policy, sigma=sigma),
        MethodSpec("pre_oracle", "projection", direction=delta_dir.copy(),
                   policy=policy, sigma=sigma),
    ]
    if include_random:
        specs.append(MethodSpec("random", "random", policy=policy, sigma=sigma))
    return specs


# ---------------------------------------------------------------------------
# experiments (figures 1-5)
# ---------------------------------------------------------------------------

def size_experiment(config: ExperimentConfig) -> list[PowerCurve]:
    """Null rejection rates vs dependency strength phi (figure 1).

    Returns one curve per variance policy (known / tau1-global / tau2-split);
    each contains the projection methods plus the matching panel method.
    Projection statistics reject against their exact finite-T pivotal critical
    values (the studentized projected series is i.i.d. Gaussian whatever the
    dependency, so one univariate simulation calibrates them all); the panel
    rejects against its asymptotic Monte-Carlo critical value, computed under
    the independence assumption the method relies on.  Size distortion of the
    panel as phi grows is exactly what the experiment demonstrates.
    """
    d = config.d
    direction = np.ones(d)  # nominal change direction of the power studies
    proj_crits = pivot_critical_values(config.T, config.beta, config.level,
                                       reps=config.crit_reps,
                                       seed=config.crit_seed)
    panel_crit = limits.quantile(limits.panel_sup(), config.level,
                                 reps=config.crit_reps, grid=config.crit_grid,
                                 seed=config.crit_seed)
    panels = {"known": ("known", "panel_known_var"),
              "tau1": ("global", "panel_est_var"),
              "tau2": ("split", "panel_est_var")}
    curves = []
    for panel_name, (policy, panel_method) in panels.items():
        rates = {}
        ses = {}
        for j, phi in enumerate(config.phi):
            structure = Mixed(np.ones(d), phi * np.ones(d))
            specs = _projection_specs(structure, direction, policy)
            if panel_name == "known":
                specs.append(MethodSpec(panel_method, "panel",
                                        variances=np.diag(structure.covariance())))
            else:
                est = "naive" if panel_name == "tau1" else "split"
                specs.append(MethodSpec(panel_method, "panel", variances=est))
            crits = {s.name: (panel_crit if s.kind == "panel"
                              else proj_crits[policy])
                     for s in specs}
            # sweep indices are disjoint across panels so streams never collide
            got = _rates_curve(specs, structure, None, config,
                               sweep_idx=j + 100 * len(curves), crits=crits)
            for name, (r, se) in got.items():
                rates.setdefault(name, []).append(r)
                ses.setdefault(name, []).append(se)
        curves.append(PowerCurve(
            figure="1", panel=panel_name, x_name="phi",
            x_values=np.asarray(config.phi, dtype=float),
            rates={k: np.asarray(v) for k, v in rates.items()},
            mc_se={k: np.asarray(v) for k, v in ses.items()},
            reps=config.reps, seed=config.seed, size_corrected=False,
            config={"d": d, "T": config.T, "level": config.level,
                    "policy": policy, "projection_calibration": "pivot-exact",
                    "panel_calibration": "asymptotic"},
        ))
    return curves


def _power_sweep(config, structure_for, delta_for, specs_for, figure, panel,
                 x_name, x_values, sweep_offset: int = 0) -> PowerCurve:
    """Shared power-experiment loop: size-correct per sweep point, then reject."""
    rates = {}
    ses = {}
    for j, x in enumerate(x_values):
        structure = structure_for(x)
        specs = specs_for(x, structure)
        null_stats = _simulate_stats(specs, structure, None, config.T,
                                     config.seed, phase=0,
                                     sweep_idx=j + sweep_offset,
                                     n_reps=config.null_reps, beta=config.beta)
        crits = {s.name: limits.empirical_upper_quantile(null_stats[s.name],
                                                         config.level)
                 for s in specs}
        got = _rates_curve(specs, structure, delta_for(x), config,
                           j + sweep_offset, crits)
        for name, (r, se) in got.items():
            rates.setdefault(name, []).append(r)
            ses.setdefault(name, []).append(se)
    return PowerCurve(
        figure=figure, panel=panel, x_name=x_name,
        x_values=np.asarray(x_values, dtype=float),
        rates={k: np.asarray(v) for k, v in rates.items()},
        mc_se={k: np.asarray(v) for k, v in ses.items()},
        reps=config.reps, seed=config.seed, size_corrected=True,
        config={"d": config.d, "T": config.T, "level": config.level},
    )


def power_vs_angle(config: ExperimentConfig) -> list[PowerCurve]:
    """Size-corrected power as the search direction rotates away (figure 2).

    Identity covariance; the change points along 1_d with fixed norm; the
    search projection is the change direction rotated by the sweep angle, with
    random-projection and known-variance panel reference lines.
    """
    d = config.d
    norm = config.change_norm if config.change_norm is not None else 0.1 * math.sqrt(d)
    u = _unit(np.ones(d))
    delta = norm * u
    structure = IndependentComponents(np.ones(d))
    sigma = structure.covariance()

    def specs_for(angle, structure):
        return [
            MethodSpec("search", "projection", direction=_rotated(u, angle),
                       policy="split", sigma=sigma),
            MethodSpec("random", "random", policy="split", sigma=sigma),
            MethodSpec("panel_known_var", "panel", variances=np.ones(d)),
        ]

    curve = _power_sweep(config, lambda a: structure, lambda a: delta,
                         specs_for, "2", "main", "angle", config.angles)
    curve.config["change_norm"] = norm
    return [curve]


def power_vs_dimension(config: ExperimentConfig) -> list[PowerCurve]:
    """Size-corrected power as d grows at fixed ||delta|| and T (figure 3)."""
    norm = config.change_norm if config.change_norm is not None else 0.8

    def structure_for(d):
        return IndependentComponents(np.ones(int(d)))

    def delta_for(d):
        return norm * _unit(np.ones(int(d)))

    def specs_for(d, structure):
        d = int(d)
        sigma = structure.covariance()
        return [
            MethodSpec("oracle", "projection", direction=_unit(np.ones(d)),
                       policy="split", sigma=sigma),
            MethodSpec("random", "random", policy="split", sigma=sigma),
            MethodSpec("panel_known_var", "panel", variances=np.ones(d)),
        ]

    curve = _power_sweep(config, structure_for, delta_for, specs_for,
                         "3", "main", "d", config.dims)
    curve.config["change_norm"] = norm
    return [curve]


def power_vs_phi(config: ExperimentConfig) -> list[PowerCurve]:
    """Size-corrected power vs dependency strength, one panel per angle
    between the change and the common-factor direction (figure 4)."""
    d = config.d
    norm = config.change_norm if config.change_norm is not None else 0.1 * math.sqrt(d)
    u = _unit(np.ones(d))  # direction of the common factor loadings
    curves = []
    for i, angle in enumerate(config.angles):
        delta = norm * _rotated(u, angle)

        def structure_for(phi):
            return Mixed(np.ones(d), phi * np.ones(d))

        def specs_for(phi, structure, _delta=delta):
            specs = _projection_specs(structure, _delta, "split")
            specs.append(MethodSpec("panel_known_var", "panel",
                                    variances=np.diag(structure.covariance())))
            specs.append(MethodSpec("panel_est_var", "panel", variances="split"))
            return specs

        curve = _power_sweep(config, structure_for, lambda phi, _d=delta: _d,
                             specs_for, "4", f"angle{i}", "phi", config.phi,
                             sweep_offset=100 * i)
        curve.config.update(angle=float(angle), change_norm=norm)
        curves.append(curve)
    return curves


def power_vs_changesize(config: ExperimentConfig) -> list[PowerCurve]:
    """Size-corrected power vs change size under heterogeneous variances,
    one panel per dependency strength phi (figure 5).

    Component scales are s_i = 0.5 + i/d; the change direction sits at the
    configured angle (default pi/4) to the common-factor direction; the x-axis
    value c means ||delta|| = c sqrt(d).
    """
    d = config.d
    s = 0.5 + np.arange(1, d + 1) / d
    angle = config.angles[0] if config.angles else math.pi / 4
    u = _unit(np.ones(d))
    delta_dir = _rotated(u, angle)
    curves = []
    for i, phi in enumerate(config.phi):
        structure = Mixed(s, phi * np.ones(d))

        def specs_for(c, structure_, _dir=delta_dir):
            sigma = structure_.covariance()
            variances = np.diag(sigma)
            return [
                MethodSpec("quasi_oracle", "projection",
                           direction=_dir / variances, policy="split",
                           sigma=sigma),
                MethodSpec("pre_oracle", "projection", direction=_dir.copy(),
                           policy="split", sigma=sigma),
                MethodSpec("random", "random", policy="split", sigma=sigma),
            ]

        curve = _power_sweep(
            config, lambda c, _s=structure: _s,
            lambda c, _dir=delta_dir: (c * math.sqrt(d)) * _dir,
            specs_for, "5", f"phi{phi:g}", "change_size", config.change_sizes,
            sweep_offset=100 * i)
        curve.config.update(phi=float(phi), angle=float(angle))
        curves.append(curve)
    return curves


# ---------------------------------------------------------------------------
# figure driver
# ---------------------------------------------------------------------------

FIGURE_DEFAULTS = {
    1: dict(d=50, T=100, reps=1000, null_reps=1000, seed=101,
            phi=(0.0, 0.25, 0.5, 1.0)),
    2: dict(d=50, T=100, reps=500, null_reps=1000, seed=202,
            angles=(0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8,
                    math.pi / 2)),
    3: dict(d=50, T=100, reps=500, null_reps=1000, seed=303,
            dims=(20, 50, 100), change_norm=0.8),
    4: dict(d=50, T=100, reps=500, null_reps=1000, seed=404,
            angles=(0.0, math.pi / 8, math.pi / 4, math.pi / 2),
            phi=(0.0, 0.25, 0.5, 1.0)),
    5: dict(d=50, T=100, reps=500, null_reps=1000, seed=505,
            phi=(0.0, 0.5, 1.0), angles=(math.pi / 4,),
            change_sizes=(0.0, 0.04, 0.08, 0.12, 0.16)),
}

_EXPERIMENTS = {
    1: size_experiment,
    2: power_vs_angle,
    3: power_vs_dimension,
    4: power_vs_phi,
    5: power_vs_changesize,
}


def default_config(figure: int, **overrides) -> ExperimentConfig:
    if figure not in FIGURE_DEFAULTS:
        raise ValueError("figure must be one of 1..5")
    params = dict(FIGURE_DEFAULTS[figure])
    params.update(overrides)
    return ExperimentConfig(**params)


def run_figure(figure: int, config: ExperimentConfig | None = None,
               **overrides) -> list[PowerCurve]:
    if config is None:
        config = default_config(figure, **overrides)
    return _EXPERIMENTS[figure](config)


def write_figure_csvs(figure: int, outdir, config: ExperimentConfig | None = None,
                      **overrides) -> list[str]:
    """Run one figure's experiment and write one CSV per panel; returns paths."""
    curves = run_figure(figure, config, **overrides)
    os.makedirs(os.fspath(outdir), exist_ok=True)
    paths = []
    for curve in curves:
        path = os.path.join(os.fspath(outdir),
                            f"figure{curve.figure}_{curve.panel}.csv")
        curve.to_csv(path)
        paths.append(path)
    return paths
