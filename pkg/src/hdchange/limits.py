"""Monte-Carlo simulation of the null limit laws and their quantile tables.

Bridge-based laws start from a standard Brownian bridge built as cumulative
Gaussian sums centered at the endpoint on an N-point grid.  Supremum-type
functionals additionally draw the exact extremum of each grid cell conditional
on its endpoints (a plain grid maximum is biased low by about 0.58/sqrt(N),
which at N=1000 is well outside the target accuracy of the critical values).
Integral-type functionals are Riemann sums over the interior grid points.

The panel law runs a Wiener process through the time change x^2/(1-x)^2 and
scales by sqrt(2)(1-x)^2; the x=1 endpoint is set to 0, where the scale factor
vanishes.

Paths are simulated in fixed-size blocks whose generators are derived from the
master seed by block index, so results are reproducible bit-for-bit for a given
seed no matter how the blocks are scheduled.
"""

from __future__ import annotations

import enum
import io
import os
from dataclasses import dataclass

import numpy as np

from ._rng import child_rng

__all__ = [
    "LimitLawKind",
    "LimitLaw",
    "QuantileTable",
    "simulate_path",
    "draws",
    "quantile",
    "mc_pvalue",
    "bridge_sup",
    "bridge_int",
    "bridge_abs_int",
    "epidemic_sup",
    "epidemic_int",
    "panel_sup",
    "panel_int",
    "mixture_panel",
    "bridge_squared_sup",
]

BLOCK_SIZE = 8192
DEFAULT_LEVELS = (0.20, 0.10, 0.05, 0.025, 0.01)


def block_size(grid: int) -> int:
    """Paths per simulation block: bounded working set, fixed given the grid."""
    return min(BLOCK_SIZE, max(256, 4_194_304 // grid))


class LimitLawKind(enum.Enum):
    BRIDGE_SUP = "bridge_sup"              # sup w(t)|B(t)|
    BRIDGE_INT = "bridge_int"              # int w^2(t) B^2(t) dt
    BRIDGE_ABS_INT = "bridge_abs_int"      # int w(t)|B(t)| dt
    EPIDEMIC_SUP = "epidemic_sup"          # sup_{x1<x2} |B(x2)-B(x1)|
    EPIDEMIC_INT = "epidemic_int"          # intint_{x1<x2} |B(x2)-B(x1)|
    PANEL_SUP = "panel_sup"                # sup sqrt2 (1-x)^2 W(x^2/(1-x)^2)
    PANEL_INT = "panel_int"                # int of the same process
    MIXTURE_PANEL = "mixture_panel"        # sup [panel + xi (B^2(x)-x(1-x))]
    BRIDGE_SQUARED_SUP = "bridge_squared_sup"  # sup [B^2(x) - x(1-x)]


_WEIGHTED = {LimitLawKind.BRIDGE_SUP, LimitLawKind.BRIDGE_INT,
             LimitLawKind.BRIDGE_ABS_INT}


_SUP_KINDS = {LimitLawKind.BRIDGE_SUP, LimitLawKind.EPIDEMIC_SUP}


@dataclass(frozen=True)
class LimitLaw:
    """A limit-law descriptor plus the default simulation resolution.

    ``refine`` controls the supremum laws only: when True (default) every
    grid cell contributes its exact conditional extremum, so quantiles are
    continuum-accurate at any N; when False the functional is evaluated on
    the bare grid values, which is the exact null law of the corresponding
    discrete statistic computed from T = grid observations.
    """

    kind: LimitLawKind
    beta: float = 0.0   # weight exponent, bridge laws only
    xi: float = 0.0     # mixture weight, MIXTURE_PANEL only
    grid: int = 1000
    reps: int = 100_000
    refine: bool = True

    def __post_init__(self):
        if self.grid < 100:
            raise ValueError("grid must be at least 100")
        if self.reps < 1000:
            raise ValueError("reps must be at least 1000")
        if not 0.0 <= self.beta < 0.5:
            raise ValueError("beta must lie in [0, 1/2)")
        if self.beta != 0.0 and self.kind not in _WEIGHTED:
            raise ValueError(f"{self.kind.value} does not take a weight")
        if self.xi < 0.0:
            raise ValueError("xi must be nonnegative")
        if self.xi != 0.0 and self.kind is not LimitLawKind.MIXTURE_PANEL:
            raise ValueError(f"{self.kind.value} does not take a mixture weight")
        if not self.refine and self.kind not in _SUP_KINDS:
            raise ValueError("refine=False applies to supremum laws only")

    def key(self) -> str:
        """Filesystem-safe identifier of the law (kind plus parameters)."""
        parts = [self.kind.value]
        if self.kind in _WEIGHTED:
            parts.append(f"beta{self.beta:g}")
        if self.kind is LimitLawKind.MIXTURE_PANEL:
            parts.append(f"xi{self.xi:g}")
        if not self.refine:
            parts.append("raw")
        return "_".join(parts)


def bridge_sup(beta: float = 0.0, **kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.BRIDGE_SUP, beta=beta, **kw)


def bridge_int(beta: float = 0.0, **kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.BRIDGE_INT, beta=beta, **kw)


def bridge_abs_int(beta: float = 0.0, **kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.BRIDGE_ABS_INT, beta=beta, **kw)


def epidemic_sup(**kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.EPIDEMIC_SUP, **kw)


def epidemic_int(**kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.EPIDEMIC_INT, **kw)


def panel_sup(**kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.PANEL_SUP, **kw)


def panel_int(**kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.PANEL_INT, **kw)


def mixture_panel(xi: float, **kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.MIXTURE_PANEL, xi=xi, **kw)


def bridge_squared_sup(**kw) -> LimitLaw:
    return LimitLaw(LimitLawKind.BRIDGE_SQUARED_SUP, **kw)


# ---------------------------------------------------------------------------
# path simulation
# ---------------------------------------------------------------------------

def _bridge_paths(rng: np.random.Generator, n: int, N: int) -> np.ndarray:
    """n bridge paths at grid points k/N, k=1..N; the endpoint is exactly 0."""
    z = rng.standard_normal((n, N)) / np.sqrt(N)
    w = np.cumsum(z, axis=1)
    frac = np.arange(1, N + 1) / N
    return w - frac * w[:, -1:]


def _cell_roots(rng, bridge: np.ndarray, N: int):
    """Reflection sampler ingredients for per-cell extrema given endpoints.

    Returns (s, root) with s = B(left) + B(right) and root the exact draw of
    sqrt((a-b)^2 - 2 dt log U); the cell maximum is (s + root)/2 and the cell
    minimum (s - root)/2.  One draw serves both sides: each side's marginal
    law is exact, and only the within-cell joint law (which the across-cell
    extremes never see) is distorted.
    """
    n = bridge.shape[0]
    left = np.concatenate([np.zeros((n, 1)), bridge[:, : N - 1]], axis=1)
    right = bridge
    dt = 1.0 / N
    s = left + right
    gap2 = (left - right) ** 2
    root = np.sqrt(gap2 - 2.0 * dt * np.log(rng.random((n, N))))
    return s, root


def _panel_paths(rng: np.random.Generator, n: int, N: int) -> np.ndarray:
    """n paths of sqrt(2)(1-x)^2 W(x^2/(1-x)^2) at x=k/N, k=1..N-1."""
    x = np.arange(1, N) / N
    s = x**2 / (1.0 - x) ** 2
    ds = np.diff(s, prepend=0.0)
    z = rng.standard_normal((n, N - 1)) * np.sqrt(ds)
    w = np.cumsum(z, axis=1)
    return np.sqrt(2.0) * (1.0 - x) ** 2 * w


def _weights(beta: float, t: np.ndarray) -> np.ndarray:
    if beta == 0.0:
        return np.ones_like(t)
    return (t * (1.0 - t)) ** (-beta)


def _draw_block(law: LimitLaw, rng: np.random.Generator, n: int,
                N: int) -> np.ndarray:
    kind = law.kind
    if kind in (LimitLawKind.PANEL_SUP, LimitLawKind.PANEL_INT,
                LimitLawKind.MIXTURE_PANEL):
        g = _panel_paths(rng, n, N)
        if kind is LimitLawKind.PANEL_SUP:
            return g.max(axis=1)
        if kind is LimitLawKind.PANEL_INT:
            return g.sum(axis=1) / N
        x = np.arange(1, N) / N
        b = _bridge_paths(rng, n, N)[:, : N - 1]
        return (g + law.xi * (b**2 - x * (1.0 - x))).max(axis=1)

    b = _bridge_paths(rng, n, N)
    interior = np.arange(1, N) / N
    if kind is LimitLawKind.BRIDGE_SUP:
        if not law.refine:
            return (_weights(law.beta, interior)
                    * np.abs(b[:, : N - 1])).max(axis=1)
        # sup of |B| per cell: the extremum away from zero, (|s| + root)/2;
        # the opposite side could only win in cells straddling zero, which
        # never carry the supremum at the quantile levels of interest
        s, root = _cell_roots(rng, b, N)
        mid = (np.arange(N) + 0.5) / N
        return (_weights(law.beta, mid) * 0.5 * (np.abs(s) + root)).max(axis=1)
    if kind is LimitLawKind.BRIDGE_INT:
        w2 = _weights(law.beta, interior) ** 2
        return (w2 * b[:, : N - 1] ** 2).sum(axis=1) / N
    if kind is LimitLawKind.BRIDGE_ABS_INT:
        w = _weights(law.beta, interior)
        return (w * np.abs(b[:, : N - 1])).sum(axis=1) / N
    if kind is LimitLawKind.EPIDEMIC_SUP:
        if not law.refine:
            return b.max(axis=1) - b.min(axis=1)
        s, root = _cell_roots(rng, b, N)
        return 0.5 * (s + root).max(axis=1) - 0.5 * (s - root).min(axis=1)
    if kind is LimitLawKind.EPIDEMIC_INT:
        # sum over pairs of |v_i - v_j| via the sorted representation
        s = np.sort(b, axis=1)
        coef = 2.0 * np.arange(1, N + 1) - 1.0 - N
        return (s @ coef) / N**2
    if kind is LimitLawKind.BRIDGE_SQUARED_SUP:
        return (b[:, : N - 1] ** 2 - interior * (1.0 - interior)).max(axis=1)
    raise ValueError(f"unknown law kind {kind!r}")


def simulate_path(law: LimitLaw, rng: np.random.Generator) -> float:
    """One draw of the law's limiting functional using the caller's generator."""
    return float(_draw_block(law, rng, 1, law.grid)[0])


# small in-memory cache of draw arrays keyed by (law, reps, grid, seed)
_DRAWS_CACHE: dict[tuple, np.ndarray] = {}
_DRAWS_CACHE_MAX = 6


def draws(law: LimitLaw, reps: int | None = None, grid: int | None = None,
          seed: int = 0) -> np.ndarray:
    """All Monte-Carlo draws of the functional; deterministic given the seed."""
    reps = law.reps if reps is None else int(reps)
    grid = law.grid if grid is None else int(grid)
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    key = (law.key(), reps, grid, seed)
    cached = _DRAWS_CACHE.get(key)
    if cached is not None:
        return cached
    out = np.empty(reps)
    block = block_size(grid)
    for b in range((reps + block - 1) // block):
        lo = b * block
        n = min(block, reps - lo)
        out[lo:lo + n] = _draw_block(law, child_rng(seed, b), n, grid)
    if len(_DRAWS_CACHE) >= _DRAWS_CACHE_MAX:
        _DRAWS_CACHE.pop(next(iter(_DRAWS_CACHE)))
    _DRAWS_CACHE[key] = out
    return out


def empirical_upper_quantile(values: np.ndarray, alpha: float) -> float:
    """The m-th largest value with m = floor(alpha (n+1)).

    With the (count+1)/(n+1) p-value convention, `statistic > quantile` holds
    exactly when `mc p-value <= alpha`.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    m = min(max(int(np.floor(alpha * (n + 1))), 1), n)
    return float(np.partition(values, n - m)[n - m])


def quantile(law: LimitLaw, alpha: float, reps: int | None = None,
             grid: int | None = None, seed: int = 0,
             cache_dir: str | os.PathLike | None = None) -> float:
    """Empirical upper (1-alpha) critical value of the law.

    When ``cache_dir`` is given, the full level table is persisted there keyed
    by (law, grid, reps, seed) and reused on later calls.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    reps = law.reps if reps is None else int(reps)
    grid = law.grid if grid is None else int(grid)
    if cache_dir is not None:
        table = load_or_build_table(law, reps=reps, grid=grid, seed=seed,
                                    cache_dir=cache_dir, extra_levels=(alpha,))
        return table.lookup(alpha)
    vals = draws(law, reps=reps, grid=grid, seed=seed)
    return empirical_upper_quantile(vals, alpha)


def mc_pvalue(statistic: float, law: LimitLaw, reps: int | None = None,
              grid: int | None = None, seed: int = 0) -> float:
    """Monte-Carlo p-value (count+1)/(reps+1) of draws at or above the statistic."""
    vals = draws(law, reps=reps, grid=grid, seed=seed)
    count = int(np.count_nonzero(vals >= statistic))
    return (count + 1) / (vals.size + 1)


# ---------------------------------------------------------------------------
# persisted quantile tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantileTable:
    """Critical values of one law at several levels, with its provenance."""

    law_key: str
    grid: int
    reps: int
    seed: int
    levels: tuple  # ((alpha, quantile), ...) sorted by alpha

    def lookup(self, alpha: float) -> float | None:
        for a, q in self.levels:
            if abs(a - alpha) < 1e-12:
                return q
        return None

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write(f"# law={self.law_key} grid={self.grid} reps={self.reps} "
                  f"seed={self.seed}\n")
        for a, q in self.levels:
            buf.write(f"{a:.6f},{q!r}\n")  # repr: exact round trip
        return buf.getvalue()

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "QuantileTable":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("# "):
                raise ValueError(f"{path}: missing table header")
            meta = dict(part.split("=", 1) for part in header[2:].split())
            levels = []
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                a, q = line.split(",")
                levels.append((float(a), float(q)))
        return cls(law_key=meta["law"], grid=int(meta["grid"]),
                   reps=int(meta["reps"]), seed=int(meta["seed"]),
                   levels=tuple(levels))


def build_table(law: LimitLaw, reps: int | None = None, grid: int | None = None,
                seed: int = 0, extra_levels: tuple = ()) -> QuantileTable:
    """Compute the default level grid (plus any extras) from one draw set."""
    reps = law.reps if reps is None else int(reps)
    grid = law.grid if grid is None else int(grid)
    vals = draws(law, reps=reps, grid=grid, seed=seed)
    levels = sorted(set(DEFAULT_LEVELS) | {round(a, 10) for a in extra_levels})
    pairs = tuple((a, empirical_upper_quantile(vals, a)) for a in levels)
    return QuantileTable(law.key(), grid, reps, seed, pairs)


def table_path(cache_dir, law: LimitLaw, reps: int, grid: int, seed: int) -> str:
    name = f"{law.key()}_N{grid}_R{reps}_S{seed}.txt"
    return os.path.join(os.fspath(cache_dir), name)


def load_or_build_table(law: LimitLaw, reps: int, grid: int, seed: int,
                        cache_dir, extra_levels: tuple = ()) -> QuantileTable:
    path = table_path(cache_dir, law, reps, grid, seed)
    extra = tuple(extra_levels)
    if os.path.exists(path):
        table = QuantileTable.load(path)
        if all(table.lookup(a) is not None for a in extra):
            return table
        extra = extra + tuple(a for a, _ in table.levels)  # keep earlier levels
    table = build_table(law, reps=reps, grid=grid, seed=seed, extra_levels=extra)
    os.makedirs(os.fspath(cache_dir), exist_ok=True)
    table.save(path)
    return table
