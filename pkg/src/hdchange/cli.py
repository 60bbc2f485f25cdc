"""Command-line interface.

Subcommands: ``test`` (single change-point test on a CSV panel), ``segment``
(binary segmentation), ``critval`` (write a Monte-Carlo quantile table),
``efficiency`` (analytic efficiency report), ``figures`` (run a simulation
study and write its CSVs).

Exit codes: 0 no rejection / success, 2 rejection, 1 error.  Input CSVs hold
the series with rows = time and columns = components (``--transpose`` for the
other orientation), optional header row, comma separator, no missing cells.
The environment variable HDCHANGE_TABLES names the default quantile-table
cache directory; ``--tables`` overrides it.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import efficiency as eff
from . import harness, limits
from ._rng import child_rng
from .errors import ChangePointError
from .projection import inverse_sqrt, random_unit
from .segment import PanelTester, ProjectionTester, binary_segmentation, fuller_transform

TABLES_ENV = "HDCHANGE_TABLES"

LAW_NAMES = {
    "bridge-sup": limits.LimitLawKind.BRIDGE_SUP,
    "bridge-int": limits.LimitLawKind.BRIDGE_INT,
    "bridge-abs-int": limits.LimitLawKind.BRIDGE_ABS_INT,
    "epidemic-sup": limits.LimitLawKind.EPIDEMIC_SUP,
    "epidemic-int": limits.LimitLawKind.EPIDEMIC_INT,
    "panel-sup": limits.LimitLawKind.PANEL_SUP,
    "panel-int": limits.LimitLawKind.PANEL_INT,
    "mixture-panel": limits.LimitLawKind.MIXTURE_PANEL,
    "bridge-squared-sup": limits.LimitLawKind.BRIDGE_SQUARED_SUP,
}


class CliError(Exception):
    pass


def _read_numeric_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        first = fh.readline()
        if not first:
            raise CliError(f"{path}: empty file")
        cells = [c.strip() for c in first.strip().split(",")]
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            pass  # header row; skip it
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = [c.strip() for c in line.split(",")]
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: non-numeric cell") from exc
    if not rows:
        raise CliError(f"{path}: no numeric rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise CliError(f"{path}: ragged rows")
    return np.asarray(rows, dtype=float)


def _load_panel(path, transpose: bool) -> np.ndarray:
    """Internal orientation is d x T; files default to rows = time."""
    arr = _read_numeric_csv(path)
    return arr if transpose else arr.T


def _load_vector(path) -> np.ndarray:
    arr = _read_numeric_csv(path)
    vec = arr.reshape(-1) if 1 in arr.shape or arr.ndim == 1 else None
    if vec is None:
        raise CliError(f"{path}: expected a single-column vector")
    return vec


def _load_matrix(path) -> np.ndarray:
    arr = _read_numeric_csv(path)
    if arr.shape[0] != arr.shape[1]:
        raise CliError(f"{path}: expected a square matrix")
    return arr


def _tables_dir(args):
    if getattr(args, "tables", None):
        return args.tables
    return os.environ.get(TABLES_ENV) or None


def _check(cond, message):
    if not cond:
        raise CliError(message)


def _resolve_direction(args, d: int) -> np.ndarray:
    if args.direction:
        vec = _load_vector(args.direction)
        _check(vec.size == d, f"direction has length {vec.size}, panel has d={d}")
        return vec
    preset = args.preset or "average"
    if preset == "average":
        return np.ones(d)
    if preset == "random":
        return random_unit(d, child_rng(args.seed, 9)).vector
    _check(args.delta is not None, f"preset {preset!r} requires --delta")
    delta = _load_vector(args.delta)
    _check(delta.size == d, f"delta has length {delta.size}, panel has d={d}")
    if preset == "pre-oracle":
        return delta
    if preset == "quasi":
        _check(args.variances is not None, "preset 'quasi' requires --variances")
        var = _load_vector(args.variances)
        _check(var.size == d, "variances length must match the panel")
        _check(np.all(var > 0), "variances must be positive")
        return delta / var
    if preset == "oracle":
        _check(args.sigma is not None, "preset 'oracle' requires --sigma")
        sigma = _load_matrix(args.sigma)
        _check(sigma.shape == (d, d), "sigma dimensions must match the panel")
        return np.linalg.solve(sigma, delta)
    raise CliError(f"unknown preset {preset!r}")


def _build_tester(args, data: np.ndarray):
    d = data.shape[0]
    common = dict(alpha=args.alpha, mc_reps=args.reps, mc_grid=args.grid,
                  seed=args.seed, cache_dir=_tables_dir(args))
    if args.method == "panel":
        spec = args.panel_variances
        if spec in ("naive", "split"):
            variances = spec
        else:
            variances = _load_vector(spec)
            _check(variances.size == d, "panel variances length must match d")
            _check(np.all(variances > 0), "panel variances must be positive")
        return PanelTester(variances=variances, mode=args.mode_panel, **common)
    direction = _resolve_direction(args, d)
    sigma = _load_matrix(args.sigma) if args.sigma else None
    if args.variance_policy == "known":
        _check(sigma is not None, 'variance policy "known" requires --sigma')
    return ProjectionTester(direction=direction, beta=args.beta,
                            mode=args.mode, shape=args.shape,
                            variance=args.variance_policy, sigma=sigma,
                            **common)


def cmd_test(args) -> int:
    _check(0.0 < args.alpha < 1.0, "alpha must lie in (0,1)")
    _check(0.0 <= args.beta < 0.5, "beta must lie in [0, 1/2)")
    _check(args.reps >= 1000, "reps must be at least 1000")
    data = _load_panel(args.input, args.transpose)
    tester = _build_tester(args, data)
    result = tester.test(data)
    T = data.shape[1]
    print(f"statistic={result.statistic:.10g}")
    print(f"critical_value={result.critical_value:.10g}")
    print(f"p_value={result.p_value:.6g}")
    print(f"reject={'true' if result.reject else 'false'}")
    if result.estimated_changepoint is not None:
        k = int(round(result.estimated_changepoint * T))
        print(f"changepoint_fraction={result.estimated_changepoint:.6g}")
        print(f"changepoint_index={k}")
    return 2 if result.reject else 0


def cmd_segment(args) -> int:
    _check(0.0 < args.alpha < 1.0, "alpha must lie in (0,1)")
    _check(args.min_segment >= 5, "min-segment must be at least 5")
    _check(args.reps >= 1000, "reps must be at least 1000")
    data = _load_panel(args.input, args.transpose)
    if args.fuller:
        data = np.stack([fuller_transform(row, args.tau_f) for row in data])
    tester = _build_tester(args, data)
    result = binary_segmentation(data, tester, level=args.alpha,
                                 min_segment=args.min_segment)
    print("location,statistic,p_value")
    for location, statistic, p in result.changes:
        print(f"{location},{statistic:.10g},{p:.6g}")
    return 0


def cmd_critval(args) -> int:
    _check(0.0 < args.alpha < 1.0, "alpha must lie in (0,1)")
    _check(args.reps >= 1000, "reps must be at least 1000")
    _check(args.grid >= 100, "grid must be at least 100")
    kind = LAW_NAMES[args.law]
    law = limits.LimitLaw(kind, beta=args.beta, xi=args.xi,
                          grid=args.grid, reps=args.reps)
    table = limits.build_table(law, reps=args.reps, grid=args.grid,
                               seed=args.seed, extra_levels=(args.alpha,))
    table.save(args.out)
    print(f"law={law.key()} alpha={args.alpha:g} "
          f"quantile={table.lookup(args.alpha):.10g}")
    print(f"wrote {args.out}")
    return 0


def cmd_efficiency(args) -> int:
    delta = _load_vector(args.delta)
    d = delta.size
    if args.sigma:
        sigma = _load_matrix(args.sigma)
        _check(sigma.shape == (d, d), "sigma dimensions must match delta")
        s = phi = None
    else:
        _check(args.structure is not None,
               "need --sigma or --structure with --s/--phi")
        s = _load_vector(args.s) if args.s else np.ones(d)
        _check(s.size == d, "--s length must match delta")
        if args.structure == "independent":
            sigma, phi = np.diag(s**2), None
        elif args.structure == "mixed":
            _check(args.phi is not None, "mixed structure requires --phi")
            phi = _load_vector(args.phi)
            _check(phi.size == d, "--phi length must match delta")
            sigma = np.diag(s**2) + np.outer(phi, phi)
        else:
            raise CliError("rank-one (fully-dependent) covariance has no "
                           "oracle; supply --structure mixed or independent")
    e_oracle = eff.eff_oracle(delta, sigma)
    e1 = None
    if args.direction:
        direction = _load_vector(args.direction)
        _check(direction.size == d, "--direction length must match delta")
        e1 = eff.eff_projection(delta, direction, sigma)
    e2 = eff.eff_panel(delta, np.diag(sigma))
    e3 = a_d = None
    if phi is not None:
        try:
            e3, a_d = eff.eff_panel_misspecified(delta, s, phi)
        except ChangePointError:
            pass  # zero dependence: e3 undefined, e2 applies
    report = eff.EfficiencyReport(e_oracle=e_oracle, e1=e1, e2=e2, e3=e3,
                                  a_d=a_d,
                                  cone_halfangle=eff.detection_cone(d)
                                  if d >= 2 else math.nan)
    for line in report.as_lines():
        print(line)
    return 0


def cmd_figures(args) -> int:
    overrides = {}
    for name in ("d", "T", "reps", "null_reps", "seed", "level"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    paths = harness.write_figure_csvs(args.figure, args.outdir, **overrides)
    for p in paths:
        print(p)
    return 0


def _add_test_options(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="panel CSV (rows = time)")
    p.add_argument("--transpose", action="store_true",
                   help="input rows are components instead of time")
    p.add_argument("--method", choices=("projection", "panel"),
                   default="projection")
    p.add_argument("--direction", help="single-column CSV with the projection")
    p.add_argument("--preset",
                   choices=("average", "pre-oracle", "quasi", "oracle", "random"),
                   help="named projection instead of --direction")
    p.add_argument("--delta", help="change-direction CSV for oracle presets")
    p.add_argument("--variances", help="component-variance CSV (quasi preset)")
    p.add_argument("--sigma", help="covariance CSV (oracle preset / known tau)")
    p.add_argument("--variance-policy", dest="variance_policy",
                   choices=("known", "global", "split"), default="split")
    p.add_argument("--panel-variances", dest="panel_variances", default="split",
                   help='panel variances: "naive", "split", or a CSV path')
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--mode", choices=("max", "sum"), default="max")
    p.add_argument("--shape", choices=("amoc", "epidemic"), default="amoc",
                   help="alternative the projection statistic targets")
    p.add_argument("--mode-panel", dest="mode_panel", choices=("max", "int"),
                   default="max")
    p.add_argument("--reps", type=int, default=20_000,
                   help="Monte-Carlo draws for critical values and p-values")
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tables", help=f"table cache dir (default ${TABLES_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdchange",
        description="Projection and panel change-point tests for "
                    "high-dimensional time series.")
    parser.add_argument("--config",
                        help="key=value file of defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="single change-point test on a CSV panel")
    _add_test_options(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("segment", help="binary segmentation of a CSV panel")
    _add_test_options(p)
    p.add_argument("--min-segment", dest="min_segment", type=int, default=10)
    p.add_argument("--fuller", action="store_true",
                   help="apply the Fuller log-squared-return transform per "
                        "component first")
    p.add_argument("--tau-f", dest="tau_f", type=float, default=0.02)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("critval", help="write a Monte-Carlo quantile table")
    p.add_argument("--law", choices=sorted(LAW_NAMES), required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_critval)

    p = sub.add_parser("efficiency", help="analytic efficiency report")
    p.add_argument("--delta", required=True)
    p.add_argument("--sigma")
    p.add_argument("--structure", choices=("independent", "mixed",
                                           "fully-dependent"))
    p.add_argument("--s", help="idiosyncratic scales CSV")
    p.add_argument("--phi", help="common-factor loadings CSV")
    p.add_argument("--direction", help="projection to evaluate e1 for")
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("figures", help="run a simulation study (figures 1-5)")
    p.add_argument("--figure", type=int, choices=(1, 2, 3, 4, 5), required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--null-reps", dest="null_reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=float)
    p.set_defaults(func=cmd_figures)
    return parser


def _apply_config_file(parser, argv):
    """Load key=value defaults named by --config; explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    defaults = {}
    with open(known.config) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{known.config}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            defaults[key.strip().replace("-", "_")] = value.strip()
    # coerce via each option's declared type where the parser knows it
    for action in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
        for opt in action._actions:  # noqa: SLF001
            if opt.dest in defaults and opt.type is not None:
                defaults[opt.dest] = opt.type(defaults[opt.dest])
        action.set_defaults(**{k: v for k, v in defaults.items()
                               if any(a.dest == k for a in action._actions)})  # noqa: SLF001


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, ChangePointError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
