"""Command-line front end: scenarios, figure CSVs, verification suites and diagnostics.

Exit codes: 0 success, 1 usage error, 2 numerical-verification failure
(including truncation non-convergence), 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import diagnostics as dg
from . import fragility as fr
from . import scenarios as sc
from .dynamics import DEFAULT_STEP, Trajectory, uniform_grid
from .errors import ImaginaryResidueError, NearPureDivergenceError, TruncationError
from .fileio import load_config, load_matrix
from .linalg import HERMITIAN_ATOL
from .states import as_density
from .verify import SUITES, TOLERANCES

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3
OUTDIR_ENV = "NFRAGILITY_OUTDIR"
UDW_CONVERGENCE_TOL = 1e-8
UDW_MAX_DIM = 256

SCENARIO_NAMES = ("case1", "case2", "fock-env", "udw", "thermal-sweep", "fragility-comparison")
FIELD_DELTAS = (0.1, 0.2, 0.3, 0.4, 0.5)
QUBIT_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _tolerance_help() -> str:
    lines = ["default tolerances (override with verify --tol NAME=VALUE):"]
    lines += [f"  {k:<18s} {v:g}" for k, v in TOLERANCES.items()]
    lines += [
        f"  {'fd_step':<18s} {DEFAULT_STEP:g}   (finite-difference step, onset checks)",
        f"  {'fd_step_pure':<18s} {5e-3:g}   (finite-difference step, pure-state check)",
        f"  {'eigen_floor':<18s} {fr.EIGEN_FLOOR:g}   (f1 divergence floor on eigenvalues)",
        f"  {'imag_tol':<18s} {fr.IMAG_TOL:g}   (allowed imaginary residue of traces)",
        f"  {'hermitian_atol':<18s} {HERMITIAN_ATOL:g}   (Hermiticity / state validation)",
        f"  {'degeneracy_rtol':<18s} {dg.DEGENERACY_RTOL:g}   (eigenvalue grouping for dephasing)",
        f"  {'udw_convergence':<18s} {UDW_CONVERGENCE_TOL:g}   (successive truncation deviation, max dim {UDW_MAX_DIM})",
        "",
        f"figures default output directory: ${OUTDIR_ENV}, else the current directory",
    ]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = _Parser(prog="nfragility", description="n-purity, coherence and n-fragility toolkit.",
                     epilog=_tolerance_help(), formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scenario", help="run a worked scenario and write its CSV",
                       epilog=_tolerance_help(), formatter_class=fmt)
    p.add_argument("name", choices=SCENARIO_NAMES)
    p.add_argument("--config", help="JSON config {scenario, params, grid: {t_max, points}, fock_dim}")
    p.add_argument("--out", help="CSV destination (default: standard output)")

    p = sub.add_parser("diag", help="diagnostics of a state w.r.t. an observable, as one CSV row",
                       epilog=_tolerance_help(), formatter_class=fmt)
    p.add_argument("--state", required=True, help="JSON matrix file {dim, re, im}")
    p.add_argument("--obs", required=True, help="JSON matrix file {dim, re, im}")
    p.add_argument("--n", type=int, default=None, help="also report the n-fragility f_n (n >= 1)")
    p.add_argument("--all", action="store_true", help="also report entropies and f_3, f_4")

    p = sub.add_parser("verify", help="run randomized invariant suites",
                       epilog=_tolerance_help(), formatter_class=fmt)
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None, help="override each suite's default trial count")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a named tolerance; may be repeated")

    p = sub.add_parser("figures", help="write figure-data CSVs (one per plot)",
                       epilog=_tolerance_help(), formatter_class=fmt)
    p.add_argument("--outdir", default=None, help=f"output directory (default ${OUTDIR_ENV} or .)")
    return parser


# --- parameter parsing ----------------------------------------------------------------


def parse_complex(value) -> complex:
    """Accept a number, a ``[re, im]`` pair or a string such as ``"0.3+0.1j"``."""
    if isinstance(value, bool):
        raise ValueError(f"not a complex number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    raise ValueError(f"not a complex number: {value!r}")


def _param(params: dict, key: str, default, conv: Callable):
    try:
        return conv(params.get(key, default))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"parameter {key!r}: {exc}") from exc


def _grid(cfg: dict, t_max: float, points: int = 50) -> np.ndarray:
    g = cfg.get("grid", {})
    return uniform_grid(_param(g, "t_max", t_max, float), _param(g, "points", points, int))


# --- scenarios ------------------------------------------------------------------------


def _scenario_case1(cfg: dict) -> Trajectory:
    pr = cfg["params"]
    p = sc.Case1Params(_param(pr, "r", 0.5, parse_complex), _param(pr, "s", 1.0, parse_complex),
                       _param(pr, "eps", 1.0, float), _param(pr, "b_gap", 1.0, float))
    return sc.case1_numeric(p, _grid(cfg, math.pi / (p.eps * p.b_gap)))


def _scenario_case2(cfg: dict) -> Trajectory:
    pr = cfg["params"]
    eps = _param(pr, "eps", 1.0, float)
    return sc.case2_numeric(_param(pr, "r", 0.5, parse_complex), _param(pr, "s", 0.0, parse_complex),
                            eps, _grid(cfg, 2 * math.pi / eps), _param(pr, "b_gap", 1.0, float))


def _scenario_fock_env(cfg: dict) -> Trajectory:
    pr = cfg["params"]
    eps = _param(pr, "eps", 1.0, float)
    return sc.fock_env_scenario(
        _param(pr, "r", 0.5, parse_complex), _param(pr, "p", 0.2, parse_complex),
        _param(pr, "s", 0.0, parse_complex), eps, _param(cfg, "fock_dim", 8, int),
        _grid(cfg, 2 * math.pi / eps), _param(pr, "b_gap", 1.0, float))


def _udw_params(pr: dict, cfg: dict, alpha=0.3, delta=0.4) -> sc.UdwParams:
    return sc.UdwParams(_param(pr, "alpha", alpha, parse_complex), _param(pr, "delta", delta, float),
                        _param(pr, "nu", 1.0, float), _param(cfg, "fock_dim", 32, int))


def _scenario_udw(cfg: dict) -> Trajectory:
    p = _udw_params(cfg["params"], cfg)
    tol = _param(cfg.get("tolerances", {}), "udw_convergence", UDW_CONVERGENCE_TOL, float)
    traj, report = sc.udw_numeric(p, _grid(cfg, 1.5), tol=tol, max_dim=UDW_MAX_DIM)
    t = traj.times
    traj.series["f2_field_derived"] = np.array([sc.udw_field_fragility_derived(p.delta, x, p.nu) for x in t])
    traj.series["f2_field_reference"] = np.array([sc.udw_field_fragility_exact(p.delta, p.nu * x) for x in t])
    traj.series["f2_qubit_exact"] = np.array([sc.udw_qubit_fragility_exact(p, x) for x in t])
    _note(f"truncation converged at dim {report.final_dim} (bound {report.bound:.3e})")
    return traj


def _scenario_thermal(cfg: dict) -> Trajectory:
    pr = cfg["params"]
    lo, hi = _param(pr, "beta_omega_min", 0.1, float), _param(pr, "beta_omega_max", 10.0, float)
    points = _param(cfg.get("grid", {}), "points", 50, int)
    return sc.thermal_sweep(np.linspace(lo, hi, points), _param(pr, "omega", 1.0, float),
                            _param(pr, "nu", 1.0, float))


def _field_series(delta: float, grid, alpha: complex = 0.0) -> tuple[Trajectory, sc.ConvergenceReport]:
    p = sc.UdwParams(alpha, delta)
    return sc.udw_numeric(p, grid, ["f2_field", "f2_qubit", "variance_field", "variance_qubit"],
                          tol=UDW_CONVERGENCE_TOL, max_dim=UDW_MAX_DIM)


def _scenario_comparison(cfg: dict) -> Trajectory:
    """Field fragility across delta (alpha = 0) and qubit fragility across alpha (delta = 1/2)."""
    grid = _grid(cfg, 1.5)
    series = {}
    for d in FIELD_DELTAS:
        tr, _ = _field_series(d, grid)
        series[f"f2_field_delta{d:g}"] = tr["f2_field"]
    for a in QUBIT_ALPHAS:
        tr, _ = _field_series(0.5, grid, a)
        series[f"f2_qubit_alpha{a:g}"] = tr["f2_qubit"]
    return Trajectory(grid, series)


SCENARIOS: dict[str, Callable[[dict], Trajectory]] = {
    "case1": _scenario_case1,
    "case2": _scenario_case2,
    "fock-env": _scenario_fock_env,
    "udw": _scenario_udw,
    "thermal-sweep": _scenario_thermal,
    "fragility-comparison": _scenario_comparison,
}


# --- figures --------------------------------------------------------------------------


def _panel(series: dict, tag: str, traj: Trajectory, names: Sequence[str]) -> None:
    for n in names:
        series[f"{n}_{tag}"] = traj[n]


def figure_tables() -> dict[str, Trajectory]:
    """All figure CSVs keyed by file name."""
    out = {}
    grid = uniform_grid(1.5, 50)

    s = {}
    for d in FIELD_DELTAS:
        tr, rep = _field_series(d, grid)
        s[f"numeric_delta{d:g}"] = tr["f2_field"]
        s[f"exact_delta{d:g}"] = [sc.udw_field_fragility_derived(d, t) for t in grid]
        s[f"reference_delta{d:g}"] = [sc.udw_field_fragility_exact(d, t) for t in grid]
        s[f"bound_delta{d:g}"] = np.full(grid.size, rep.bound)
    out["fig1_field_fragility.csv"] = Trajectory(grid, s)

    th = _scenario_thermal({"params": {}, "grid": {}})
    th.series["temperature"] = 1.0 / th.times
    out["fig2_thermal.csv"] = th

    grid2 = uniform_grid(2 * math.pi, 50)
    s = {}
    for r, s_amp in ((0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5), (0.0, 0.5)):
        _panel(s, f"r{r:g}_s{s_amp:g}", sc.case2_numeric(r, s_amp, 1.0, grid2),
               ["purity_B", "coherence_B", "variance_B"])
    out["fig3_case2.csv"] = Trajectory(grid2, s)

    s = {}
    for r, p, s_amp in ((0.5, 0.2, 0.0), (1.0, 0.5, 0.0), (0.5, 0.2, 0.5), (1.0, 1.0, 1.0)):
        _panel(s, f"r{r:g}_p{p:g}_s{s_amp:g}", sc.fock_env_scenario(r, p, s_amp, 1.0, 8, grid2),
               ["purity_B", "coherence_B", "variance_B"])
    out["fig4_fock_env.csv"] = Trajectory(grid2, s)

    out["fig5_fragility_comparison.csv"] = _scenario_comparison({"params": {}, "grid": {}})

    s = {}
    for d, a in ((0.4, 0.3), (0.5, 0.5)):
        tr, _ = _field_series(d, grid, a)
        s[f"f2_field_delta{d:g}_alpha{a:g}"] = tr["f2_field"]
        s[f"f2_qubit_delta{d:g}_alpha{a:g}"] = tr["f2_qubit"]
    out["fig6_fragility_both.csv"] = Trajectory(grid, s)

    s = {}
    for d, a in ((0.1, 0.2), (0.3, 0.3), (0.5, 0.3), (0.5, 0.5)):
        tr, _ = _field_series(d, grid, a)
        tag = f"delta{d:g}_alpha{a:g}"
        s[f"ratio_field_{tag}"] = tr["f2_field"] / tr["variance_field"]
        s[f"ratio_qubit_{tag}"] = tr["f2_qubit"] / tr["variance_qubit"]
    out["fig7_fragility_variance_ratio.csv"] = Trajectory(grid, s)
    return out


# --- diag ----------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x + 0.0:.17g}"


def diag_row(rho, obs, n: int | None = None, full: bool = False) -> tuple[list[str], list[str]]:
    rho, b = as_density(rho), dg.as_observable(obs)
    cols = {
        "purity": dg.purity(rho),
        "mixedness": dg.mixedness(rho),
        "coherence": dg.coherence_2norm(rho, b),
        "variance": dg.variance(rho, b),
    }
    orders = [1, 2]
    if full:
        orders += [3, 4]
        cols["entropy"] = dg.von_neumann_entropy(rho)
        cols["renyi2"] = dg.renyi_entropy(rho, 2)
    if n is not None and n not in orders:
        orders.append(n)
    for k in orders:
        try:
            cols[f"f{k}"] = fr.fragility(rho, b, k)
        except NearPureDivergenceError as exc:
            _note(f"f{k} diverges: {exc}")
            cols[f"f{k}"] = math.nan
    return list(cols), [_fmt(v) for v in cols.values()]


# --- entry point ----------------------------------------------------------------------


def _note(msg: str) -> None:
    print(f"nfragility: {msg}", file=sys.stderr)


def _emit(traj: Trajectory, out: str | None) -> None:
    if out is None:
        sys.stdout.write(traj.to_csv())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            traj.to_csv(fh)


def _cmd_scenario(args) -> int:
    cfg = load_config(args.config) if args.config else {"params": {}, "grid": {}}
    named = cfg.get("scenario")
    if named is not None and named != args.name:
        _note(f"config is for scenario {named!r}, running {args.name!r}")
    _emit(SCENARIOS[args.name](cfg), args.out)
    return EXIT_OK


def _cmd_diag(args) -> int:
    if args.n is not None and args.n < 1:
        raise UsageError("--n must be at least 1")
    header, row = diag_row(load_matrix(args.state), load_matrix(args.obs), args.n, args.all)
    sys.stdout.write(",".join(header) + "\n" + ",".join(row) + "\n")
    return EXIT_OK


def _parse_tolerances(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in TOLERANCES:
            raise UsageError(f"--tol expects NAME=VALUE with NAME in {sorted(TOLERANCES)}, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"--tol {name}: {exc}") from exc
    return out


def _cmd_verify(args) -> int:
    tol = _parse_tolerances(args.tol)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        kwargs = {"seed": args.seed, "tolerances": tol}
        if args.trials is not None:
            kwargs["trials"] = args.trials
        for check in SUITES[name](**kwargs):
            print(check.line())
            ok &= check.passed
    print("verification " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_figures(args) -> int:
    outdir = Path(args.outdir or os.environ.get(OUTDIR_ENV) or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for fname, traj in figure_tables().items():
        _emit(traj, str(outdir / fname))
        _note(f"wrote {outdir / fname}")
    return EXIT_OK


COMMANDS = {"scenario": _cmd_scenario, "diag": _cmd_diag, "verify": _cmd_verify, "figures": _cmd_figures}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, ImaginaryResidueError) as exc:
        _note(f"numerical failure: {exc}")
        return EXIT_VERIFY
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        _note(f"error: {exc}")
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
