"""Command-line surface: one subcommand per figure recipe plus the circuit
calculator.  Emits RFC-4180-style CSV (LF line endings, '.' decimals) with
a '#'-prefixed preamble echoing the resolved parameters and code version.

Exit codes: 0 success, 2 config violation, 3 no physical/stable state,
4 I/O failure.
"""

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .circuit import (cancellation_detuning, kerr_simplified,
                      nonlinear_coupling_dim, to_system_couplings)
from .config import ConfigError, RunConfig, load_config
from .errors import KerrmechError, ParameterError
from .spectrum import spectrum_series
from .steady_state import enumerate_states
from .sweep import grid_sweep, hysteresis_trace, optimal_drive, spectrum_map

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_STATE = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrmech",
        description="Steady states, cooling and noise spectra for an "
                    "optomechanical cavity with a position-modulated Kerr "
                    "coupling.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("steady", "table of classical steady states"),
        ("cooling-map", "phonon/photon numbers over a 2-d parameter grid"),
        ("hysteresis", "quasi-static up/down drive sweep"),
        ("spectrum", "position-noise spectrum at one operating point"),
        ("spectrum-map", "spectrum versus an outer parameter"),
        ("optimal-cooling", "drive-optimized phonon number over a coupling grid"),
        ("circuit", "electromechanical Kerr-coupling calculator"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for grid sweeps")
        p.add_argument("--nu-min", type=float, default=None,
                       help="spectrum grid override (config units)")
        p.add_argument("--nu-max", type=float, default=None)
        p.add_argument("--nu-count", type=int, default=None)
    return parser


def _write_csv(path: str, header: list, rows: list, resolved: dict):
    with open(path, "w", newline="") as f:
        f.write(f"# kerrmech {__version__}\n")
        for key in sorted(resolved):
            f.write(f"# {key} = {resolved[key]}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _require_system(cfg: RunConfig):
    if cfg.system is None:
        raise ConfigError("this subcommand needs a [system] section")
    return cfg.system


def _require_axes(cfg: RunConfig, count: int):
    if len(cfg.sweep_axes) < count:
        raise ConfigError(f"this subcommand needs {count} sweep axis/axes")
    return cfg.sweep_axes[:count]


def _nu_grid(cfg: RunConfig, args) -> np.ndarray:
    grid = cfg.nu_grid
    if grid is None:
        raise ConfigError("no spectrum grid available")
    if args.nu_min is None and args.nu_max is None and args.nu_count is None:
        return grid
    unit = (cfg.system.omega_m
            if cfg.resolved.get("system.units") == "ratio" else 1.0)
    lo = args.nu_min * unit if args.nu_min is not None else grid[0]
    hi = args.nu_max * unit if args.nu_max is not None else grid[-1]
    count = args.nu_count if args.nu_count is not None else grid.size
    return np.linspace(lo, hi, count)


def _cmd_steady(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    states = enumerate_states(params)
    if not states:
        return EXIT_NO_STATE
    rows = [[s.n_s, s.q_s, s.alpha_s.real, s.alpha_s.imag, s.G, s.Gamma,
             int(bool(s.stability and s.stability.is_stable)),
             s.stability.max_real if s.stability else ""]
            for s in states]
    _write_csv(out, ["n_s", "q_s", "re_alpha", "im_alpha", "G", "Gamma",
                     "stable", "max_real"], rows, cfg.resolved)
    return EXIT_OK


def _cmd_cooling_map(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    ax1, ax2 = _require_axes(cfg, 2)
    grid = grid_sweep(params, ax1, ax2, threads=args.threads)
    rows = []
    any_stable = False
    for row in grid.points:
        for point in row:
            stable_n = [n for n in point.n_phonon if n is not None]
            best = min(stable_n) if stable_n else None
            if best is not None:
                any_stable = True
                idx = point.n_phonon.index(best)
                photon = point.states[idx].n_s
                valid = int(photon >= 1.0)
            else:
                photon, valid = "", ""
            rows.append([point.coords[ax1.name], point.coords[ax2.name],
                         len(point.states), len(stable_n),
                         best if best is not None else "", photon, valid,
                         int(point.no_stable)])
    if not any_stable:
        return EXIT_NO_STATE
    _write_csv(out, [ax1.name, ax2.name, "n_states", "n_stable", "n_phonon",
                     "n_photon", "model_valid", "no_stable"], rows,
               cfg.resolved)
    return EXIT_OK


def _cmd_hysteresis(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    (axis,) = _require_axes(cfg, 1)
    if axis.name != "E":
        raise ConfigError("hysteresis sweeps the drive: axis1 must be E")
    trace = hysteresis_trace(params, axis.values)
    base = out[:-4] if out.endswith(".csv") else out
    for direction, points, jumps in [("up", trace.up, trace.jumps_up),
                                     ("down", trace.down, trace.jumps_down)]:
        resolved = dict(cfg.resolved)
        resolved["hysteresis.direction"] = direction
        for i, (e_jump, n_from, n_to) in enumerate(jumps):
            resolved[f"hysteresis.jump{i}_E_rad_s"] = e_jump
            resolved[f"hysteresis.jump{i}_n"] = f"{n_from} -> {n_to}"
        rows = []
        for point in points:
            if point.selected is None:
                rows.append([point.coords["E"], "", "", "", len(point.states)])
                continue
            state = point.states[point.selected]
            n_ph = point.n_phonon[point.selected]
            rows.append([point.coords["E"], state.n_s, state.q_s,
                         n_ph if n_ph is not None else "", len(point.states)])
        _write_csv(f"{base}_{direction}.csv",
                   ["E", "n_s", "q_s", "n_phonon", "n_states"], rows, resolved)
    if trace.truncated and not any(p.selected is not None for p in trace.up):
        return EXIT_NO_STATE
    return EXIT_OK


def _cmd_spectrum(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    states = [s for s in enumerate_states(params)
              if s.stability and s.stability.is_stable]
    if not states:
        return EXIT_NO_STATE
    state = states[0]  # smallest photon number among stable states
    series = spectrum_series(_nu_grid(cfg, args), state, params)
    rows = [[p.nu, p.s_total, p.s_thermal, p.s_rp, p.s_abs, p.chi_eff_sq,
             p.omega_eff, p.gamma_eff] for p in series]
    resolved = dict(cfg.resolved)
    resolved["spectrum.state_n_s"] = state.n_s
    _write_csv(out, ["nu", "s_total", "s_thermal", "s_rp", "s_abs",
                     "chi_eff_sq", "omega_eff", "gamma_eff"], rows, resolved)
    return EXIT_OK


def _cmd_spectrum_map(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    (axis,) = _require_axes(cfg, 1)
    result = spectrum_map(params, axis, _nu_grid(cfg, args))
    if np.all(np.isnan(result.s_total)):
        return EXIT_NO_STATE
    rows = []
    for i, outer in enumerate(result.outer_values):
        for j, nu in enumerate(result.nu_grid):
            value = result.s_total[i, j]
            rows.append([outer, nu, value if np.isfinite(value) else ""])
    _write_csv(out, [axis.name, "nu", "s_total"], rows, cfg.resolved)
    base = out[:-4] if out.endswith(".csv") else out
    eig_rows = []
    for i, outer in enumerate(result.outer_values):
        freqs = list(result.dressed[i])
        eig_rows.append([outer, result.selected_n[i]
                         if np.isfinite(result.selected_n[i]) else ""]
                        + freqs)
    width = max(len(r) for r in eig_rows) - 2
    for row in eig_rows:
        row.extend([""] * (width + 2 - len(row)))
    header = [axis.name, "n_s"] + [f"dressed{k+1}" for k in range(width)]
    _write_csv(f"{base}_eigen.csv", header, eig_rows, cfg.resolved)
    return EXIT_OK


def _cmd_optimal_cooling(cfg: RunConfig, args, out: str) -> int:
    params = _require_system(cfg)
    ax1, ax2 = _require_axes(cfg, 2)
    if cfg.e_search is None:
        raise ConfigError("optimal-cooling needs e_search = min, max in [sweep]")
    rows = []
    found_any = False
    for v1 in ax1.values:
        for v2 in ax2.values:
            p = replace(params, **{ax1.name: v1, ax2.name: v2})
            result = optimal_drive(p, cfg.e_search, coarse=cfg.e_coarse)
            if result.found:
                found_any = True
                rows.append([v1, v2, result.E_opt, result.n_min,
                             result.photon_number, int(result.model_valid),
                             int(result.multimodal)])
            else:
                rows.append([v1, v2, "", "", "", "", ""])
    if not found_any:
        return EXIT_NO_STATE
    _write_csv(out, [ax1.name, ax2.name, "E_opt", "n_min", "n_photon",
                     "model_valid", "multimodal"], rows, cfg.resolved)
    return EXIT_OK


def _cmd_circuit(cfg: RunConfig, args, out: str) -> int:
    if cfg.circuit is None:
        raise ConfigError("this subcommand needs a [circuit] section")
    rows = []
    for omega_x in cfg.circuit_omega_x:
        params = replace(cfg.circuit, omega_x=omega_x)
        eta0 = kerr_simplified(0.0, params)
        g_nl_dim = nonlinear_coupling_dim(params)
        g_l, g_nl = to_system_couplings(params, params.G_L_dim, g_nl_dim)
        cancel = cancellation_detuning(params)
        rows.append([omega_x, eta0, g_nl_dim, g_l, g_nl, cancel])
        print(f"omega_x = {omega_x:.6g} rad/s: eta0 = {eta0:.6g} rad/s, "
              f"G_NL = {g_nl_dim:.6g} rad/s/m, g_L = {g_l:.6g} rad/s, "
              f"g_NL = {g_nl:.6g} rad/s, "
              f"cancellation detuning = {cancel:.6g} rad/s")
    _write_csv(out, ["omega_x", "eta0", "G_NL_dim", "g_L", "g_NL",
                     "cancellation_detuning"], rows, cfg.resolved)
    return EXIT_OK


_COMMANDS = {
    "steady": _cmd_steady,
    "cooling-map": _cmd_cooling_map,
    "hysteresis": _cmd_hysteresis,
    "spectrum": _cmd_spectrum,
    "spectrum-map": _cmd_spectrum_map,
    "optimal-cooling": _cmd_optimal_cooling,
    "circuit": _cmd_circuit,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output_path or f"{args.command}.csv"
    try:
        code = _COMMANDS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KerrmechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_STATE
    if code == EXIT_NO_STATE:
        print("no physical/stable steady state for this configuration",
              file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
