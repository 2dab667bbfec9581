"""Flat key-value run configuration (INI) and unit resolution.

Two unit conventions, exactly one per file (``units`` in ``[system]``):

* ``ratio``: ``omega_m`` and ``kappa0`` are ordinary frequencies in Hz
  (multiplied by 2*pi on ingestion); ``gamma_m``, ``g_L``, ``g_NL`` and
  ``kappa_L`` are in units of kappa0; ``Delta`` and ``E`` in units of
  omega_m.  This matches the figure-caption conventions.
* ``absolute``: every rate is an angular frequency in rad/s.

Circuit keys follow their own auditable rule: a key suffixed ``_over_2pi``
is multiplied by 2*pi, a bare key is taken as already angular unless
``assume_bare_angular = false``.
"""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitParams
from .errors import KerrmechError
from .model import SystemParams
from .sweep import SweepAxis

__all__ = ["ConfigError", "RunConfig", "load_config"]

TWO_PI = 2.0 * np.pi

_KAPPA_SCALED = ("gamma_m", "g_L", "g_NL", "kappa_L")
_OMEGA_SCALED = ("Delta", "E")


class ConfigError(KerrmechError, ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    system: SystemParams | None
    sweep_axes: list
    nu_grid: np.ndarray | None
    circuit: CircuitParams | None
    circuit_omega_x: list
    output_path: str | None
    e_search: tuple | None = None   # drive range for optimal-cooling maps
    e_coarse: int = 64
    resolved: dict = field(default_factory=dict)  # echoed into CSV preambles


def _getfloat(section, key, default=None):
    raw = section.get(key, None)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _parse_system(section) -> tuple[SystemParams, dict]:
    units = section.get("units", "").strip().lower()
    if units not in ("ratio", "absolute"):
        raise ConfigError("[system] units must be 'ratio' or 'absolute'")
    if units == "ratio":
        omega_m = TWO_PI * _getfloat(section, "omega_m")
        kappa0 = TWO_PI * _getfloat(section, "kappa0")
        values = dict(
            omega_m=omega_m,
            kappa0=kappa0,
            gamma_m=kappa0 * _getfloat(section, "gamma_m", 0.0),
            g_L=kappa0 * _getfloat(section, "g_L", 0.0),
            g_NL=kappa0 * _getfloat(section, "g_NL", 0.0),
            kappa_L=kappa0 * _getfloat(section, "kappa_L", 0.0),
            delta=omega_m * _getfloat(section, "Delta", 0.0),
            E=omega_m * _getfloat(section, "E", 0.0),
            n0=_getfloat(section, "n0", 0.0),
        )
    else:
        values = dict(
            omega_m=_getfloat(section, "omega_m"),
            kappa0=_getfloat(section, "kappa0"),
            gamma_m=_getfloat(section, "gamma_m", 0.0),
            g_L=_getfloat(section, "g_L", 0.0),
            g_NL=_getfloat(section, "g_NL", 0.0),
            kappa_L=_getfloat(section, "kappa_L", 0.0),
            delta=_getfloat(section, "Delta", 0.0),
            E=_getfloat(section, "E", 0.0),
            n0=_getfloat(section, "n0", 0.0),
        )
    params = SystemParams(**values)
    resolved = {f"system.{k}_rad_s" if k != "n0" else "system.n0": v
                for k, v in values.items()}
    resolved["system.units"] = units
    return params, resolved


def _axis_scale(name: str, units: str, params: SystemParams) -> float:
    if units == "absolute":
        return 1.0
    if name in _KAPPA_SCALED:
        return params.kappa0
    if name in _OMEGA_SCALED:
        return params.omega_m
    if name in ("omega_m", "kappa0"):
        return TWO_PI
    return 1.0  # n0


def _parse_axis(raw: str, units: str, params: SystemParams) -> SweepAxis:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) not in (4, 5):
        raise ConfigError(f"axis spec {raw!r}: expected "
                          "'name, min, max, count[, linear|log]'")
    name = parts[0]
    if name == "Delta":
        name_attr = "delta"
    else:
        name_attr = name
    try:
        lo, hi = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError as exc:
        raise ConfigError(f"axis spec {raw!r}: {exc}") from exc
    if count < 1:
        raise ConfigError(f"axis spec {raw!r}: count must be >= 1")
    scale = parts[4] if len(parts) == 5 else "linear"
    unit = _axis_scale(name, units, params)
    try:
        return SweepAxis.from_range(name_attr, lo * unit, hi * unit, count,
                                    scale)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_circuit(section) -> tuple[CircuitParams, list]:
    bare_angular = section.get("assume_bare_angular", "true").strip().lower()
    if bare_angular not in ("true", "false"):
        raise ConfigError("assume_bare_angular must be true or false")
    bare_factor = 1.0 if bare_angular == "true" else TWO_PI

    def freq(name, default=None):
        if f"{name}_over_2pi" in section and name in section:
            raise ConfigError(f"give either {name} or {name}_over_2pi, not both")
        if f"{name}_over_2pi" in section:
            return TWO_PI * _getfloat(section, f"{name}_over_2pi")
        return bare_factor * _getfloat(section, name, default)

    omega_x_raw = section.get("omega_x_over_2pi", section.get("omega_x", None))
    if omega_x_raw is None:
        raise ConfigError("missing omega_x (or omega_x_over_2pi)")
    factor = TWO_PI if "omega_x_over_2pi" in section else bare_factor
    try:
        omega_x_values = [factor * float(v) for v in omega_x_raw.split(",")]
    except ValueError as exc:
        raise ConfigError(f"omega_x list: {exc}") from exc

    params = CircuitParams(
        g=freq("g"),
        gamma=freq("gamma"),
        omega_C=freq("Omega_C"),
        omega_c0=freq("omega_c"),
        omega_x=omega_x_values[0],
        G_L_dim=freq("G_L"),
        C0=_getfloat(section, "C0"),
        d0=_getfloat(section, "d0"),
        C_sigma1=_getfloat(section, "C_sigma1"),
        C_sigma2=_getfloat(section, "C_sigma2"),
        x_zp=_getfloat(section, "x_zp"),
        couple_cavity_position=(section.get("couple_cavity_position", "true")
                                .strip().lower() == "true"),
        j_scale=_getfloat(section, "j_scale", 1.0),
    )
    return params, omega_x_values


def load_config(path: str) -> RunConfig:
    """Parse and resolve a run configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case-sensitive (Delta, Omega_C, ...)
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")

    system = None
    resolved: dict = {}
    units = "absolute"
    if parser.has_section("system"):
        system, resolved = _parse_system(parser["system"])
        units = resolved["system.units"]

    axes = []
    e_search = None
    e_coarse = 64
    if parser.has_section("sweep"):
        if system is None:
            raise ConfigError("[sweep] requires a [system] section")
        for key in ("axis1", "axis2"):
            if key in parser["sweep"]:
                axes.append(_parse_axis(parser["sweep"][key], units, system))
        for axis in axes:
            resolved[f"sweep.{axis.name}"] = (f"{axis.values[0]}..{axis.values[-1]}"
                                              f" ({axis.values.size})")
        if "e_search" in parser["sweep"]:
            parts = [p.strip() for p in parser["sweep"]["e_search"].split(",")]
            if len(parts) != 2:
                raise ConfigError("e_search expects 'min, max'")
            unit = system.omega_m if units == "ratio" else 1.0
            try:
                e_search = (float(parts[0]) * unit, float(parts[1]) * unit)
            except ValueError as exc:
                raise ConfigError(f"e_search: {exc}") from exc
            resolved["sweep.e_search_rad_s"] = f"{e_search[0]}..{e_search[1]}"
        if "e_coarse" in parser["sweep"]:
            e_coarse = int(_getfloat(parser["sweep"], "e_coarse"))

    nu_grid = None
    if parser.has_section("spectrum"):
        if system is None:
            raise ConfigError("[spectrum] requires a [system] section")
        sec = parser["spectrum"]
        unit = system.omega_m if units == "ratio" else 1.0
        lo = _getfloat(sec, "nu_min", 0.2 if units == "ratio" else None)
        hi = _getfloat(sec, "nu_max", 1.8 if units == "ratio" else None)
        count = int(_getfloat(sec, "nu_count", 2001))
        nu_grid = np.linspace(lo * unit, hi * unit, count)
        resolved["spectrum.nu_grid_rad_s"] = f"{lo * unit}..{hi * unit} ({count})"
    elif system is not None:
        nu_grid = np.linspace(0.2 * system.omega_m, 1.8 * system.omega_m, 2001)

    circuit = None
    omega_x_values: list = []
    if parser.has_section("circuit"):
        circuit, omega_x_values = _parse_circuit(parser["circuit"])
        for name in ("g", "gamma", "omega_C", "omega_c0", "G_L_dim", "C0",
                     "d0", "C_sigma1", "C_sigma2", "x_zp", "j_scale"):
            resolved[f"circuit.{name}"] = getattr(circuit, name)
        resolved["circuit.omega_x_rad_s"] = ",".join(str(v) for v in omega_x_values)

    output_path = None
    if parser.has_section("output"):
        output_path = parser["output"].get("path", None)

    return RunConfig(system=system, sweep_axes=axes, nu_grid=nu_grid,
                     circuit=circuit, circuit_omega_x=omega_x_values,
                     output_path=output_path, e_search=e_search,
                     e_coarse=e_coarse, resolved=resolved)
