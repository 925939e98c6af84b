"""Line-oriented ``key = value [unit]`` configuration files.

Every file needs ``mode = physical | reduced3 | reduced5``. Lengths accept
``nm``, ``um``, ``m`` or ``lambda`` (multiples of the configured wavelength),
powers ``W`` or ``mW``, and frequencies ``Hz``, ``kHz`` or ``MHz`` (cycles per
second, converted to rad/s); a frequency without a unit is taken in rad/s.
Reduced-mode rates are plain numbers in units of the first mechanical
frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

from ..errors import ConfigError
from ..models import FiveModeParams, ThreeModeParams
from ..params import MECHANICAL_LABELS, PhysicalConfig

MODES = ("physical", "reduced3", "reduced5")

UNITS = {
    "length": {"m": 1.0, "um": 1e-6, "nm": 1e-9, "lambda": None},
    "power": {"W": 1.0, "mW": 1e-3},
    "frequency": {"Hz": 2 * math.pi, "kHz": 2 * math.pi * 1e3, "MHz": 2 * math.pi * 1e6},
}


@dataclass(frozen=True)
class Key:
    name: str
    kind: str  # length | power | frequency | float | complex | str | bool
    required: bool = False
    choices: tuple[str, ...] = ()


def _physical_keys() -> dict[str, Key]:
    kinds = {
        "radius": "length", "wavelength": "length", "separation": "length",
        "x10": "length", "x20": "length", "waist": "length",
        "power1": "power", "power2": "power",
        "detuning": "frequency", "kappa": "frequency",
        "waist_convention": "str",
    }
    keys = {}
    for f in fields(PhysicalConfig):
        kind = kinds.get(f.name, "float")
        choices = ("paraxial", "calibrated") if f.name == "waist_convention" else ()
        keys[f.name] = Key(f.name, kind, False, choices)
    keys["model"] = Key("model", "str", False, ("auto", "three_mode", "five_mode"))
    keys["z_signs"] = Key("z_signs", "str", False, ("mixed", "hamiltonian"))
    return keys


def _reduced3_keys() -> dict[str, Key]:
    keys = {name: Key(name, "float", True) for name in (
        "omega2", "G1", "G2", "Gx", "delta", "kappa", "gamma1", "gamma2", "n_th1", "n_th2")}
    for name in ("omega1", "R1", "R2"):
        keys[name] = Key(name, "float")
    keys["allow_uncoupled"] = Key("allow_uncoupled", "bool")
    return keys


def _reduced5_keys() -> dict[str, Key]:
    keys = {name: Key(name, "float", True) for name in (
        "omega_2x", "omega_1z", "omega_2z", "Gx", "Gz", "delta", "kappa")}
    keys["omega_1x"] = Key("omega_1x", "float")
    for label in MECHANICAL_LABELS:
        keys[f"G_{label}"] = Key(f"G_{label}", "complex", True)
        keys[f"gamma_{label}"] = Key(f"gamma_{label}", "float", True)
        keys[f"n_th_{label}"] = Key(f"n_th_{label}", "float", True)
    keys["allow_uncoupled"] = Key("allow_uncoupled", "bool")
    keys["z_signs"] = Key("z_signs", "str", False, ("mixed", "hamiltonian"))
    return keys


KEYS = {"physical": _physical_keys(), "reduced3": _reduced3_keys(),
        "reduced5": _reduced5_keys()}
OPTION_KEYS = {"model", "z_signs", "allow_uncoupled"}


@dataclass(frozen=True)
class Entry:
    """One ``key = value [unit]`` assignment as written in the file."""

    key: str
    text: str
    unit: str | None
    line: int


@dataclass(frozen=True)
class ParsedConfig:
    """Validated configuration: the parameter object plus run options.

    ``values`` maps each key to its converted value (SI or reduced units) and
    is the source the parameter object is rebuilt from during sweeps.
    """

    mode: str
    params: object
    values: dict
    options: dict


def parse_entries(text: str) -> dict[str, Entry]:
    """Split text into entries, rejecting malformed and duplicate lines."""
    entries: dict[str, Entry] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("parse_error", f"expected 'key = value', got {raw.strip()!r}",
                              line=number)
        key, _, value = (part.strip() for part in line.partition("="))
        if not key or not value or any(ch.isspace() for ch in key):
            raise ConfigError("parse_error", f"malformed assignment {raw.strip()!r}",
                              line=number)
        tokens = value.split()
        if len(tokens) > 2 and not key.startswith("sweep."):
            raise ConfigError("parse_error", f"too many tokens in value {value!r}",
                              line=number, key=key)
        if key in entries:
            first = entries[key].line
            raise ConfigError("duplicate_key",
                              f"key {key!r} assigned on line {first} and line {number}",
                              line=number, key=key)
        if key.startswith("sweep."):
            entries[key] = Entry(key, value, None, number)
        else:
            entries[key] = Entry(key, tokens[0], tokens[1] if len(tokens) == 2 else None,
                                 number)
    return entries


def convert(key: Key, text: str, unit: str | None, line: int | None,
            wavelength: float | None = None):
    """Convert one raw value according to the kind of ``key``."""
    if key.kind == "str":
        if unit is not None:
            raise ConfigError("unit_mismatch", f"{key.name} takes no unit", line, key.name)
        if key.choices and text not in key.choices:
            raise ConfigError("invalid_value",
                              f"{key.name} must be one of {', '.join(key.choices)}", line,
                              key.name)
        return text
    if key.kind == "bool":
        if unit is not None or text.lower() not in ("true", "false"):
            raise ConfigError("invalid_value", f"{key.name} must be true or false", line,
                              key.name)
        return text.lower() == "true"
    if key.kind == "complex":
        if unit is not None:
            raise ConfigError("unit_mismatch", f"{key.name} is dimensionless", line, key.name)
        try:
            return complex(text)
        except ValueError:
            raise ConfigError("invalid_value", f"cannot parse complex number {text!r}", line,
                              key.name) from None
    try:
        number = float(text)
    except ValueError:
        raise ConfigError("invalid_value", f"cannot parse number {text!r}", line,
                          key.name) from None
    if unit is None:
        return number
    table = UNITS.get(key.kind)
    if table is None or unit not in table:
        allowed = ", ".join(table) if table else "none"
        raise ConfigError("unit_mismatch",
                          f"unit {unit!r} not valid for {key.name} (allowed: {allowed})",
                          line, key.name)
    if unit == "lambda":
        return number * wavelength
    return number * table[unit]


def require_mode(entries: dict[str, Entry]) -> str:
    if "mode" not in entries:
        raise ConfigError("missing_mode", "missing mode (physical, reduced3 or reduced5)")
    mode = entries["mode"]
    if mode.text not in MODES or mode.unit is not None:
        raise ConfigError("invalid_value", f"unknown mode {mode.text!r}", mode.line, "mode")
    return mode.text


def convert_entries(entries: dict[str, Entry]) -> tuple[str, dict]:
    """Validate keys and convert values; returns (mode, values)."""
    mode = require_mode(entries)
    table = KEYS[mode]
    for name, entry in entries.items():
        if name != "mode" and name not in table:
            raise ConfigError("unknown_key", f"unknown key {name!r} for mode {mode}",
                              entry.line, name)
    for key in table.values():
        if key.required and key.name not in entries:
            raise ConfigError("missing_key", f"missing required key {key.name!r}",
                              key=key.name)
    wavelength = PhysicalConfig.wavelength
    if "wavelength" in entries:
        e = entries["wavelength"]
        if e.unit == "lambda":
            raise ConfigError("unit_mismatch", "wavelength cannot be given in lambda",
                              e.line, "wavelength")
        wavelength = convert(table["wavelength"], e.text, e.unit, e.line)
    values = {}
    for name, entry in entries.items():
        if name == "mode":
            continue
        values[name] = convert(table[name], entry.text, entry.unit, entry.line, wavelength)
    return mode, values


def build_params(mode: str, values: dict):
    """Construct the parameter object of ``mode`` from converted values."""
    params_values = {k: v for k, v in values.items() if k not in OPTION_KEYS}
    try:
        if mode == "physical":
            return PhysicalConfig(**params_values)
        if mode == "reduced3":
            return ThreeModeParams(**{"omega1": 1.0, **params_values})
        labels = MECHANICAL_LABELS
        return FiveModeParams(
            omega=(params_values.get("omega_1x", 1.0), params_values["omega_2x"],
                   params_values["omega_1z"], params_values["omega_2z"]),
            Gx=params_values["Gx"], Gz=params_values["Gz"],
            couplings=tuple(params_values[f"G_{m}"] for m in labels),
            delta=params_values["delta"], kappa=params_values["kappa"],
            gamma=tuple(params_values[f"gamma_{m}"] for m in labels),
            n_th=tuple(params_values[f"n_th_{m}"] for m in labels))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError("invalid_value", str(exc)) from None


def parse_config(text: str) -> ParsedConfig:
    """Parse, convert and validate a configuration text."""
    entries = parse_entries(text)
    stray = [e for e in entries.values() if e.key.startswith("sweep.")]
    if stray:
        raise ConfigError("unknown_key", "sweep keys are only valid in sweep specs",
                          stray[0].line, stray[0].key)
    mode, values = convert_entries(entries)
    options = {k: v for k, v in values.items() if k in OPTION_KEYS}
    return ParsedConfig(mode, build_params(mode, values), values, options)


def load_config(text: str):
    """Parameter object (PhysicalConfig, ThreeModeParams or FiveModeParams)."""
    return parse_config(text).params


def dump_config(params, options: dict | None = None) -> str:
    """Serialize a parameter object so that ``load_config`` restores it exactly."""
    lines = []
    if isinstance(params, PhysicalConfig):
        lines.append("mode = physical")
        for f in fields(PhysicalConfig):
            value = getattr(params, f.name)
            if value is not None:
                lines.append(f"{f.name} = {value if isinstance(value, str) else repr(value)}")
    elif isinstance(params, ThreeModeParams):
        lines.append("mode = reduced3")
        for f in fields(ThreeModeParams):
            lines.append(f"{f.name} = {getattr(params, f.name)!r}")
    elif isinstance(params, FiveModeParams):
        lines.append("mode = reduced5")
        for label, w in zip(MECHANICAL_LABELS, params.omega):
            lines.append(f"omega_{label} = {w!r}")
        lines += [f"Gx = {params.Gx!r}", f"Gz = {params.Gz!r}",
                  f"delta = {params.delta!r}", f"kappa = {params.kappa!r}"]
        for label, g, gam, n in zip(MECHANICAL_LABELS, params.couplings, params.gamma,
                                    params.n_th):
            lines.append(f"G_{label} = {_complex_text(g)}")
            lines.append(f"gamma_{label} = {gam!r}")
            lines.append(f"n_th_{label} = {n!r}")
    else:
        raise TypeError(f"cannot serialize {type(params).__name__}")
    for key, value in (options or {}).items():
        lines.append(f"{key} = {str(value).lower() if isinstance(value, bool) else value}")
    return "\n".join(lines) + "\n"


def _complex_text(value: complex) -> str:
    return f"{value.real!r}{value.imag:+.17g}j"
