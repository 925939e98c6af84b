"""Parameter grids evaluated through params, models, steady and darkmode.

A sweep spec is a configuration file with extra ``sweep.*`` keys::

    sweep.model = three_mode          # three_mode | five_mode | force_scan
    sweep.axis1 = delta 0.5 1.5 101   # key start stop count [unit]
    sweep.axis2 = ...                 # optional second axis
    sweep.output = results.csv        # optional

All other keys form the fixed block and follow the configuration rules.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..darkmode import dark_mode_measure, five_mode_transform, three_mode_transform
from ..errors import ConfigError
from ..models import (at_cavity_nodes, build_five_mode, build_three_mode,
                      five_mode_from_physical, three_mode_from_physical)
from ..optics import binding_force_exact, binding_force_farfield
from ..params import derive_couplings, derive_particle, derive_tweezer
from ..steady import steady_state
from .config import (KEYS, Entry, build_params, convert, convert_entries, parse_config,
                     parse_entries, require_mode)

MODEL_CLASSES = ("three_mode", "five_mode", "force_scan")
COOLING_COLUMNS = ("n_1x", "n_2x", "n_1z", "n_2z", "stable", "margin",
                   "dark_residual_x", "dark_residual_z", "error")
FORCE_COLUMNS = ("kR0", "Fx_exact", "Fx_far", "Fz_exact", "Fz_far", "error")
PHONON_COLUMNS = {"1x": "n_1x", "2x": "n_2x", "1z": "n_1z", "2z": "n_2z"}


@dataclass(frozen=True)
class Axis:
    """Linear grid over one configuration key, in the units it was written in."""

    key: str
    start: float
    stop: float
    count: int
    unit: str | None = None

    @property
    def label(self) -> str:
        return self.key if self.unit is None else f"{self.key}[{self.unit}]"

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    model: str
    axes: tuple[Axis, ...]
    mode: str
    fixed: dict
    output: str | None = None

    def __post_init__(self):
        if self.model not in MODEL_CLASSES:
            raise ConfigError("invalid_value", f"sweep.model must be one of {MODEL_CLASSES}")
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("invalid_value", "a sweep needs one or two axes")
        if len({a.key for a in self.axes}) != len(self.axes):
            raise ConfigError("invalid_value", "sweep axes must reference distinct keys")
        for axis in self.axes:
            if axis.count < 2:
                raise ConfigError("invalid_value", f"axis {axis.key} needs count >= 2")
        allowed = {"three_mode": ("reduced3", "physical"),
                   "five_mode": ("reduced5", "physical"),
                   "force_scan": ("physical",)}[self.model]
        if self.mode not in allowed:
            raise ConfigError("invalid_value",
                              f"model {self.model} cannot run with mode {self.mode}")

    @property
    def columns(self) -> tuple[str, ...]:
        outputs = FORCE_COLUMNS if self.model == "force_scan" else COOLING_COLUMNS
        return tuple(a.label for a in self.axes) + outputs

    def grid(self) -> list[tuple[float, ...]]:
        """Grid points in row-major order (last axis fastest)."""
        if len(self.axes) == 1:
            return [(float(v),) for v in self.axes[0].values()]
        first, second = self.axes
        return [(float(u), float(v)) for u in first.values() for v in second.values()]


@dataclass(frozen=True)
class RunRecord:
    """Result of one grid point.

    ``axes`` holds the axis values as written, ``inputs`` the full converted
    parameter set and ``outputs`` the schema columns. ``wall_time`` is kept out
    of the CSV so that outputs stay byte-identical between runs.
    """

    axes: tuple[tuple[str, float], ...]
    inputs: dict
    outputs: dict
    wall_time: float = field(compare=False, default=0.0)

    @property
    def stable(self) -> bool:
        return bool(self.outputs.get("stable"))


def parse_sweep(text: str) -> SweepSpec:
    """Parse a sweep spec file."""
    entries = parse_entries(text)
    sweep = {k: e for k, e in entries.items() if k.startswith("sweep.")}
    base = {k: e for k, e in entries.items() if not k.startswith("sweep.")}
    known = {"sweep.model", "sweep.axis1", "sweep.axis2", "sweep.output"}
    for key, entry in sweep.items():
        if key not in known:
            raise ConfigError("unknown_key", f"unknown sweep key {key!r}", entry.line, key)
    if "sweep.model" not in sweep:
        raise ConfigError("missing_key", "missing required key 'sweep.model'",
                          key="sweep.model")
    if "sweep.axis1" not in sweep:
        raise ConfigError("missing_key", "missing required key 'sweep.axis1'",
                          key="sweep.axis1")
    mode, fixed = convert_entries_lenient(base)
    axes = []
    for name in ("sweep.axis1", "sweep.axis2"):
        if name not in sweep:
            continue
        entry = sweep[name]
        tokens = entry.text.split()
        if len(tokens) not in (4, 5):
            raise ConfigError("parse_error",
                              f"{name} expects 'key start stop count [unit]'", entry.line, name)
        key = tokens[0]
        table = KEYS[mode]
        if key not in table or table[key].kind not in ("float", "length", "power",
                                                       "frequency"):
            raise ConfigError("invalid_value", f"cannot sweep key {key!r} in mode {mode}",
                              entry.line, name)
        try:
            start, stop = float(tokens[1]), float(tokens[2])
            count = int(tokens[3])
        except ValueError:
            raise ConfigError("parse_error", f"bad numbers in {name}", entry.line,
                              name) from None
        unit = tokens[4] if len(tokens) == 5 else None
        convert(table[key], tokens[1], unit, entry.line, 1.0)  # validates the unit
        axes.append(Axis(key, start, stop, count, unit))
    model = sweep["sweep.model"].text
    output = sweep["sweep.output"].text if "sweep.output" in sweep else None
    spec = SweepSpec(model, tuple(axes), mode, fixed, output)
    # the fixed block with the first grid point must form a valid parameter set
    _point_values(spec, spec.grid()[0])
    return spec


def convert_entries_lenient(entries: dict[str, Entry]) -> tuple[str, dict]:
    """Convert the fixed block; required keys may be supplied by the axes."""
    mode = require_mode(entries)
    relaxed = dict(entries)
    # placeholders for required keys, replaced by axis values before use
    missing = [k.name for k in KEYS[mode].values() if k.required and k.name not in entries]
    for name in missing:
        relaxed[name] = Entry(name, "0", None, 0)
    mode, values = convert_entries(relaxed)
    for name in missing:
        del values[name]
    return mode, values


def _point_values(spec: SweepSpec, point: tuple[float, ...]) -> dict:
    values = dict(spec.fixed)
    table = KEYS[spec.mode]
    wavelength = values.get("wavelength", 1064e-9)
    for axis, value in zip(spec.axes, point):
        values[axis.key] = convert(table[axis.key], repr(value), axis.unit, None, wavelength)
    missing = [k.name for k in table.values() if k.required and k.name not in values]
    if missing:
        raise ConfigError("missing_key", f"missing required key {missing[0]!r}",
                          key=missing[0])
    return values


def _blank_cooling(error: str | None = None) -> dict:
    out = {c: None for c in COOLING_COLUMNS}
    out["error"] = error
    return out


def evaluate_cooling(mode: str, values: dict, model_class: str) -> dict:
    """Steady-state outputs for one converted parameter set."""
    options = {k: values[k] for k in ("model", "z_signs", "allow_uncoupled") if k in values}
    params = build_params(mode, values)
    z_signs = options.get("z_signs", "mixed")
    allow = options.get("allow_uncoupled", False)
    if mode == "physical":
        derived = derive_couplings(params)
        choice = options.get("model", "auto")
        if model_class == "three_mode" or (choice == "three_mode") or (
                choice == "auto" and model_class != "five_mode" and at_cavity_nodes(derived)):
            params = three_mode_from_physical(derived)
        else:
            params = five_mode_from_physical(derived)
    if hasattr(params, "G1"):
        model = build_three_mode(params, allow_uncoupled=allow)
        transform = (three_mode_transform(params.G1, params.G2)
                     if params.G1 or params.G2 else None)
    else:
        model = build_five_mode(params, allow_uncoupled=allow, z_signs=z_signs)
        transform = five_mode_transform(params)
    result = steady_state(model)
    out = _blank_cooling()
    out["stable"] = result.stable
    out["margin"] = result.margin
    if result.phonons is not None:
        for label, value in result.phonons.items():
            out[PHONON_COLUMNS[label]] = float(value)
    if transform is not None:
        for sector, value in dark_mode_measure(model, transform).items():
            out[f"dark_residual_{sector}"] = value
    return out


def evaluate_force(values: dict) -> dict:
    """Exact and far-field binding forces at the configured separation."""
    config = build_params("physical", values)
    _, alpha = derive_particle(config)
    e1 = derive_tweezer(config, 1).eps_tw
    e2 = derive_tweezer(config, 2).eps_tw
    k_tw = 2 * math.pi / config.wavelength
    exact = binding_force_exact(e1, e2, config.separation, k_tw, alpha)
    far = binding_force_farfield(e1, e2, config.separation, k_tw, alpha)
    return {"kR0": k_tw * config.separation, "Fx_exact": exact.fx, "Fx_far": far.fx,
            "Fz_exact": exact.fz, "Fz_far": far.fz, "error": None}


def evaluate_point(spec: SweepSpec, point: tuple[float, ...]) -> RunRecord:
    """Evaluate one grid point; failures are recorded in the ``error`` column."""
    started = time.perf_counter()
    axes = tuple((a.label, v) for a, v in zip(spec.axes, point))
    values: dict = {}
    try:
        values = _point_values(spec, point)
        if spec.model == "force_scan":
            outputs = evaluate_force(values)
        else:
            outputs = evaluate_cooling(spec.mode, values, spec.model)
    except Exception as exc:  # recorded in-row, never aborts a sweep
        if spec.model == "force_scan":
            outputs = {c: None for c in FORCE_COLUMNS}
            outputs["error"] = f"{type(exc).__name__}: {exc}"
        else:
            outputs = _blank_cooling(f"{type(exc).__name__}: {exc}")
    return RunRecord(axes, values, outputs, time.perf_counter() - started)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[RunRecord]:
    """Evaluate every grid point; records come back in grid order."""
    points = spec.grid()
    if workers <= 1:
        return [evaluate_point(spec, p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: evaluate_point(spec, p), points))


def run_single(text: str) -> RunRecord:
    """Evaluate a plain configuration as a grid of one point."""
    parsed = parse_config(text)
    model = "three_mode" if parsed.mode == "reduced3" else "five_mode"
    if parsed.mode == "physical":
        choice = parsed.options.get("model", "auto")
        model = "three_mode" if choice == "three_mode" else (
            "five_mode" if choice == "five_mode" else "auto")
    started = time.perf_counter()
    try:
        outputs = evaluate_cooling(parsed.mode, parsed.values,
                                   model if model != "auto" else "")
    except Exception as exc:  # recorded in-row, never aborts a sweep
        outputs = _blank_cooling(f"{type(exc).__name__}: {exc}")
    return RunRecord((), parsed.values, outputs, time.perf_counter() - started)
