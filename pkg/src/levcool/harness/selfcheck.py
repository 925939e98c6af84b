"""Fast invariant checks behind ``levcool check``."""
from __future__ import annotations

import math

import numpy as np

from ..darkmode import dark_mode_measure, hybridize_two_mode, three_mode_transform
from ..models import build_three_mode
from ..optics import binding_force_exact
from ..params import reduced_three_mode
from ..steady import evolve_covariance, lyapunov_residual, solve_lyapunov, steady_state
from .config import dump_config, load_config
from .sweep import SweepSpec, Axis, run_sweep
from .output import format_csv

COOLING_SET = dict(omega2=0.75, G1=0.22, G2=-0.19, Gx=-0.046, delta=1.0, kappa=0.2,
                   gamma1=0.5e-8, gamma2=0.5e-8, n_th1=1e5, n_th2=1e5)


def _check_lyapunov():
    params = reduced_three_mode(**{**COOLING_SET, "gamma1": 1e-3, "gamma2": 1e-3,
                                   "n_th1": 10.0, "n_th2": 10.0})
    model = build_three_mode(params)
    cov = solve_lyapunov(model.drift, model.noise)
    residual = lyapunov_residual(model.drift, model.noise, cov)
    ok = residual <= 1e-10
    return ok, f"relative residual {residual:.2e}"


def _check_ode_agreement():
    rng = np.random.default_rng(7)
    n = 4
    drift = rng.normal(size=(n, n))
    drift -= (np.max(np.linalg.eigvals(drift).real) + 1.0) * np.eye(n)
    noise = np.diag(rng.uniform(0.5, 2.0, n))
    direct = solve_lyapunov(drift, noise)
    dt = 0.05 / np.linalg.norm(drift)
    integrated = evolve_covariance(drift, noise, np.zeros((n, n)), 40.0, dt)
    err = np.linalg.norm(direct - integrated) / np.linalg.norm(direct)
    return err < 1e-6, f"direct vs integrated relative difference {err:.2e}"


def _check_dark_mode():
    h = hybridize_two_mode(1.0, 1.0, 0.22, -0.22, -0.046)
    params = reduced_three_mode(**{**COOLING_SET, "omega2": 1.0, "G2": -0.22})
    residual = dark_mode_measure(build_three_mode(params), three_mode_transform(0.22, -0.22))
    ok = abs(h.G_q) < 1e-12 and abs(h.G_p) < 1e-12 and residual["x"] < 1e-10
    return ok, f"G_q={h.G_q:.1e} G_p={h.G_p:.1e} residual={residual['x']:.1e}"


def _check_cooling():
    result = steady_state(build_three_mode(reduced_three_mode(**COOLING_SET)))
    ok = result.stable and all(v < 1 for v in result.phonons.values())
    detail = ", ".join(f"n_{k}={v:.3g}" for k, v in result.phonons.items()) \
        if result.phonons else "unstable"
    return ok, detail


def _check_force_symmetry():
    force = binding_force_exact(1e6, 8e5, 2.5e-6, 2 * math.pi / 1064e-9, 1e-32)
    return force.fy == 0.0, f"Fy={force.fy!r}"


def _check_round_trip():
    params = reduced_three_mode(**COOLING_SET)
    ok = load_config(dump_config(params)) == params
    return ok, "dump then load restores every field" if ok else "round trip changed fields"


def _check_parallel():
    spec = SweepSpec("three_mode", (Axis("delta", 0.5, 1.5, 9),), "reduced3",
                     {k: v for k, v in COOLING_SET.items() if k != "delta"})
    serial = format_csv(run_sweep(spec, 1), spec.columns)
    parallel = format_csv(run_sweep(spec, 4), spec.columns)
    return serial == parallel, "serial and 4-worker CSV identical" if serial == parallel \
        else "serial and parallel CSV differ"


CHECKS = (
    ("lyapunov residual", _check_lyapunov),
    ("lyapunov vs covariance ODE", _check_ode_agreement),
    ("dark mode decoupling", _check_dark_mode),
    ("ground-state cooling", _check_cooling),
    ("transverse force vanishes", _check_force_symmetry),
    ("config round trip", _check_round_trip),
    ("parallel sweep equivalence", _check_parallel),
)


def run_checks() -> list[tuple[str, bool, str]]:
    """Run every check; exceptions count as failures."""
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
