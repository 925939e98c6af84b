"""End-to-end acceptance criteria, each evaluated at its stated tolerance."""
import math
import time
from pathlib import Path

import numpy as np

from levcool.darkmode import (dark_mode_measure, dark_mode_occupation, hybridize_two_mode,
                              three_mode_transform)
from levcool.harness.output import format_csv
from levcool.harness.sweep import parse_sweep, run_sweep
from levcool.models import build_three_mode
from levcool.optics import (binding_force_exact, binding_force_farfield, force_scan,
                            local_maxima)
from levcool.params import (binding_coupling_grid, derive_couplings, derive_particle,
                            derive_tweezer, reference_physical_config, reduced_three_mode)
from levcool.steady import (evolve_covariance, is_stable, lyapunov_residual, solve_lyapunov,
                            steady_state)

from conftest import ACCEPTANCE_LINES, COOLING_SET

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def report(label, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def sweep_columns(name, workers=1):
    spec = parse_sweep((CONFIGS / name).read_text())
    started = time.perf_counter()
    records = run_sweep(spec, workers=workers)
    elapsed = time.perf_counter() - started
    axis = np.array([r.axes[0][1] for r in records])
    column = lambda key: np.array([np.nan if r.outputs[key] is None else r.outputs[key]
                                   for r in records])
    return spec, records, axis, column, elapsed


def test_criterion_1_ground_state_cooling():
    spec, records, delta, col, elapsed = sweep_columns("fig4a_detuning.sweep")
    n1, n2 = col("n_1x"), col("n_2x")
    at1, at2 = delta[np.nanargmin(n1)], delta[np.nanargmin(n2)]
    ok = (len(records) == 101 and np.nanmin(n1) < 1 and np.nanmin(n2) < 1
          and abs(at1 - 1.0) <= 0.05 and abs(at2 - 0.75) <= 0.05 and elapsed < 5)
    report("1 ground-state cooling", ok,
           f"min n1={np.nanmin(n1):.4f} at {at1:.2f}, min n2={np.nanmin(n2):.4f} at {at2:.2f}, "
           f"{elapsed:.2f} s")


DEGENERATE = dict(COOLING_SET, omega2=1.0, G2=-0.22)


def test_criterion_2a_hybrid_couplings_vanish():
    h = hybridize_two_mode(1.0, DEGENERATE["omega2"], DEGENERATE["G1"], DEGENERATE["G2"],
                           DEGENERATE["Gx"])
    ok = abs(h.G_q) <= 1e-12 and abs(h.G_p) <= 1e-12
    report("2a G_q = G_p = 0", ok, f"G_q={h.G_q:.2e}, G_p={h.G_p:.2e}")


def test_criterion_2b_dark_mode_residual():
    p = reduced_three_mode(**DEGENERATE)
    residual = dark_mode_measure(build_three_mode(p), three_mode_transform(p.G1, p.G2))["x"]
    report("2b dark-mode residual", residual < 1e-10, f"residual={residual:.2e}")


def test_criterion_2c_dark_mode_occupation():
    p = reduced_three_mode(**DEGENERATE)
    model = build_three_mode(p)
    n_dark = dark_mode_occupation(steady_state(model).covariance,
                                  three_mode_transform(p.G1, p.G2))["x"]
    ratio = n_dark / p.n_th1
    report("2c dark-mode occupation within 1% of bath", abs(ratio - 1) <= 0.01,
           f"n_dark/n_th={ratio:.4f}")


def test_criterion_2d_equal_power_diagonal():
    spec, records, _, _, _ = sweep_columns("fig3_powers.sweep", workers=8)
    worst = {}
    for r in records:
        (_, p1), (_, p2) = r.axes
        n = max(r.outputs["n_1x"], r.outputs["n_2x"]) if r.stable else math.inf
        worst[(round(p1, 9), round(p2, 9))] = n
    diagonal = min(v for (p1, p2), v in worst.items() if p1 == p2)
    reference = worst[(0.8, 0.45)]
    report("2d equal-power suppression", diagonal > 10 * reference,
           f"diagonal min={diagonal:.4g}, reference={reference:.4g}")


def test_criterion_3_lyapunov_correctness():
    rng = np.random.default_rng(2024)
    started = time.perf_counter()
    worst_gap, worst_residual = 0.0, 0.0
    for n in (6, 10):
        for _ in range(20):
            drift = rng.normal(size=(n, n)) / math.sqrt(n)
            drift -= (np.max(np.linalg.eigvals(drift).real) + rng.uniform(0.5, 1.0)) * np.eye(n)
            b = rng.normal(size=(n, n))
            noise = b @ b.T / n
            direct = solve_lyapunov(drift, noise)
            rate = -is_stable(drift).margin
            integrated = evolve_covariance(drift, noise, np.zeros((n, n)), 30 / rate,
                                           0.09 / np.linalg.norm(drift))
            worst_gap = max(worst_gap, np.linalg.norm(integrated - direct)
                            / np.linalg.norm(direct))
            worst_residual = max(worst_residual, lyapunov_residual(drift, noise, direct))
    elapsed = time.perf_counter() - started
    ok = worst_gap <= 1e-6 and worst_residual <= 1e-10 and elapsed < 10
    report("3 Lyapunov correctness", ok,
           f"max gap={worst_gap:.1e}, max residual={worst_residual:.1e}, {elapsed:.2f} s")


def test_criterion_4_five_mode_cooling():
    _, _, _, col, _ = sweep_columns("fig8_reduced5.sweep")
    mins = {m: np.nanmin(col(f"n_{m}")) for m in ("1x", "2x", "1z", "2z")}
    ok = all(v < 1 for v in mins.values()) and max(mins["1x"], mins["2x"]) < min(
        mins["1z"], mins["2z"])
    report("4 five-mode cooling", ok, ", ".join(f"min n_{k}={v:.4f}" for k, v in mins.items()))


def interior_minimum(values):
    i = int(np.argmin(values))
    left, right = np.diff(values[:i + 1]), np.diff(values[i:])
    return 0 < i < len(values) - 1 and np.all(left < 0) and np.all(right > 0), i


def test_criterion_5_linewidth_dependence():
    _, _, kappa, col, _ = sweep_columns("fig4b_linewidth.sweep")
    results = [interior_minimum(col(n)) for n in ("n_1x", "n_2x")]
    ok = all(r[0] for r in results)
    report("5 linewidth dependence", ok,
           ", ".join(f"minimum at kappa={kappa[i]:.3f}" for _, i in results))


def test_criterion_6_binding_degradation():
    _, _, gx, col, _ = sweep_columns("fig6_binding.sweep")
    order = np.argsort(np.abs(gx))
    ok = all(np.all(np.diff(col(n)[order]) >= 0) for n in ("n_1x", "n_2x"))
    report("6 binding degradation", ok,
           f"n1 {col('n_1x')[order][0]:.4f} -> {col('n_1x')[order][-1]:.4f}, "
           f"n2 {col('n_2x')[order][0]:.4f} -> {col('n_2x')[order][-1]:.4f}")


def test_criterion_7_binding_forces():
    config = reference_physical_config()
    _, alpha = derive_particle(config)
    e1, e2 = derive_tweezer(config, 1).eps_tw, derive_tweezer(config, 2).eps_tw

    def window(lo, hi):
        scan = force_scan((lo, hi), 301, e1, e2, config.wavelength, alpha)
        return max(np.max(np.abs(ex - far)) / np.max(np.abs(ex)) for ex, far in
                   ((scan.fx_exact, scan.fx_far), (scan.fz_exact, scan.fz_far)))

    full = force_scan((0.3, 3.0), 2701, e1, e2, config.wavelength, alpha)
    fy_zero = all(f(e1, e2, r * config.wavelength, 2 * math.pi / config.wavelength,
                    alpha).fy == 0.0 for r in full.separation_ratio[::100]
                  for f in (binding_force_exact, binding_force_farfield))
    peaks = np.abs(full.fx_exact)[local_maxima(np.abs(full.fx_exact))]
    near, far = window(0.3, 0.5), window(1.5, 3.0)
    ok = fy_zero and far < near and len(peaks) >= 2 and np.all(np.diff(peaks) < 0)
    report("7 binding forces", ok,
           f"Fy=0: {fy_zero}, rel diff near={near:.3f} far={far:.3f}, {len(peaks)} maxima")


def test_criterion_8_physical_sanity():
    config = reference_physical_config()
    d = derive_couplings(config)
    ratio = d.omega_dressed[0, 2] / d.omega_dressed[0, 0]
    powers = np.linspace(0.15, 1.0, 18)
    grid = binding_coupling_grid(config, powers, powers) / 1e3
    lo, hi = grid.min(), grid.max()
    ok = (abs(ratio - 0.40) <= 0.05 and abs(lo / -110.2 - 1) <= 0.15
          and abs(hi / -41.8 - 1) <= 0.15)
    report("8 physical-path sanity", ok,
           f"omega_z/omega_x={ratio:.3f}, G_x band [{lo:.1f}, {hi:.1f}] x 1e3 rad/s")


def test_criterion_9_determinism():
    spec = parse_sweep((CONFIGS / "fig4a_detuning.sweep").read_text())
    serial = format_csv(run_sweep(spec, workers=1), spec.columns).encode()
    parallel = format_csv(run_sweep(spec, workers=8), spec.columns).encode()
    again = format_csv(run_sweep(spec, workers=1), spec.columns).encode()
    ok = serial == parallel == again
    report("9 determinism", ok, f"{len(serial)} bytes, serial == 8 workers: {serial == parallel}")
