"""Dipole-dipole propagator and optical binding forces.

The two particles sit on the x axis, both driven by y-polarized tweezers
propagating along z. Forces are the closed forms obtained from the gradient of
the scattered-field interaction energy; the far-field variant keeps only the
transverse 1/r part of the propagator before differentiating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0 as EPS0

EXACT = "exact"
FAR_FIELD = "far-field"


def _unit(r0) -> tuple[np.ndarray, float]:
    r0 = np.asarray(r0, dtype=float)
    dist = float(np.linalg.norm(r0))
    if dist == 0.0:
        raise ValueError("coincident dipoles: separation vector is zero")
    return r0 / dist, dist


def near_tensor(r0) -> np.ndarray:
    """Near-field tensor ``3 rr - I`` for the direction of ``r0``."""
    rhat, _ = _unit(r0)
    return 3.0 * np.outer(rhat, rhat) - np.eye(3)


def far_tensor(r0) -> np.ndarray:
    """Transverse projector ``I - rr`` for the direction of ``r0``."""
    rhat, _ = _unit(r0)
    return np.eye(3) - np.outer(rhat, rhat)


def green_tensor(r0, k0: float) -> np.ndarray:
    """Free-space dyadic Green function (1/(F m)) at displacement ``r0``."""
    _, r = _unit(r0)
    kr = k0 * r
    return np.exp(1j * kr) / (4 * np.pi * EPS0 * r) * (
        (1 - 1j * kr) / r ** 2 * near_tensor(r0) + k0 ** 2 * far_tensor(r0))


def green_split(r0, k0: float, alpha: float, reference_distance: float):
    """Near and far parts of ``alpha * G`` scaled by a reference distance D.

    Returns
    -------
    near, far : ndarray
        ``exp(ikr) eta_n (D/r)^3 (1 - ikr) M_n`` and ``exp(ikr) eta_f (D/r) M_f``.
    eta_n, eta_f : float
        Dimensionless near- and far-field constants at distance D.
    """
    _, r = _unit(r0)
    dist = reference_distance
    eta_n = alpha / (4 * np.pi * EPS0 * dist ** 3)
    eta_f = alpha * k0 ** 2 / (4 * np.pi * EPS0 * dist)
    phase = np.exp(1j * k0 * r)
    near = phase * eta_n * (dist / r) ** 3 * (1 - 1j * k0 * r) * near_tensor(r0)
    far = phase * eta_f * (dist / r) * far_tensor(r0)
    return near, far, eta_n, eta_f


@dataclass(frozen=True)
class BindingForce:
    """Binding force on particle 1 (N) at separation ``separation`` (m)."""

    fx: float
    fy: float
    fz: float
    separation: float
    variant: str


def _prefactor(E10, E20, R0, alpha):
    if not R0 > 0:
        raise ValueError(f"separation must be positive, got {R0}")
    return alpha ** 2 * E10 * E20 / (8 * np.pi * EPS0 * R0 ** 4)


def binding_force_exact(E10: float, E20: float, R0: float, k_tw: float,
                        alpha: float) -> BindingForce:
    """Full dipole binding force including near-, mid- and far-field orders."""
    pref = _prefactor(E10, E20, R0, alpha)
    u = k_tw * R0
    c, s = np.cos(u), np.sin(u)
    fx = pref * (3 * c + 3 * u * s - 2 * u ** 2 * c - u ** 3 * s)
    fz = pref * (-u * s + u ** 2 * c + u ** 3 * s)
    return BindingForce(float(fx), 0.0, float(fz), R0, EXACT)


def binding_force_farfield(E10: float, E20: float, R0: float, k_tw: float,
                           alpha: float) -> BindingForce:
    """Binding force from the transverse 1/r propagator alone."""
    pref = _prefactor(E10, E20, R0, alpha)
    u = k_tw * R0
    c, s = np.cos(u), np.sin(u)
    fx = pref * (-u ** 2 * c - u ** 3 * s)
    fz = pref * (u ** 3 * s)
    return BindingForce(float(fx), 0.0, float(fz), R0, FAR_FIELD)


@dataclass(frozen=True)
class ForceScan:
    """Exact and far-field forces on a separation grid, in scan order."""

    separation_ratio: np.ndarray
    kr: np.ndarray
    fx_exact: np.ndarray
    fx_far: np.ndarray
    fz_exact: np.ndarray
    fz_far: np.ndarray

    COLUMNS = ("r_over_lambda", "kR0", "Fx_exact", "Fx_far", "Fz_exact", "Fz_far")

    def rows(self) -> list[tuple[float, ...]]:
        return list(zip(*(a.tolist() for a in (
            self.separation_ratio, self.kr, self.fx_exact, self.fx_far,
            self.fz_exact, self.fz_far))))


def force_scan(ratio_range: tuple[float, float], n_points: int, E10: float, E20: float,
               wavelength: float, alpha: float) -> ForceScan:
    """Evaluate both force variants on a linear grid of R0/lambda."""
    start, stop = ratio_range
    if not (0 < start < stop):
        raise ValueError("separation range must be positive and increasing")
    if n_points < 2:
        raise ValueError("need at least two scan points")
    ratios = np.linspace(start, stop, n_points)
    k_tw = 2 * np.pi / wavelength
    exact = [binding_force_exact(E10, E20, r * wavelength, k_tw, alpha) for r in ratios]
    far = [binding_force_farfield(E10, E20, r * wavelength, k_tw, alpha) for r in ratios]
    return ForceScan(
        separation_ratio=ratios,
        kr=k_tw * ratios * wavelength,
        fx_exact=np.array([f.fx for f in exact]),
        fx_far=np.array([f.fx for f in far]),
        fz_exact=np.array([f.fz for f in exact]),
        fz_far=np.array([f.fz for f in far]),
    )


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima of a sampled curve."""
    v = np.asarray(values)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return np.nonzero(inner)[0] + 1
