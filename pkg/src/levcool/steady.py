"""Stability, steady-state covariance and phonon numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericalError
from .models import LinearModel

STABILITY_RTOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_CONDITION = 1e14


class Stability(NamedTuple):
    stable: bool
    margin: float
    marginal: bool


def is_stable(drift: np.ndarray) -> Stability:
    """Eigenvalue criterion: every real part below ``-1e-12 * ||A||``.

    ``margin`` is the largest real part. A matrix whose largest real part lies
    within the tolerance band of zero is reported unstable and ``marginal``.
    """
    drift = np.asarray(drift, dtype=float)
    if drift.ndim != 2 or drift.shape[0] != drift.shape[1]:
        raise ValueError("drift matrix must be square")
    if not np.all(np.isfinite(drift)):
        raise ValueError("drift matrix has non-finite entries")
    try:
        eigenvalues = np.linalg.eigvals(drift)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    tol = STABILITY_RTOL * np.linalg.norm(drift)
    margin = float(np.max(eigenvalues.real))
    return Stability(margin < -tol, margin, abs(margin) <= tol)


def lyapunov_residual(drift: np.ndarray, noise: np.ndarray, cov: np.ndarray) -> float:
    """Relative Frobenius residual of A V + V A^T + Q."""
    r = drift @ cov + cov @ drift.T + noise
    scale = np.linalg.norm(noise)
    return float(np.linalg.norm(r) / scale) if scale > 0 else float(np.linalg.norm(r))


def solve_lyapunov(drift: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Solve A V + V A^T = -Q for a stable drift matrix A.

    The equation is vectorized column-major as (I kron A + A kron I) vec(V) =
    -vec(Q) and solved densely; one step of iterative refinement is applied if
    the residual exceeds the tolerance.
    """
    drift = np.asarray(drift, dtype=float)
    noise = np.asarray(noise, dtype=float)
    stability = is_stable(drift)
    if not stability.stable:
        raise NumericalError("drift matrix is not stable", margin=stability.margin,
                             marginal=stability.marginal)
    n = drift.shape[0]
    eye = np.eye(n)
    op = np.kron(eye, drift) + np.kron(drift, eye)
    condition = np.linalg.cond(op)
    if not condition < MAX_CONDITION:
        raise NumericalError("Lyapunov operator is ill-conditioned",
                             condition=float(condition), margin=stability.margin)
    rhs = -noise.reshape(-1, order="F")
    vec = np.linalg.solve(op, rhs)
    cov = vec.reshape(n, n, order="F")
    cov = 0.5 * (cov + cov.T)
    residual = lyapunov_residual(drift, noise, cov)
    if residual > RESIDUAL_TOL:
        correction = np.linalg.solve(op, -(drift @ cov + cov @ drift.T + noise)
                                     .reshape(-1, order="F"))
        cov = cov + 0.5 * (correction.reshape(n, n, order="F")
                           + correction.reshape(n, n, order="F").T)
        residual = lyapunov_residual(drift, noise, cov)
    if residual > RESIDUAL_TOL:
        raise NumericalError("Lyapunov residual above tolerance", residual=residual,
                             condition=float(condition))
    return cov


def phonon_numbers(cov: np.ndarray, model: LinearModel) -> dict[str, float]:
    """Mean occupation (V_qq + V_pp - 1)/2 of each mechanical mode."""
    return {label: 0.5 * (cov[q, q] + cov[p, p] - 1.0) for label, q, p in model.mechanical}


def evolve_covariance(drift: np.ndarray, noise: np.ndarray, cov0: np.ndarray,
                      t_final: float, dt: float) -> np.ndarray:
    """Classical RK4 integration of dV/dt = A V + V A^T + Q.

    The step is shortened so that an integer number of steps reaches
    ``t_final`` exactly.
    """
    drift = np.asarray(drift, dtype=float)
    noise = np.asarray(noise, dtype=float)
    cov = np.array(cov0, dtype=float)
    norm = np.linalg.norm(drift)
    if norm > 0 and not dt < 0.1 / norm:
        raise ValueError(f"time step {dt} too large; need dt < 0.1/||A|| = {0.1 / norm}")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    if t_final == 0:
        return cov
    steps = math.ceil(t_final / dt)
    h = t_final / steps

    def rate(v):
        return drift @ v + v @ drift.T + noise

    limit = 1e150
    for _ in range(steps):
        k1 = rate(cov)
        k2 = rate(cov + 0.5 * h * k1)
        k3 = rate(cov + 0.5 * h * k2)
        k4 = rate(cov + h * k3)
        cov = cov + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.abs(cov) < limit):
            raise NumericalError("covariance integration blew up")
    return cov


@dataclass(frozen=True)
class CoolingResult:
    """Steady state of one linear model. Unstable models carry no covariance."""

    stable: bool
    margin: float
    marginal: bool
    covariance: np.ndarray | None
    phonons: dict[str, float] | None
    residual: float | None


def steady_state(model: LinearModel) -> CoolingResult:
    """Stability check followed by the Lyapunov solve when stable."""
    stability = is_stable(model.drift)
    if not stability.stable:
        return CoolingResult(False, stability.margin, stability.marginal, None, None, None)
    cov = solve_lyapunov(model.drift, model.noise)
    return CoolingResult(True, stability.margin, False, cov, phonon_numbers(cov, model),
                         lyapunov_residual(model.drift, model.noise, cov))
