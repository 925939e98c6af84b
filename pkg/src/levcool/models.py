"""Linearized Langevin models: drift and noise matrices.

Three-mode basis: (q1, p1, q2, p2, X, Y), the x motions of both particles plus
the cavity quadratures. Five-mode basis: (q1x, p1x, q2x, p2x, q1z, p1z, q2z,
p2z, X, Y). Mechanical quadratures are scaled so that sqrt(2) q = x / x_zpf.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.constants import hbar as HBAR

from .errors import NumericalError
from .params import DerivedParams

SQRT2 = math.sqrt(2.0)

THREE_MODE_LABELS = ("q1", "p1", "q2", "p2", "X", "Y")
FIVE_MODE_LABELS = ("q1x", "p1x", "q2x", "p2x", "q1z", "p1z", "q2z", "p2z", "X", "Y")

# Allowed nonzero entries of the three-mode drift matrix.
THREE_MODE_PATTERN = np.array([
    [0, 1, 0, 0, 0, 0],
    [1, 1, 1, 0, 1, 0],
    [0, 0, 0, 1, 0, 0],
    [1, 0, 1, 1, 1, 0],
    [0, 0, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 1],
], dtype=bool)

FIVE_MODE_PATTERN = np.array([
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 1, 1, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 0, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 1, 0, 1, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1, 0, 1, 1],
], dtype=bool)


def _require_finite(obj) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        values = np.atleast_1d(np.asarray(value, dtype=complex)) if not isinstance(
            value, (str, bool)) else ()
        if len(values) and not np.all(np.isfinite(values)):
            raise ValueError(f"parameter {f.name} is not finite: {value!r}")


@dataclass(frozen=True)
class ThreeModeParams:
    """Cavity plus the two x motions; all rates in a common frequency unit."""

    omega1: float
    omega2: float
    G1: float
    G2: float
    Gx: float
    delta: float
    kappa: float
    gamma1: float
    gamma2: float
    n_th1: float
    n_th2: float
    R1: float = 0.0
    R2: float = 0.0

    def __post_init__(self):
        _require_finite(self)
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("mechanical frequencies must be positive")
        if not self.kappa > 0:
            raise ValueError("cavity linewidth must be positive")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("damping rates must be >= 0")
        if self.n_th1 < 0 or self.n_th2 < 0:
            raise ValueError("bath occupations must be >= 0")


@dataclass(frozen=True)
class FiveModeParams:
    """Cavity plus x and z motions of both particles.

    Mechanical quantities are ordered 1x, 2x, 1z, 2z. ``couplings`` holds the
    complex linearized couplings. The semiclassical amplitudes ``a_mean``,
    ``x_mean`` and ``z_mean`` are dimensionless (positions in units of the
    zero-point length divided by sqrt(2)); they are zero for the reduced entry
    path.
    """

    omega: tuple[float, float, float, float]
    Gx: float
    Gz: float
    couplings: tuple[complex, complex, complex, complex]
    delta: float
    kappa: float
    gamma: tuple[float, float, float, float]
    n_th: tuple[float, float, float, float]
    R_tilde: tuple[float, float] = (0.0, 0.0)
    a_mean: complex = 0j
    x_mean: tuple[float, float] = (0.0, 0.0)
    z_mean: tuple[float, float] = (0.0, 0.0)
    iterations: int = 0
    residual: float = 0.0

    def __post_init__(self):
        for name in ("omega", "couplings", "gamma", "n_th", "R_tilde", "x_mean", "z_mean"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "couplings", tuple(complex(g) for g in self.couplings))
        _require_finite(self)
        if len(self.omega) != 4 or len(self.couplings) != 4:
            raise ValueError("five-mode model needs four frequencies and four couplings")
        if not all(w > 0 for w in self.omega):
            raise ValueError("mechanical frequencies must be positive")
        if not self.kappa > 0:
            raise ValueError("cavity linewidth must be positive")
        if any(g < 0 for g in self.gamma) or any(n < 0 for n in self.n_th):
            raise ValueError("damping rates and bath occupations must be >= 0")

    @property
    def real_parts(self) -> np.ndarray:
        """A1, A2, C1, C2: real parts of the couplings."""
        return np.array([g.real for g in self.couplings])

    @property
    def imag_parts(self) -> np.ndarray:
        """B1, B2, D1, D2: imaginary parts of the couplings."""
        return np.array([g.imag for g in self.couplings])


@dataclass(frozen=True)
class LinearModel:
    """Drift matrix A and diagonal noise matrix Q of dq/dt = A q + noise.

    ``mechanical`` lists (label, q index, p index) for each mechanical mode and
    ``zpf`` the zero-point length (m) per mechanical mode when known.
    """

    drift: np.ndarray
    noise: np.ndarray
    labels: tuple[str, ...]
    mechanical: tuple[tuple[str, int, int], ...]
    kind: str
    zpf: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("drift", "noise"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dimension(self) -> int:
        return self.drift.shape[0]


def check_structure(drift: np.ndarray, pattern: np.ndarray) -> None:
    """Raise if ``drift`` has a nonzero outside the allowed ``pattern``."""
    bad = (drift != 0) & ~pattern
    if np.any(bad):
        where = [tuple(int(i) for i in idx) for idx in np.argwhere(bad)]
        raise ValueError(f"drift matrix has entries outside the model pattern at {where}")


def build_three_mode(p: ThreeModeParams, allow_uncoupled: bool = False) -> LinearModel:
    """Drift and noise matrices of the cavity plus two x motions."""
    if p.G1 == 0 and p.G2 == 0 and not allow_uncoupled:
        raise ValueError("both mechanical modes are uncoupled from the cavity; "
                         "pass allow_uncoupled=True if intended")
    g1, g2 = SQRT2 * p.G1, SQRT2 * p.G2
    drift = np.array([
        [0.0, p.omega1, 0.0, 0.0, 0.0, 0.0],
        [-p.omega1, -p.gamma1, p.Gx, 0.0, -g1, 0.0],
        [0.0, 0.0, 0.0, p.omega2, 0.0, 0.0],
        [p.Gx, 0.0, -p.omega2, -p.gamma2, -g2, 0.0],
        [0.0, 0.0, 0.0, 0.0, -p.kappa, p.delta],
        [-g1, 0.0, -g2, 0.0, -p.delta, -p.kappa],
    ])
    noise = np.diag([0.0, p.gamma1 * (2 * p.n_th1 + 1), 0.0, p.gamma2 * (2 * p.n_th2 + 1),
                     p.kappa, p.kappa])
    check_structure(drift, THREE_MODE_PATTERN)
    return LinearModel(drift, noise, THREE_MODE_LABELS,
                       (("1x", 0, 1), ("2x", 2, 3)), "three_mode")


def build_five_mode(p: FiveModeParams, allow_uncoupled: bool = False,
                    z_signs: str = "mixed") -> LinearModel:
    """Drift and noise matrices of the cavity plus x and z motions.

    With ``z_signs="mixed"`` the imaginary parts D_j of the z couplings enter
    the z momentum rows as -sqrt(2) D_j, whereas the x rows carry +sqrt(2) B_j.
    ``z_signs="hamiltonian"`` gives the z rows the same pattern as the x rows,
    which is the one generated by a coupling (G a + G* a^dag) q. The two
    agree whenever the z couplings are real.
    """
    if z_signs not in ("mixed", "hamiltonian"):
        raise ValueError("z_signs must be 'mixed' or 'hamiltonian'")
    if not allow_uncoupled and all(g == 0 for g in p.couplings):
        raise ValueError("all mechanical modes are uncoupled from the cavity; "
                         "pass allow_uncoupled=True if intended")
    w1x, w2x, w1z, w2z = p.omega
    a1, a2, c1, c2 = SQRT2 * p.real_parts
    b1, b2, d1, d2 = SQRT2 * p.imag_parts
    dz = -1.0 if z_signs == "mixed" else 1.0
    g1x, g2x, g1z, g2z = p.gamma
    drift = np.zeros((10, 10))
    drift[0, 1] = w1x
    drift[1, [0, 1, 2, 8, 9]] = [-w1x, -g1x, p.Gx, -a1, b1]
    drift[2, 3] = w2x
    drift[3, [0, 2, 3, 8, 9]] = [p.Gx, -w2x, -g2x, -a2, b2]
    drift[4, 5] = w1z
    drift[5, [4, 5, 6, 8, 9]] = [-w1z, -g1z, p.Gz, -c1, dz * d1]
    drift[6, 7] = w2z
    drift[7, [4, 6, 7, 8, 9]] = [p.Gz, -w2z, -g2z, -c2, dz * d2]
    drift[8, [0, 2, 4, 6, 8, 9]] = [-b1, -b2, -d1, -d2, -p.kappa, p.delta]
    drift[9, [0, 2, 4, 6, 8, 9]] = [-a1, -a2, -c1, -c2, -p.delta, -p.kappa]
    thermal = [g * (2 * n + 1) for g, n in zip(p.gamma, p.n_th)]
    noise = np.diag([0.0, thermal[0], 0.0, thermal[1], 0.0, thermal[2], 0.0, thermal[3],
                     p.kappa, p.kappa])
    check_structure(drift, FIVE_MODE_PATTERN)
    return LinearModel(drift, noise, FIVE_MODE_LABELS,
                       (("1x", 0, 1), ("2x", 2, 3), ("1z", 4, 5), ("2z", 6, 7)),
                       "five_mode")


# --- physical path -----------------------------------------------------------

def _require_trapped(d: DerivedParams) -> None:
    if not d.all_trapped:
        raise ValueError("a particle is untrapped (zero power or negative dressed "
                         "stiffness); cannot build a mechanical model")




def at_cavity_nodes(d: DerivedParams, tol: float = 1e-6) -> bool:
    """True when both particles sit at nodes of the cavity standing wave."""
    return abs(math.cos(d.k_cav * d.separation / 2)) < tol


def three_mode_from_physical(d: DerivedParams, node_tol: float = 1e-6) -> ThreeModeParams:
    """Three-mode parameters (rad/s) for particles placed at cavity nodes.

    At the nodes the z couplings, the cavity drive and the radiation-pressure
    terms vanish, leaving real x couplings.
    """
    _require_trapped(d)
    if not at_cavity_nodes(d, node_tol):
        raise ValueError("particles are not at cavity nodes; use the five-mode model")
    G = SQRT2 * d.g_tilde_x * d.x_zpf
    if np.max(np.abs(G.imag)) > 1e-9 * np.max(np.abs(G)):
        raise ValueError("x couplings are not real at this placement")
    gx = 2 * d.k_bind[0] * d.x_zpf[0] * d.x_zpf[1] / HBAR
    return ThreeModeParams(
        omega1=d.omega_dressed[0, 0], omega2=d.omega_dressed[1, 0],
        G1=float(G[0].real), G2=float(G[1].real), Gx=gx,
        R1=SQRT2 * d.R_tilde * d.x_zpf[0], R2=SQRT2 * d.R_tilde * d.x_zpf[1],
        delta=d.delta_prime, kappa=d.kappa, gamma1=d.gamma[0], gamma2=d.gamma[1],
        n_th1=d.n_th[0], n_th2=d.n_th[1])


@dataclass(frozen=True)
class SemiclassicalInputs:
    """Scaled constants entering the steady-state mean-value equations (rad/s).

    ``G_bare`` holds sqrt(2) g_x x_zpf for the x modes and i sqrt(2) g_z z_zpf
    for the z modes (order 1x, 2x, 1z, 2z). ``pressure`` holds sqrt(2) g_ax x_zpf
    and ``detuning_slope`` holds g_ax x_zpf per particle.
    """

    omega: tuple[float, float, float, float]
    Gx: float
    Gz: float
    G_bare: tuple[complex, complex, complex, complex]
    pressure: tuple[float, float]
    detuning_slope: tuple[float, float]
    delta_prime: float
    drive: complex
    R_tilde: tuple[float, float]
    kappa: float
    gamma: tuple[float, float, float, float]
    n_th: tuple[float, float, float, float]


def semiclassical_inputs(d: DerivedParams) -> SemiclassicalInputs:
    """Collect the five-mode mean-value constants from derived parameters."""
    _require_trapped(d)
    x_zpf, z_zpf = d.x_zpf, d.z_zpf
    G_bare = [SQRT2 * d.g_tilde_x[0] * x_zpf[0], SQRT2 * d.g_tilde_x[1] * x_zpf[1],
              1j * SQRT2 * d.g_tilde_z[0] * z_zpf[0], 1j * SQRT2 * d.g_tilde_z[1] * z_zpf[1]]
    return SemiclassicalInputs(
        omega=tuple(float(w) for w in (d.omega_dressed[0, 0], d.omega_dressed[1, 0],
                                       d.omega_dressed[0, 2], d.omega_dressed[1, 2])),
        Gx=2 * d.k_bind[0] * x_zpf[0] * x_zpf[1] / HBAR,
        Gz=2 * d.k_bind[2] * z_zpf[0] * z_zpf[1] / HBAR,
        G_bare=tuple(complex(g) for g in G_bare),
        pressure=tuple(float(v) for v in SQRT2 * d.g_tilde_ax * x_zpf),
        detuning_slope=tuple(float(v) for v in d.g_tilde_ax * x_zpf),
        delta_prime=d.delta_prime, drive=complex(d.Omega_tilde),
        R_tilde=(SQRT2 * d.R_tilde * x_zpf[0], SQRT2 * d.R_tilde * x_zpf[1]),
        kappa=d.kappa, gamma=tuple(d.gamma), n_th=tuple(d.n_th))


def _effective_detuning(s: SemiclassicalInputs, x1: float, x2: float) -> float:
    return s.delta_prime + s.detuning_slope[0] * x1 + s.detuning_slope[1] * x2


def semiclassical_update(s: SemiclassicalInputs, state: np.ndarray) -> np.ndarray:
    """Right-hand sides of the mean-value equations for state (a, x1, x2, z1, z2)."""
    a = state[0]
    x1, x2, z1, z2 = (float(v.real) for v in state[1:])
    g1x, g2x, g1z, g2z = s.G_bare
    w1x, w2x, w1z, w2z = s.omega
    delta = _effective_detuning(s, x1, x2)
    a_new = 1j * (np.conj(s.drive) + np.conj(g1x) * x1 + np.conj(g2x) * x2
                  + np.conj(g1z) * z1 + np.conj(g2z) * z2) / (-1j * delta - s.kappa)
    # radiation pressure: G_ax <a> with G_ax = pressure * <a^dag>
    p1 = s.pressure[0] * abs(a) ** 2
    p2 = s.pressure[1] * abs(a) ** 2
    x1_new = (-p1 + s.Gx * x2 - s.R_tilde[0] - 2 * (g1x * a).imag) / w1x
    x2_new = (-p2 + s.Gx * x1 + s.R_tilde[1] - 2 * (g2x * a).imag) / w2x
    z1_new = (s.Gz * z2 - 2 * (g1z * a).imag) / w1z
    z2_new = (s.Gz * z1 - 2 * (g2z * a).imag) / w2z
    return np.array([a_new, x1_new, x2_new, z1_new, z2_new], dtype=complex)


def semiclassical_residual(s: SemiclassicalInputs, state: np.ndarray) -> float:
    """Relative mismatch between a candidate state and its update."""
    state = np.asarray(state, dtype=complex)
    diff = np.linalg.norm(semiclassical_update(s, state) - state)
    return float(diff / max(np.linalg.norm(state), np.finfo(float).tiny))


def solve_semiclassical(s: SemiclassicalInputs, relaxation: float = 0.5,
                        tol: float = 1e-12, max_iter: int = 100_000,
                        blowup: float = 1e15) -> FiveModeParams:
    """Damped fixed-point solution of the mean-value equations.

    Starts from the all-zero state and returns the five-mode parameters with
    linearized couplings G_x_j + sqrt(2) g_ax_j <a^dag> x_zpf_j for the x modes
    and the bare couplings for the z modes.

    Raises
    ------
    NumericalError
        On divergence or when ``max_iter`` is reached.
    """
    if not s.kappa > 0:
        raise ValueError("cavity linewidth must be positive")
    if not all(w > 0 for w in s.omega):
        raise ValueError("dressed frequencies must be positive")
    state = np.zeros(5, dtype=complex)
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        update = semiclassical_update(s, state)
        if not np.all(np.isfinite(update)) or np.max(np.abs(update)) > blowup:
            raise NumericalError("unstable semiclassical branch", iteration=iteration)
        step = np.linalg.norm(update - state)
        scale = np.linalg.norm(update)
        state = (1 - relaxation) * state + relaxation * update
        if step <= tol * scale or scale == 0.0:
            residual = semiclassical_residual(s, state) if scale else 0.0
            break
    else:
        raise NumericalError("semiclassical iteration did not converge",
                             iterations=max_iter, residual=float(step / scale))
    a = complex(state[0])
    x1, x2, z1, z2 = (float(v.real) for v in state[1:])
    couplings = (s.G_bare[0] + s.pressure[0] * np.conj(a),
                 s.G_bare[1] + s.pressure[1] * np.conj(a),
                 s.G_bare[2], s.G_bare[3])
    return FiveModeParams(
        omega=s.omega, Gx=s.Gx, Gz=s.Gz, couplings=couplings,
        delta=_effective_detuning(s, x1, x2), kappa=s.kappa, gamma=s.gamma, n_th=s.n_th,
        R_tilde=s.R_tilde, a_mean=a, x_mean=(x1, x2), z_mean=(z1, z2),
        iterations=iteration, residual=residual)


def five_mode_from_physical(d: DerivedParams) -> FiveModeParams:
    """Five-mode parameters (rad/s) at the semiclassical steady state."""
    return solve_semiclassical(semiclassical_inputs(d))
