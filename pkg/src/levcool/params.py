"""Laboratory inputs and the derived Hamiltonian constants.

Two entry paths exist. The physical path starts from particle, tweezer and
cavity properties and evaluates every closed-form coupling of the two-particle
coherent-scattering Hamiltonian. The reduced path takes the dimensionless
ratios directly (frequencies in units of the first mechanical frequency).

Geometry: both tweezers are polarized along y, the particles sit on the cavity
axis x at ``x10`` and ``x20 = x10 - D`` with ``x10 = +D/2`` (the reference
placement) or ``x10 = -D/2`` (the mirrored labelling). The cavity standing-wave
phase is fixed to zero and the cavity wave number is taken equal to the
tweezer wave number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR

from .errors import ConfigError

WAIST_CONVENTIONS = ("paraxial", "calibrated")

# Powers at which the default cavity amplitude is calibrated (W).
REFERENCE_POWERS = (0.8, 0.45)
# Target first-particle coupling G1/Omega1 at the reference powers.
REFERENCE_COUPLING_RATIO = 0.22

_AXES = ("x", "y", "z")
MECHANICAL_LABELS = ("1x", "2x", "1z", "2z")


@dataclass(frozen=True)
class PhysicalConfig:
    """Laboratory parameters of the two-particle setup (SI units).

    Rates given as ``*_ratio`` (and all ``gamma_*``) are multiples of the dressed
    x-frequency of particle 1. Exactly one of ``detuning``/``detuning_ratio``
    and of ``kappa``/``kappa_ratio`` is used; the ratio defaults apply when
    neither is given. ``eps_cav`` takes precedence over ``cavity_volume``; with
    neither, the cavity amplitude is calibrated so that G1/Omega1 equals
    ``REFERENCE_COUPLING_RATIO`` at ``REFERENCE_POWERS`` for this geometry.
    """

    radius: float = 90e-9
    density: float = 2200.0
    eps_r: float = 2.07
    wavelength: float = 1064e-9
    power1: float = 0.8
    power2: float = 0.45
    numerical_aperture: float = 0.8
    separation: float = 2.5 * 1064e-9
    x10: float | None = None
    x20: float | None = None
    waist: float | None = None
    waist_convention: str = "paraxial"
    detuning: float | None = None
    detuning_ratio: float | None = None
    eps_cav: float | None = None
    cavity_volume: float | None = None
    kappa: float | None = None
    kappa_ratio: float | None = None
    gamma_1x: float = 0.5e-8
    gamma_2x: float = 0.5e-8
    gamma_1z: float = 0.5e-8
    gamma_2z: float = 0.5e-8
    n_th_1x: float = 1e5
    n_th_2x: float = 1e5
    n_th_1z: float = 1e5
    n_th_2z: float = 1e5

    def __post_init__(self):
        for name in ("radius", "density", "wavelength", "numerical_aperture",
                     "separation"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError("invalid_value", f"{name} must be positive, got {value}",
                                  key=name)
        if not (math.isfinite(self.eps_r) and self.eps_r >= 1):
            raise ConfigError("invalid_value", f"eps_r must be >= 1, got {self.eps_r}",
                              key="eps_r")
        for name in ("power1", "power2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError("invalid_value", f"{name} must be >= 0, got {value}",
                                  key=name)
        if self.radius > self.wavelength / 4:
            raise ConfigError("invalid_value",
                              "radius exceeds wavelength/4; point-dipole model invalid",
                              key="radius")
        if self.waist_convention not in WAIST_CONVENTIONS:
            raise ConfigError("invalid_value",
                              f"waist_convention must be one of {WAIST_CONVENTIONS}",
                              key="waist_convention")
        if self.waist is not None and not self.waist > 0:
            raise ConfigError("invalid_value", "waist must be positive", key="waist")
        if self.detuning is not None and self.detuning_ratio is not None:
            raise ConfigError("invalid_value", "give detuning or detuning_ratio, not both",
                              key="detuning")
        if self.kappa is not None and self.kappa_ratio is not None:
            raise ConfigError("invalid_value", "give kappa or kappa_ratio, not both",
                              key="kappa")
        kappa = self.kappa if self.kappa is not None else self.kappa_ratio
        if kappa is not None and not kappa > 0:
            raise ConfigError("invalid_value", "cavity linewidth must be positive", key="kappa")
        if self.eps_cav is not None and not self.eps_cav >= 0:
            raise ConfigError("invalid_value", "eps_cav must be >= 0", key="eps_cav")
        if self.cavity_volume is not None and not self.cavity_volume > 0:
            raise ConfigError("invalid_value", "cavity_volume must be positive",
                              key="cavity_volume")
        for label in MECHANICAL_LABELS:
            if not getattr(self, f"gamma_{label}") >= 0:
                raise ConfigError("invalid_value", "damping rates must be >= 0",
                                  key=f"gamma_{label}")
            if not getattr(self, f"n_th_{label}") >= 0:
                raise ConfigError("invalid_value", "bath occupations must be >= 0",
                                  key=f"n_th_{label}")
        self.orientation  # validates the particle placement

    @property
    def orientation(self) -> int:
        """+1 if particle 1 sits at +D/2, -1 if it sits at -D/2."""
        half = self.separation / 2
        x10 = half if self.x10 is None else self.x10
        x20 = -x10 if self.x20 is None else self.x20
        tol = 1e-9 * self.separation
        for sign in (1, -1):
            if abs(x10 - sign * half) <= tol and abs(x20 + sign * half) <= tol:
                return sign
        raise ConfigError("invalid_value",
                          "particles must sit at x10 = -x20 = +-separation/2", key="x10")


@dataclass(frozen=True)
class DerivedParams:
    """Every constant of the total Hamiltonian for one physical configuration.

    Per-particle quantities are arrays indexed by particle (0 for particle 1);
    per-axis quantities are indexed x, y, z. Couplings ``g_*`` are in
    rad/(s m) and frequency-like terms in rad/s; ``nu`` and ``k_bind`` are
    spring constants in J/m^2. ``R_alpha``, ``g_alpha`` and ``R_tilde`` are the
    coefficients of ``(x1 - x2)`` in the Hamiltonian divided by hbar, so their
    sign follows the particle labelling.
    """

    mass: float
    alpha: float
    eps_tw: np.ndarray
    waist: float
    rayleigh_range: float
    separation: float
    k_cav: float
    k_tw: float
    omega_bare: np.ndarray
    trapped: np.ndarray
    eta_n: float
    eta_f: float
    eta_f_tw: float
    nu: np.ndarray
    k_bind: np.ndarray
    R_alpha: float
    Omega_cs: float
    Omega_alpha: float
    Omega_beta: complex
    g_x: np.ndarray
    g_z: np.ndarray
    g_ax: np.ndarray
    g_alpha: float
    g_alpha_x: np.ndarray
    g_alpha_z: np.ndarray
    g_beta_x: np.ndarray
    g_beta_z: np.ndarray
    eps_cav: float
    delta: float
    delta_prime: float
    omega_dressed: np.ndarray
    x_zpf: np.ndarray
    z_zpf: np.ndarray
    g_tilde_x: np.ndarray
    g_tilde_z: np.ndarray
    g_tilde_ax: np.ndarray
    Omega_tilde: complex
    R_tilde: float
    kappa: float
    gamma: np.ndarray = field(repr=False)
    n_th: np.ndarray = field(repr=False)

    @property
    def all_trapped(self) -> bool:
        return bool(np.all(self.trapped))


def derive_particle(config: PhysicalConfig) -> tuple[float, float]:
    """Mass (kg) and polarizability (F m^2) of a dielectric sphere."""
    if not (config.radius > 0 and config.density > 0):
        raise ConfigError("invalid_value", "radius and density must be positive")
    volume = 4.0 / 3.0 * math.pi * config.radius ** 3
    mass = volume * config.density
    alpha = EPS0 * 3.0 * (config.eps_r - 1.0) / (config.eps_r + 2.0) * volume
    return mass, alpha


def tweezer_waist(config: PhysicalConfig) -> float:
    """Focal waist: explicit value, else lambda/(pi NA) or sqrt(2) times that."""
    if config.waist is not None:
        return config.waist
    waist = config.wavelength / (math.pi * config.numerical_aperture)
    if config.waist_convention == "calibrated":
        waist *= math.sqrt(2.0)
    return waist


@dataclass(frozen=True)
class TweezerFields:
    eps_tw: float
    waist: float
    rayleigh_range: float
    omega: np.ndarray
    trapped: bool


def derive_tweezer(config: PhysicalConfig, j: int) -> TweezerFields:
    """Field amplitude and bare trap frequencies of tweezer ``j`` (1 or 2).

    A zero-power tweezer gives zero frequencies and ``trapped=False``.
    """
    if j not in (1, 2):
        raise ValueError("particle index must be 1 or 2")
    power = config.power1 if j == 1 else config.power2
    if power < 0:
        raise ConfigError("invalid_value", "tweezer power must be >= 0")
    mass, alpha = derive_particle(config)
    waist = tweezer_waist(config)
    z_r = math.pi * waist ** 2 / config.wavelength
    eps_tw = math.sqrt(4.0 * power / (math.pi * EPS0 * SPEED_OF_LIGHT * waist ** 2))
    scale = math.sqrt(alpha / (2.0 * mass)) * eps_tw
    omega = scale * np.array([math.sqrt(2.0) / waist, math.sqrt(2.0) / waist, 1.0 / z_r])
    return TweezerFields(eps_tw, waist, z_r, omega, bool(np.all(omega > 0)))


def _binding_terms(alpha, eta_f_tw, e1, e2, k_tw, dist, waist, z_r):
    """Frequency shifts, inter-particle springs and lateral displacement factor."""
    pref = alpha * eta_f_tw * e1 * e2
    cos_d, sin_d = math.cos(k_tw * dist), math.sin(k_tw * dist)
    nu = pref * cos_d * np.array([1.0 / waist ** 2, 1.0 / waist ** 2, 0.5 / z_r ** 2])
    k_bind = pref * np.array([
        -((2.0 / dist ** 2 - k_tw ** 2) * cos_d + 2.0 * k_tw / dist * sin_d),
        3.0 / dist ** 2 * cos_d + k_tw / dist * sin_d,
        (1.0 / dist ** 2 + k_tw ** 2) * cos_d + k_tw / dist * sin_d,
    ])
    r_alpha = pref * (k_tw * sin_d + cos_d / dist) / HBAR
    return nu, k_bind, r_alpha


def _dressed(omega_bare, nu, k_bind, mass):
    with np.errstate(invalid="ignore"):
        sq = omega_bare ** 2 + 2.0 * nu / mass + k_bind / mass
        return np.where(sq > 0, np.sqrt(np.abs(sq)), np.nan), sq > 0


def _cavity_terms(alpha, eta_f, eta_f_tw, eps_cav, e1, e2, k, k_tw, dist):
    """Coherent-scattering and binding-mediated cavity couplings.

    Evaluated for particle 1 at +D/2 and particle 2 at -D/2.
    """
    positions = np.array([dist / 2, -dist / 2])
    eps = np.array([e1, e2])
    ch, sh = math.cos(k * dist / 2), math.sin(k * dist / 2)
    cd, sd = math.cos(k * dist), math.sin(k * dist)
    phase = complex(math.cos(k_tw * dist), -math.sin(k_tw * dist))
    out = {}

    cos_j, sin_j = np.cos(k * positions), np.sin(k * positions)
    out["Omega_cs"] = float(np.sum(-alpha * eps_cav * eps * cos_j / (2 * HBAR)))
    out["g_x"] = alpha * eps_cav * eps * sin_j * k / (2 * HBAR)
    out["g_z"] = -alpha * eps_cav * eps * cos_j * k_tw / (2 * HBAR)
    out["g_ax"] = alpha * eps_cav ** 2 * 2.0 * cos_j * sin_j * k / HBAR

    lead = k * sd + cd / dist
    out["g_alpha"] = 4 * alpha * eta_f * eps_cav ** 2 * (
        lead * ch ** 2 + k * sd * cd / 2) / HBAR
    pa = alpha * eta_f * eps_cav / (2 * HBAR)
    out["Omega_alpha"] = -pa * cd * ch * (e1 + e2)
    out["g_alpha_x"] = np.array([
        pa * (lead * (e1 + e2) * ch + k * cd * e2 * sh),
        -pa * (lead * (e1 + e2) * ch + k * cd * e1 * sh),
    ])
    out["g_alpha_z"] = pa * eps * k_tw * cd * ch

    pb = alpha * eta_f_tw * eps_cav / (2 * HBAR)
    near = complex(1.0 / dist, k_tw)
    out["Omega_beta"] = -pb * (e1 + e2) * ch * phase
    out["g_beta_x"] = np.array([
        pb * (near * (e1 + e2) * ch + e2 * k * sh) * phase,
        -pb * (near * (e1 + e2) * ch + e1 * k * sh) * phase,
    ])
    out["g_beta_z"] = -pb * eps * k_tw * ch * phase + 0j
    out["delta_shift"] = (-2 * alpha * eps_cav ** 2 * ch ** 2 / HBAR
                          - 4 * alpha * eps_cav ** 2 * eta_f * ch ** 2 * cd / HBAR)
    return out


def default_eps_cav(config: PhysicalConfig) -> float:
    """Cavity amplitude (V/m) giving G1/Omega1 = 0.22 at the reference powers.

    The coupling G1 is linear in the cavity amplitude, so one evaluation at unit
    amplitude fixes the scale. Only the geometry of ``config`` is used.
    """
    probe = replace(config, power1=REFERENCE_POWERS[0], power2=REFERENCE_POWERS[1],
                    x10=None, x20=None, eps_cav=1.0, cavity_volume=None,
                    detuning=0.0, detuning_ratio=None)
    d = derive_couplings(probe)
    per_unit = math.sqrt(2.0) * abs(d.g_tilde_x[0]) * d.x_zpf[0] / d.omega_dressed[0, 0]
    if not per_unit > 0:
        raise ConfigError("invalid_value",
                          "cannot calibrate eps_cav: particle 1 is not coupled to the cavity")
    return REFERENCE_COUPLING_RATIO / per_unit


def derive_couplings(config: PhysicalConfig) -> DerivedParams:
    """Evaluate every constant of the total Hamiltonian for ``config``."""
    mass, alpha = derive_particle(config)
    tw = [derive_tweezer(config, 1), derive_tweezer(config, 2)]
    sign = config.orientation
    if sign < 0:
        # mirrored labelling: evaluate with particle 2 in the +D/2 slot, then relabel
        tw = tw[::-1]
    e1, e2 = tw[0].eps_tw, tw[1].eps_tw
    waist, z_r = tw[0].waist, tw[0].rayleigh_range
    dist = config.separation
    k_tw = 2 * math.pi / config.wavelength
    k = k_tw
    eta_n = alpha / (4 * math.pi * EPS0 * dist ** 3)
    eta_f = alpha * k ** 2 / (4 * math.pi * EPS0 * dist)
    eta_f_tw = alpha * k_tw ** 2 / (4 * math.pi * EPS0 * dist)

    omega_bare = np.vstack([tw[0].omega, tw[1].omega])
    nu, k_bind, r_alpha = _binding_terms(alpha, eta_f_tw, e1, e2, k_tw, dist, waist, z_r)
    omega_dressed, positive = _dressed(omega_bare, nu[None, :], k_bind[None, :], mass)
    trapped = np.array([tw[0].trapped, tw[1].trapped]) & positive.all(axis=1)

    with np.errstate(divide="ignore", invalid="ignore"):
        x_zpf = np.sqrt(HBAR / (2 * mass * omega_dressed[:, 0]))
        z_zpf = np.sqrt(HBAR / (2 * mass * omega_dressed[:, 2]))

    reference = omega_dressed[0 if sign > 0 else 1, 0]
    if config.detuning is not None:
        delta = config.detuning
    else:
        ratio = 1.0 if config.detuning_ratio is None else config.detuning_ratio
        delta = ratio * reference
    if config.kappa is not None:
        kappa = config.kappa
    else:
        kappa = (0.2 if config.kappa_ratio is None else config.kappa_ratio) * reference
    gamma = reference * np.array([getattr(config, f"gamma_{m}") for m in MECHANICAL_LABELS])
    n_th = np.array([getattr(config, f"n_th_{m}") for m in MECHANICAL_LABELS], dtype=float)

    if config.eps_cav is not None:
        eps_cav = config.eps_cav
    elif config.cavity_volume is not None:
        omega_cav = SPEED_OF_LIGHT * k_tw + delta
        eps_cav = math.sqrt(HBAR * omega_cav / (2 * EPS0 * config.cavity_volume))
    else:
        eps_cav = default_eps_cav(config)

    cav = _cavity_terms(alpha, eta_f, eta_f_tw, eps_cav, e1, e2, k, k_tw, dist)
    g_alpha = cav["g_alpha"]
    g_tilde_ax = cav["g_ax"] + np.array([g_alpha, -g_alpha])
    g_tilde_x = cav["g_x"] + cav["g_alpha_x"] + cav["g_beta_x"]
    g_tilde_z = cav["g_z"] + cav["g_alpha_z"] + cav["g_beta_z"]
    Omega_tilde = cav["Omega_cs"] + cav["Omega_alpha"] + cav["Omega_beta"]
    R_tilde = r_alpha + g_alpha / 2

    per_particle = {
        "eps_tw": np.array([e1, e2]), "omega_bare": omega_bare, "trapped": trapped,
        "g_x": cav["g_x"], "g_z": cav["g_z"], "g_ax": cav["g_ax"],
        "g_alpha_x": cav["g_alpha_x"], "g_alpha_z": cav["g_alpha_z"],
        "g_beta_x": cav["g_beta_x"], "g_beta_z": cav["g_beta_z"],
        "omega_dressed": omega_dressed, "x_zpf": x_zpf, "z_zpf": z_zpf,
        "g_tilde_x": g_tilde_x, "g_tilde_z": g_tilde_z, "g_tilde_ax": g_tilde_ax,
    }
    if sign < 0:
        per_particle = {name: value[::-1].copy() for name, value in per_particle.items()}
    for value in per_particle.values():
        value.setflags(write=False)
    for value in (nu, k_bind, gamma, n_th):
        value.setflags(write=False)

    return DerivedParams(
        mass=mass, alpha=alpha, separation=dist, waist=waist, rayleigh_range=z_r, k_cav=k, k_tw=k_tw,
        eta_n=eta_n, eta_f=eta_f, eta_f_tw=eta_f_tw, nu=nu, k_bind=k_bind,
        R_alpha=sign * r_alpha, Omega_cs=cav["Omega_cs"], Omega_alpha=cav["Omega_alpha"],
        Omega_beta=cav["Omega_beta"], g_alpha=sign * g_alpha, eps_cav=eps_cav,
        delta=delta, delta_prime=delta + cav["delta_shift"], Omega_tilde=Omega_tilde,
        R_tilde=sign * R_tilde, kappa=kappa, gamma=gamma, n_th=n_th, **per_particle,
    )


def binding_coupling_grid(config: PhysicalConfig, powers1, powers2) -> np.ndarray:
    """Scaled inter-particle coupling G_x = 2 k_x x_zpf1 x_zpf2 / hbar (rad/s).

    Returns an array of shape ``(len(powers1), len(powers2))``.
    """
    grid = np.empty((len(powers1), len(powers2)))
    for i, p1 in enumerate(powers1):
        for j, p2 in enumerate(powers2):
            d = derive_couplings(replace(config, power1=float(p1), power2=float(p2),
                                         eps_cav=0.0))
            grid[i, j] = 2 * d.k_bind[0] * d.x_zpf[0] * d.x_zpf[1] / HBAR
    return grid


def reference_physical_config(**overrides) -> PhysicalConfig:
    """The reference laboratory set: 90 nm silica spheres at 1064 nm, NA 0.8.

    Uses the calibrated waist convention, which reproduces the reported ratio of
    axial to transverse trap frequency.
    """
    base = PhysicalConfig(waist_convention="calibrated")
    return replace(base, **overrides)


def reduced_three_mode(omega2: float, G1: float, G2: float, Gx: float, delta: float,
                       kappa: float, gamma1: float, gamma2: float, n_th1: float,
                       n_th2: float, R1: float = 0.0, R2: float = 0.0):
    """Three-mode parameters given directly as ratios to Omega1 (Omega1 = 1)."""
    from .models import ThreeModeParams

    return ThreeModeParams(omega1=1.0, omega2=omega2, G1=G1, G2=G2, Gx=Gx, R1=R1, R2=R2,
                           delta=delta, kappa=kappa, gamma1=gamma1, gamma2=gamma2,
                           n_th1=n_th1, n_th2=n_th2)
