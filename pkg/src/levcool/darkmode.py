"""Hybrid mechanical modes and dark-mode diagnostics.

Two mechanical modes coupled to one cavity can be rotated into a bright
combination, which carries all the cavity coupling, and a dark combination.
The dark combination is fully decoupled only for degenerate frequencies and
opposite couplings; otherwise residual couplings G_q (position) and G_p
(momentum) connect it to the bright mode. The residual is measured on the
drift matrix by conjugating it with the phase-space form of the hybrid
transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import FiveModeParams, LinearModel, build_five_mode


@dataclass(frozen=True)
class HybridTwoMode:
    """Bright (+) and dark (-) combinations of two real-coupled modes.

    ``rotation`` maps (q1, q2) to (q+, q-). ``squeeze_plus`` and
    ``squeeze_minus`` are the coefficients of q+^2 and q-^2 generated by the
    inter-particle coupling.
    """

    omega_plus: float
    omega_minus: float
    G_plus: float
    G_q: float
    G_p: float
    squeeze_plus: float
    squeeze_minus: float
    rotation: np.ndarray


def hybridize_two_mode(omega1: float, omega2: float, G1: float, G2: float,
                       Gx: float) -> HybridTwoMode:
    """Rotate two x modes into bright and dark hybrids.

    Parameters
    ----------
    omega1, omega2 : float
        Mechanical frequencies.
    G1, G2 : float
        Cavity couplings of the two modes.
    Gx : float
        Inter-particle coupling, entering the Hamiltonian as ``-Gx q1 q2``.
    """
    norm2 = G1 ** 2 + G2 ** 2
    if norm2 == 0:
        raise ValueError("hybrid transform undefined when both couplings vanish")
    norm = math.sqrt(norm2)
    rotation = np.array([[G1, G2], [-G2, G1]]) / norm
    return HybridTwoMode(
        omega_plus=(omega1 * G1 ** 2 + omega2 * G2 ** 2) / norm2,
        omega_minus=(omega1 * G2 ** 2 + omega2 * G1 ** 2) / norm2,
        G_plus=norm,
        G_q=((omega2 - omega1) * G1 * G2 - Gx * (G1 ** 2 - G2 ** 2)) / norm2,
        G_p=(omega2 - omega1) * G1 * G2 / norm2,
        squeeze_plus=-Gx * G1 * G2 / norm2,
        squeeze_minus=Gx * G1 * G2 / norm2,
        rotation=rotation,
    )


def _unitary(g1: complex, g2: complex) -> np.ndarray:
    """Rows give B+ = (g1 b1 + g2 b2)/N and B- = (g2* b1 - g1* b2)/N."""
    norm = math.sqrt(abs(g1) ** 2 + abs(g2) ** 2)
    if norm == 0:
        raise ValueError("hybrid transform undefined for a sector with zero coupling")
    return np.array([[g1, g2], [np.conj(g2), -np.conj(g1)]], dtype=complex) / norm


@dataclass(frozen=True)
class HybridFiveMode:
    """Bright/dark hybrids of the x pair and of the z pair.

    ``unitary_x`` and ``unitary_z`` map (b1, b2) to (B+, B-) in each sector.
    ``zeta`` and ``xi`` are the coefficients of the counter-rotating terms of
    the hybrid Hamiltonian; ``residual`` holds the dark-mode residual per
    sector.
    """

    unitary_x: np.ndarray
    unitary_z: np.ndarray
    zeta: tuple[complex, complex]
    xi: tuple[complex, complex]
    residual: dict[str, float]


def hybridize_five_mode(p: FiveModeParams, z_signs: str = "mixed") -> HybridFiveMode:
    """Build the x and z hybrid transforms and their dark-mode residuals."""
    g1x, g2x, g1z, g2z = p.couplings
    ux, uz = _unitary(g1x, g2x), _unitary(g1z, g2z)
    zeta = (p.Gx / (2 * np.conj(g1x)) if g1x else complex("nan"),
            p.Gz / (2 * g1z) if g1z else complex("nan"))
    xi = (math.sqrt(2) * np.conj(g1x) / abs(g1x) if g1x else complex("nan"),
          math.sqrt(2) * np.conj(g1z) / abs(g1z) if g1z else complex("nan"))
    model = build_five_mode(p, allow_uncoupled=True, z_signs=z_signs)
    transform = five_mode_transform(p)
    return HybridFiveMode(ux, uz, (complex(zeta[0]), complex(zeta[1])),
                          (complex(xi[0]), complex(xi[1])),
                          dark_mode_measure(model, transform))


def phase_space_rotation(unitary: np.ndarray) -> np.ndarray:
    """Real 4x4 map on (q1, p1, q2, p2) induced by a 2x2 map on (b1, b2).

    With b = (q + i p)/sqrt(2), B_k = sum_l u_kl b_l gives
    Q_k = sum_l Re(u_kl) q_l - Im(u_kl) p_l and P_k = sum_l Im(u_kl) q_l + Re(u_kl) p_l.
    """
    out = np.zeros((4, 4))
    for k in range(2):
        for l in range(2):
            u = unitary[k, l]
            out[2 * k, 2 * l] = u.real
            out[2 * k, 2 * l + 1] = -u.imag
            out[2 * k + 1, 2 * l] = u.imag
            out[2 * k + 1, 2 * l + 1] = u.real
    return out


@dataclass(frozen=True)
class HybridTransform:
    """Orthogonal phase-space transform plus the index pairs of dark modes."""

    matrix: np.ndarray
    dark: dict[str, tuple[int, int]]


def three_mode_transform(G1: float, G2: float) -> HybridTransform:
    """(q1, p1, q2, p2, X, Y) -> (q+, p+, q-, p-, X, Y)."""
    h = hybridize_two_mode(1.0, 1.0, G1, G2, 0.0)
    unitary = h.rotation.astype(complex)
    matrix = np.eye(6)
    matrix[:4, :4] = phase_space_rotation(unitary)
    return HybridTransform(matrix, {"x": (2, 3)})


def five_mode_transform(p: FiveModeParams) -> HybridTransform:
    """Phase-space form of the x and z sector hybrid transforms.

    A sector whose couplings all vanish keeps the identity and has no dark
    mode entry.
    """
    g1x, g2x, g1z, g2z = p.couplings
    matrix = np.eye(10)
    dark = {}
    for sector, (g1, g2), start in (("x", (g1x, g2x), 0), ("z", (g1z, g2z), 4)):
        if abs(g1) ** 2 + abs(g2) ** 2 > 0:
            matrix[start:start + 4, start:start + 4] = phase_space_rotation(_unitary(g1, g2))
            dark[sector] = (start + 2, start + 3)
    return HybridTransform(matrix, dark)


def dark_mode_measure(model: LinearModel, transform: HybridTransform) -> dict[str, float]:
    """Coupling strength between each dark mode and the rest of the system.

    The drift matrix is conjugated by the transform; for each dark mode the
    Frobenius norm of its rows and columns outside its own 2x2 block is
    returned.
    """
    t = np.asarray(transform.matrix)
    if t.shape != model.drift.shape:
        raise ValueError(f"transform shape {t.shape} does not match model "
                         f"dimension {model.drift.shape}")
    hybrid = t @ model.drift @ t.T
    out = {}
    for sector, (iq, ip) in transform.dark.items():
        own = [iq, ip]
        others = [i for i in range(hybrid.shape[0]) if i not in own]
        rows = hybrid[np.ix_(own, others)]
        cols = hybrid[np.ix_(others, own)]
        out[sector] = float(math.sqrt(np.sum(rows ** 2) + np.sum(cols ** 2)))
    return out


def dark_mode_occupation(covariance: np.ndarray,
                         transform: HybridTransform) -> dict[str, float]:
    """Mean occupation of each dark mode from a steady-state covariance."""
    t = np.asarray(transform.matrix)
    hybrid = t @ np.asarray(covariance) @ t.T
    return {sector: 0.5 * (hybrid[iq, iq] + hybrid[ip, ip] - 1.0)
            for sector, (iq, ip) in transform.dark.items()}
