import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levcool.errors import NumericalError
from levcool.models import (FIVE_MODE_PATTERN, THREE_MODE_PATTERN, FiveModeParams,
                            at_cavity_nodes, build_five_mode,
                            build_three_mode, check_structure, five_mode_from_physical,
                            semiclassical_inputs, semiclassical_residual,
                            semiclassical_update, solve_semiclassical, three_mode_from_physical)
from levcool.params import PhysicalConfig, derive_couplings, reference_physical_config

LAMBDA = 1064e-9
X_BLOCK = [0, 1, 2, 3, 8, 9]


def symplectic(n_modes):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def conservative_part(model):
    """-J (A - damping): the Hamiltonian matrix if the drift is Hamiltonian."""
    damping = np.diag(np.diag(model.drift))
    j = symplectic(model.dimension // 2)
    return -j @ (model.drift - damping)


def test_three_mode_layout(cooling_params):
    model = build_three_mode(cooling_params)
    a = model.drift
    assert a.shape == (6, 6)
    assert a[0, 1] == 1.0 and a[1, 0] == -1.0 and a[2, 3] == 0.75
    assert a[4, 4] == a[5, 5] == -0.2 and a[4, 5] == 1.0 and a[5, 4] == -1.0
    assert a[1, 4] == pytest.approx(-math.sqrt(2) * 0.22)
    assert a[5, 2] == pytest.approx(math.sqrt(2) * 0.19)
    assert a[1, 2] == a[3, 0] == -0.046
    off_diagonal = np.count_nonzero(a) - np.count_nonzero(np.diag(a))
    assert off_diagonal == 12
    np.testing.assert_array_equal(np.diag(model.noise),
                                  [0, 0.5e-8 * (2e5 + 1), 0, 0.5e-8 * (2e5 + 1), 0.2, 0.2])


def test_three_mode_is_hamiltonian_plus_damping(cooling_params):
    m = conservative_part(build_three_mode(cooling_params))
    np.testing.assert_allclose(m, m.T, atol=1e-15)


def test_structure_check_rejects_stray_entries(cooling_params):
    drift = np.array(build_three_mode(cooling_params).drift)
    drift[0, 5] = 1.0
    with pytest.raises(ValueError, match="outside the model pattern"):
        check_structure(drift, THREE_MODE_PATTERN)


def test_uncoupled_requires_opt_in(cooling_params):
    p = replace(cooling_params, G1=0.0, G2=0.0)
    with pytest.raises(ValueError, match="uncoupled"):
        build_three_mode(p)
    assert build_three_mode(p, allow_uncoupled=True).dimension == 6


@pytest.mark.parametrize("bad", [dict(kappa=0.0), dict(omega1=-1.0), dict(gamma1=-1e-3),
                                 dict(n_th2=-1.0), dict(G1=float("nan"))])
def test_three_mode_validation(cooling_params, bad):
    with pytest.raises(ValueError):
        replace(cooling_params, **bad)


def test_five_mode_layout(five_mode_params):
    model = build_five_mode(five_mode_params)
    assert model.drift.shape == (10, 10)
    assert [m[0] for m in model.mechanical] == ["1x", "2x", "1z", "2z"]
    check_structure(model.drift, FIVE_MODE_PATTERN)
    assert model.drift[5, 6] == model.drift[7, 4] == -0.03


def test_five_mode_embeds_three_mode(cooling_params):
    p = FiveModeParams(omega=(1.0, 0.75, 0.4, 0.3), Gx=-0.046, Gz=0.0,
                       couplings=(0.22, -0.19, 0.0, 0.0), delta=1.0, kappa=0.2,
                       gamma=(0.5e-8,) * 4, n_th=(1e5,) * 4)
    five = build_five_mode(p)
    three = build_three_mode(cooling_params)
    np.testing.assert_array_equal(five.drift[np.ix_(X_BLOCK, X_BLOCK)], three.drift)
    np.testing.assert_array_equal(five.noise[np.ix_(X_BLOCK, X_BLOCK)], three.noise)


complex_couplings = st.tuples(*[st.complex_numbers(max_magnitude=0.3, allow_nan=False,
                                                   allow_infinity=False)] * 4)


@settings(max_examples=40, deadline=None)
@given(complex_couplings)
def test_hamiltonian_sign_choice_is_symplectic(couplings):
    p = FiveModeParams(omega=(1.0, 0.75, 0.41, 0.31), Gx=-0.02, Gz=-0.03,
                       couplings=couplings, delta=1.0, kappa=0.2, gamma=(1e-3,) * 4,
                       n_th=(10.0,) * 4)
    m = conservative_part(build_five_mode(p, allow_uncoupled=True,
                                         z_signs="hamiltonian"))
    np.testing.assert_allclose(m, m.T, atol=1e-14)


def test_sign_choices_agree_for_real_z_couplings(five_mode_params):
    mixed = build_five_mode(five_mode_params, z_signs="mixed")
    ham = build_five_mode(five_mode_params, z_signs="hamiltonian")
    np.testing.assert_array_equal(mixed.drift, ham.drift)


def test_sign_choices_differ_for_imaginary_z_couplings(five_mode_params):
    p = replace(five_mode_params, couplings=(-0.1, -0.09, -0.12j, 0.1j))
    mixed = build_five_mode(p, z_signs="mixed")
    ham = build_five_mode(p, z_signs="hamiltonian")
    assert mixed.drift[5, 9] == -ham.drift[5, 9] != 0
    m = conservative_part(mixed)
    assert not np.allclose(m, m.T)
    with pytest.raises(ValueError):
        build_five_mode(p, z_signs="other")


def test_three_mode_from_nodes():
    d = derive_couplings(reference_physical_config())
    assert at_cavity_nodes(d)
    p = three_mode_from_physical(d)
    assert p.G1 / p.omega1 == pytest.approx(0.22, rel=1e-12)
    assert p.G2 < 0 < p.G1
    assert p.Gx < 0
    assert p.delta == d.delta_prime


def test_three_mode_rejects_off_node_placement():
    d = derive_couplings(reference_physical_config(separation=2.4 * LAMBDA))
    assert not at_cavity_nodes(d)
    with pytest.raises(ValueError, match="nodes"):
        three_mode_from_physical(d)


def test_untrapped_particle_rejected():
    d = derive_couplings(PhysicalConfig(power2=0.0, eps_cav=10.0))
    with pytest.raises(ValueError, match="untrapped"):
        three_mode_from_physical(d)


def test_five_mode_at_nodes_reduces_to_three_mode():
    d = derive_couplings(reference_physical_config())
    five = five_mode_from_physical(d)
    three = three_mode_from_physical(d)
    # the static x displacement drives the cavity, but radiation pressure vanishes here
    assert np.max(np.abs(np.asarray(five.couplings[:2]).imag)) < 1e-12 * abs(three.G1)
    np.testing.assert_allclose(np.array(five.couplings[:2]), [three.G1, three.G2], rtol=1e-12)
    np.testing.assert_allclose(np.abs(five.couplings[2:]), 0.0,
                               atol=1e-9 * abs(three.G1))
    assert five.delta == pytest.approx(three.delta, rel=1e-12)
    assert five.Gx == pytest.approx(three.Gx, rel=1e-12)


@pytest.mark.parametrize("ratio", [2.25, 2.4, 2.6])
def test_semiclassical_fixed_point_off_nodes(ratio):
    d = derive_couplings(reference_physical_config(separation=ratio * LAMBDA))
    s = semiclassical_inputs(d)
    p = solve_semiclassical(s)
    state = np.array([p.a_mean, *p.x_mean, *p.z_mean], dtype=complex)
    assert semiclassical_residual(s, state) < 1e-10
    assert p.iterations < 1000
    assert abs(p.a_mean) > 0
    # radiation pressure shifts the x couplings by sqrt(2) g_ax x_zpf <a^dag>
    shift = np.array(p.couplings[:2]) - np.array(s.G_bare[:2])
    np.testing.assert_allclose(shift, np.array(s.pressure) * np.conj(p.a_mean), rtol=1e-12)


def test_semiclassical_without_cavity_field():
    d = derive_couplings(PhysicalConfig(eps_cav=0.0, separation=2.4 * LAMBDA))
    s = semiclassical_inputs(d)
    p = solve_semiclassical(s)
    assert p.a_mean == 0
    assert p.z_mean == (0.0, 0.0)
    # only the lateral binding force displaces the particles, in opposite senses
    expected = np.linalg.solve([[s.omega[0], -s.Gx], [-s.Gx, s.omega[1]]],
                               [-s.R_tilde[0], s.R_tilde[1]])
    np.testing.assert_allclose(p.x_mean, expected, rtol=1e-9)
    assert np.allclose(semiclassical_update(s, np.array([0, *p.x_mean, 0, 0])),
                       [0, *p.x_mean, 0, 0], rtol=1e-9)


def test_semiclassical_iteration_limit_reported():
    d = derive_couplings(reference_physical_config(separation=2.4 * LAMBDA))
    with pytest.raises(NumericalError, match="did not converge"):
        solve_semiclassical(semiclassical_inputs(d), max_iter=3)


def test_semiclassical_pure_displacement():
    from levcool.models import SemiclassicalInputs
    s = SemiclassicalInputs(omega=(2.0, 1.5, 0.8, 0.6), Gx=0.0, Gz=0.0, G_bare=(0j,) * 4,
                            pressure=(0.0, 0.0), detuning_slope=(0.0, 0.0), delta_prime=1.0,
                            drive=0j, R_tilde=(0.3, 0.3), kappa=0.2, gamma=(0.0,) * 4,
                            n_th=(0.0,) * 4)
    p = solve_semiclassical(s)
    assert p.x_mean == pytest.approx((-0.3 / 2.0, 0.3 / 1.5), rel=1e-12)
    assert p.z_mean == (0.0, 0.0) and p.a_mean == 0
