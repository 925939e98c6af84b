import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levcool.errors import ConfigError
from levcool.params import (PhysicalConfig, binding_coupling_grid, default_eps_cav,
                            derive_couplings, derive_particle, derive_tweezer,
                            reference_physical_config, tweezer_waist)

LAMBDA = 1064e-9

# High-precision reference values for a 90 nm silica sphere (eps_r 2.07) and an
# 0.8 W tweezer at NA 0.8 with the paraxial waist.
MASS_REF = 6.7179817304364138e-18
ALPHA_REF = 2.1324334711326839e-32
WAIST_REF = 4.2335214862444159e-07
EPS_TW_REF = 4.6271498905079745e+07
OMEGA_X_REF = 2 * math.pi * 980054.59142085962
OMEGA_Z_REF = 2 * math.pi * 554402.59802136082


def test_particle_mass_and_polarizability():
    mass, alpha = derive_particle(PhysicalConfig())
    assert mass == pytest.approx(MASS_REF, rel=1e-9)
    assert alpha == pytest.approx(ALPHA_REF, rel=1e-9)


def test_unit_permittivity_is_invisible():
    _, alpha = derive_particle(PhysicalConfig(eps_r=1.0))
    assert alpha == 0.0


def test_tweezer_fields_match_reference():
    tw = derive_tweezer(PhysicalConfig(), 1)
    assert tw.waist == pytest.approx(WAIST_REF, rel=1e-12)
    assert tw.eps_tw == pytest.approx(EPS_TW_REF, rel=1e-9)
    assert tw.omega[0] == pytest.approx(OMEGA_X_REF, rel=1e-9)
    assert tw.omega[1] == tw.omega[0]
    assert tw.omega[2] == pytest.approx(OMEGA_Z_REF, rel=1e-9)


def test_calibrated_waist_is_sqrt2_wider():
    paraxial = tweezer_waist(PhysicalConfig())
    calibrated = tweezer_waist(PhysicalConfig(waist_convention="calibrated"))
    assert calibrated / paraxial == pytest.approx(math.sqrt(2), rel=1e-14)
    assert tweezer_waist(PhysicalConfig(waist=1e-6)) == 1e-6


def test_zero_power_is_untrapped():
    tw = derive_tweezer(PhysicalConfig(power2=0.0), 2)
    assert not tw.trapped
    assert np.all(tw.omega == 0)
    d = derive_couplings(PhysicalConfig(power2=0.0, eps_cav=10.0))
    assert not d.all_trapped


def test_frequency_ratio_far_apart():
    # at 100 wavelengths the binding shifts are negligible: omega scales as sqrt(P)
    config = PhysicalConfig(separation=100 * LAMBDA, power1=0.8, power2=0.2, eps_cav=10.0)
    d = derive_couplings(config)
    ratio = d.omega_dressed[1, 0] / d.omega_dressed[0, 0]
    assert ratio == pytest.approx(math.sqrt(0.2 / 0.8), rel=1e-3)


def test_mirrored_labelling_relabels_particles():
    base = PhysicalConfig(power1=0.7, power2=0.4, eps_cav=20.0, detuning=1e6, kappa=1e5)
    mirrored = replace(base, power1=0.4, power2=0.7, x10=-base.separation / 2,
                       x20=base.separation / 2)
    a, b = derive_couplings(base), derive_couplings(mirrored)
    for name in ("omega_dressed", "g_tilde_x", "g_tilde_z", "g_tilde_ax", "x_zpf"):
        np.testing.assert_allclose(getattr(b, name), getattr(a, name)[::-1], rtol=1e-12)
    assert b.R_tilde == pytest.approx(-a.R_tilde, rel=1e-12)
    assert b.g_alpha == pytest.approx(-a.g_alpha, rel=1e-12)
    assert b.Omega_tilde == pytest.approx(a.Omega_tilde, rel=1e-12)


def test_bad_placement_rejected():
    with pytest.raises(ConfigError) as err:
        PhysicalConfig(x10=0.0, x20=-1e-6)
    assert err.value.code == "invalid_value"


@pytest.mark.parametrize("field,value", [("radius", -1.0), ("power1", -0.1),
                                         ("eps_r", 0.5), ("waist_convention", "other"),
                                         ("radius", 400e-9)])
def test_invalid_inputs(field, value):
    with pytest.raises(ConfigError):
        PhysicalConfig(**{field: value})


def test_couplings_scale_with_cavity_amplitude():
    one = derive_couplings(PhysicalConfig(eps_cav=10.0, detuning=1e6))
    two = derive_couplings(PhysicalConfig(eps_cav=20.0, detuning=1e6))
    np.testing.assert_allclose(two.g_tilde_x, 2 * one.g_tilde_x, rtol=1e-12)
    np.testing.assert_allclose(two.g_tilde_z, 2 * one.g_tilde_z, rtol=1e-12, atol=1e-30)
    np.testing.assert_allclose(two.g_tilde_ax, 4 * one.g_tilde_ax, rtol=1e-12, atol=1e-30)


def test_cavity_terms_vanish_without_cavity():
    d = derive_couplings(PhysicalConfig(eps_cav=0.0, detuning=1e6))
    assert np.all(d.g_tilde_x == 0) and np.all(d.g_tilde_z == 0)
    assert d.Omega_tilde == 0 and d.delta_prime == d.delta


def test_radiation_pressure_identity():
    # the binding-mediated part enters the two particles with opposite sign
    d = derive_couplings(PhysicalConfig(separation=2.4 * LAMBDA, eps_cav=15.0))
    np.testing.assert_allclose(d.g_tilde_ax - d.g_ax, [d.g_alpha, -d.g_alpha], rtol=1e-12)


def test_frequency_shift_vanishes_at_quadrature():
    # k D = 4.5 pi: cos(kD) = 0 removes the trap-frequency shift
    d = derive_couplings(PhysicalConfig(separation=2.25 * LAMBDA, eps_cav=10.0))
    np.testing.assert_allclose(d.nu, 0.0, atol=1e-12 * np.max(np.abs(d.k_bind)))


def test_nodes_give_real_x_and_zero_z_couplings():
    d = derive_couplings(PhysicalConfig())
    assert np.max(np.abs(d.g_tilde_z)) < 1e-9 * np.max(np.abs(d.g_tilde_x))
    assert np.max(np.abs(d.g_tilde_x.imag)) < 1e-9 * np.max(np.abs(d.g_tilde_x))


@pytest.mark.parametrize("convention", ["paraxial", "calibrated"])
def test_default_cavity_amplitude_calibration(convention):
    d = derive_couplings(PhysicalConfig(waist_convention=convention))
    ratio = math.sqrt(2) * abs(d.g_tilde_x[0]) * d.x_zpf[0] / d.omega_dressed[0, 0]
    assert ratio == pytest.approx(0.22, rel=1e-12)
    assert d.eps_cav == default_eps_cav(PhysicalConfig(waist_convention=convention))


def test_rate_ratios_use_first_frequency():
    d = derive_couplings(PhysicalConfig(detuning_ratio=0.9, kappa_ratio=0.3))
    assert d.delta == pytest.approx(0.9 * d.omega_dressed[0, 0], rel=1e-14)
    assert d.kappa == pytest.approx(0.3 * d.omega_dressed[0, 0], rel=1e-14)


def test_calibrated_axial_ratio():
    d = derive_couplings(reference_physical_config())
    bare = d.omega_bare[0, 2] / d.omega_bare[0, 0]
    assert bare == pytest.approx(0.40, abs=0.01)


@settings(max_examples=25, deadline=None)
@given(p1=st.floats(0.15, 1.0), p2=st.floats(0.15, 1.0))
def test_binding_coupling_is_symmetric_in_powers(p1, p2):
    config = reference_physical_config()
    grid = binding_coupling_grid(config, [p1, p2], [p2, p1])
    assert grid[0, 0] == pytest.approx(grid[1, 1], rel=1e-10)
    assert grid[0, 0] < 0
