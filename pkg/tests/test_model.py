import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrormag import (
    CANONICAL_ORDERING,
    PhysicalParams,
    build_system_matrices,
    derive_params,
    effective_frequency,
    mean_occupation,
)
from mirrormag.model import HBAR, KBOLTZ

TWO_PI = 2.0 * math.pi

# Frozen oracle values for the reference parameter set at the default
# operating point (delta_m = delta_a = +omega_phi), evaluated independently
# with 40-digit arithmetic from the same defining formulas.
REF_G = 868.4680609348485          # single-photon coupling, rad/s
REF_GAMMA_A = 94182578.36544266    # cavity decay, rad/s
REF_EPS = 6197113227263.442        # drive amplitude, 1/s
REF_AS = 56155.14485317689         # |steady field|
REF_BIG_G = 68969710.17633042      # enhanced coupling, rad/s
REF_NBAR = 20836.11914009394      # occupation at 10 K, 2pi x 10 MHz


class TestDeriveParams:
    def test_inertia_hand_value(self, reference_params):
        derived = derive_params(reference_params)
        assert derived.inertia == pytest.approx((2.0e-21, 2.0e-21), rel=1e-14)

    def test_mirror_damping(self, reference_params):
        derived = derive_params(reference_params)
        expected = TWO_PI * 10e6 / 2e6  # ~31.4 rad/s
        assert derived.mirror_damping[0] == pytest.approx(expected, rel=1e-14)

    def test_reference_coefficients_match_independent_evaluation(
            self, reference_params):
        derived = derive_params(reference_params)
        assert derived.opto_coupling[0] == pytest.approx(REF_G, rel=1e-12)
        assert derived.cavity_decay[0] == pytest.approx(REF_GAMMA_A, rel=1e-12)
        assert derived.drive_amplitude[0] == pytest.approx(REF_EPS, rel=1e-12)
        assert abs(derived.steady_field[0]) == pytest.approx(REF_AS, rel=1e-12)
        assert derived.enhanced_coupling[0] == pytest.approx(REF_BIG_G, rel=1e-12)
        assert derived.occupation[0] == pytest.approx(REF_NBAR, rel=1e-10)

    def test_enhanced_coupling_definition(self, reference_params):
        derived = derive_params(reference_params)
        for j in range(2):
            expected = math.sqrt(2) * derived.opto_coupling[j] * abs(
                derived.steady_field[j])
            assert derived.enhanced_coupling[j] == pytest.approx(expected,
                                                                 rel=1e-14)

    def test_decoupled_magnon(self, reference_params):
        derived = derive_params(reference_params.replace(g_ma=0.0))
        assert derived.magnon_selfenergy == (0.0, 0.0)
        assert derived.steady_magnon == 0.0

    def test_omega_eff_defaults_to_omega_phi(self, reference_params):
        derived = derive_params(reference_params)
        assert derived.omega_eff == reference_params.omega_phi

    def test_effective_mode_passes_detuning_through(self, reference_params):
        derived = derive_params(reference_params)
        assert derived.eff_detuning == reference_params.delta_a

    def test_bare_fixed_point_converges(self, reference_params):
        params = reference_params.replace(detuning_mode="bare_fixed_point")
        derived = derive_params(params)
        for j in range(2):
            shift = derived.opto_coupling[j] * derived.steady_angle[j]
            # self-consistency residual bounded by the stopping tolerance
            residual = abs(derived.eff_detuning[j]
                           - (params.delta_a[j] - shift))
            assert residual <= 1e-6 * params.omega_phi[j]
            assert shift > 0.0  # the spring shift is real and was applied

    def test_occupation_zero_at_zero_temperature(self, reference_params):
        derived = derive_params(reference_params.replace(temperature=0.0))
        assert derived.occupation == (0.0, 0.0)


class TestValidation:
    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError, match="mirror_mass"):
            PhysicalParams(mirror_mass=-1e-12)

    def test_small_oam_rejected(self):
        with pytest.raises(ValueError, match="oam_l"):
            PhysicalParams(oam_l=0)

    def test_non_integer_oam_rejected(self):
        with pytest.raises(ValueError, match="oam_l"):
            PhysicalParams(oam_l=1.5)

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError, match="temperature"):
            PhysicalParams(temperature=-0.1)

    def test_unknown_detuning_mode_rejected(self):
        with pytest.raises(ValueError, match="detuning_mode"):
            PhysicalParams(detuning_mode="exact")

    def test_negative_detuning_allowed(self):
        PhysicalParams(delta_a=-TWO_PI * 10e6, delta_m=-TWO_PI * 1e6)


class TestMeanOccupation:
    def test_zero_temperature(self):
        assert mean_occupation(0.0, TWO_PI * 10e6) == 0.0

    def test_analytic_point_ln2(self):
        # hbar omega / kB T = ln 2  =>  nbar = 1
        omega = TWO_PI * 10e6
        temperature = HBAR * omega / (KBOLTZ * math.log(2.0))
        assert mean_occupation(temperature, omega) == pytest.approx(1.0,
                                                                    rel=1e-12)

    def test_high_temperature_expansion(self):
        omega = TWO_PI * 10e6
        nbar = mean_occupation(10.0, omega)
        classical = KBOLTZ * 10.0 / (HBAR * omega) - 0.5
        assert nbar == pytest.approx(classical, rel=1e-3)

    @given(temperature=st.floats(1e-6, 1e4), omega=st.floats(1e3, 1e12))
    @settings(max_examples=50, deadline=None)
    def test_nonnegative(self, temperature, omega):
        assert mean_occupation(temperature, omega) >= 0.0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            mean_occupation(1.0, 0.0)
        with pytest.raises(ValueError):
            mean_occupation(-1.0, 1.0)


class TestEffectiveFrequency:
    def test_zero_coupling_returns_bare(self, reference_params):
        derived = derive_params(reference_params)
        got = effective_frequency(reference_params, derived,
                                  omega=TWO_PI * 10e6, xi_phi=0.0)
        assert got == reference_params.omega_phi[0]

    def test_zero_power_returns_bare(self, reference_params):
        derived = derive_params(reference_params)
        got = effective_frequency(reference_params, derived,
                                  omega=TWO_PI * 10e6, xi_phi=1e-10,
                                  input_power=0.0)
        assert got == reference_params.omega_phi[0]

    def test_shift_linear_in_power(self, reference_params):
        derived = derive_params(reference_params)
        w0 = reference_params.omega_phi[0]

        def deficit(power):
            w = effective_frequency(reference_params, derived,
                                    omega=0.5 * w0, xi_phi=1e-12,
                                    input_power=power)
            return w0**2 - w**2

        d1, d2 = deficit(10e-3), deficit(20e-3)
        assert d1 != 0.0
        assert d2 / d1 == pytest.approx(2.0, rel=1e-2)

    def test_negative_radicand_reported(self, reference_params):
        derived = derive_params(reference_params)
        with pytest.raises(ValueError, match="negative"):
            effective_frequency(reference_params, derived,
                                omega=TWO_PI * 10e6, xi_phi=1.0)


def _stated_equations_rhs(u, params, derived):
    """The linearized equations written out directly (test-side oracle)."""
    phi1, lz1, phi2, lz2, x1, y1, x2, y2, mx, my = u
    p, d = params, derived
    out = np.empty(10)
    out[0] = p.omega_phi[0] * lz1
    out[1] = (-p.omega_phi[0] * phi1 - d.mirror_damping[0] * lz1
              + d.enhanced_coupling[0] * x1)
    out[2] = p.omega_phi[1] * lz2
    out[3] = (-p.omega_phi[1] * phi2 - d.mirror_damping[1] * lz2
              + d.enhanced_coupling[1] * x2)
    out[4] = (d.eff_detuning[0] * y1 - d.cavity_decay[0] * x1
              + p.g_ma[0] * my)
    out[5] = (-d.eff_detuning[0] * x1 - d.cavity_decay[0] * y1
              - p.g_ma[0] * mx + d.enhanced_coupling[0] * phi1)
    out[6] = (d.eff_detuning[1] * y2 - d.cavity_decay[1] * x2
              + p.g_ma[1] * my)
    out[7] = (-d.eff_detuning[1] * x2 - d.cavity_decay[1] * y2
              - p.g_ma[1] * mx + d.enhanced_coupling[1] * phi2)
    out[8] = (p.delta_m * my - p.gamma_m * mx
              + p.g_ma[0] * y1 + p.g_ma[1] * y2)
    out[9] = (-p.delta_m * mx - p.gamma_m * my
              - p.g_ma[0] * x1 - p.g_ma[1] * x2)
    return out


class TestBuildSystemMatrices:
    def test_matches_finite_difference_jacobian(self, reference_params,
                                                reference_matrices):
        derived = derive_params(reference_params)
        A = reference_matrices.drift
        jac = np.empty((10, 10))
        h = 1.0  # dynamics is linear; central differences are exact
        for j in range(10):
            e = np.zeros(10)
            e[j] = h
            jac[:, j] = (_stated_equations_rhs(e, reference_params, derived)
                         - _stated_equations_rhs(-e, reference_params,
                                                 derived)) / (2 * h)
        scale = np.abs(A).max()
        assert np.abs(A - jac).max() <= 1e-8 * scale

    def test_coupling_entry_y1_phi1(self, reference_params,
                                    reference_matrices):
        derived = derive_params(reference_params)
        row = CANONICAL_ORDERING.index("Y1")
        col = CANONICAL_ORDERING.index("phi1")
        assert reference_matrices.drift[row, col] == derived.enhanced_coupling[0]

    def test_decoupled_oscillator_spectrum(self, reference_params):
        derived = dataclasses.replace(derive_params(reference_params),
                                      enhanced_coupling=(0.0, 0.0))
        params = reference_params.replace(g_ma=0.0)
        mats = build_system_matrices(derived, params)
        eigs = np.sort_complex(np.linalg.eigvals(mats.drift))

        expected = []
        for j in range(2):
            w, g = params.omega_phi[j], derived.mirror_damping[j]
            root = math.sqrt(w * w - g * g / 4.0)
            expected += [-g / 2 + 1j * root, -g / 2 - 1j * root]
            ga, dj = derived.cavity_decay[j], derived.eff_detuning[j]
            expected += [-ga + 1j * dj, -ga - 1j * dj]
        expected += [-params.gamma_m + 1j * params.delta_m,
                     -params.gamma_m - 1j * params.delta_m]
        expected = np.sort_complex(np.array(expected))
        assert np.allclose(eigs, expected, rtol=1e-9, atol=1e-3)

    def test_drive_phase_gauged_away(self, reference_params,
                                     reference_matrices):
        derived = derive_params(reference_params)
        rotated = dataclasses.replace(
            derived,
            steady_field=tuple(a * np.exp(1j * t)
                               for a, t in zip(derived.steady_field,
                                               (0.7, -1.3))),
        )
        mats = build_system_matrices(rotated, reference_params)
        assert np.array_equal(mats.drift, reference_matrices.drift)

    def test_gma_zero_decouples_magnon(self, reference_params):
        base = reference_params.replace(g_ma=0.0)
        m1 = build_system_matrices(derive_params(base), base)
        shifted = base.replace(delta_m=TWO_PI * 3e6)
        m2 = build_system_matrices(derive_params(shifted), shifted)
        # magnon rows/cols carry no coupling
        assert np.all(m1.drift[8:, :8] == 0.0)
        assert np.all(m1.drift[:8, 8:] == 0.0)
        # the 8x8 mirror+cavity block is independent of the magnon detuning
        assert np.array_equal(m1.drift[:8, :8], m2.drift[:8, :8])

    def test_diffusion_diagonal(self, reference_params, reference_matrices):
        derived = derive_params(reference_params)
        D = reference_matrices.diffusion
        expected = np.diag([
            0.0,
            derived.mirror_damping[0] * (2 * derived.occupation[0] + 1),
            0.0,
            derived.mirror_damping[1] * (2 * derived.occupation[1] + 1),
            derived.cavity_decay[0], derived.cavity_decay[0],
            derived.cavity_decay[1], derived.cavity_decay[1],
            reference_params.gamma_m, reference_params.gamma_m,
        ])
        assert np.array_equal(D, expected)
        assert D[0, 0] == 0.0 and D[2, 2] == 0.0
        assert np.all(np.diag(D) >= 0.0)
        assert np.array_equal(D, np.diag(np.diag(D)))

    def test_build_is_deterministic_bitwise(self, reference_params):
        d1 = derive_params(reference_params)
        d2 = derive_params(reference_params)
        m1 = build_system_matrices(d1, reference_params)
        m2 = build_system_matrices(d2, reference_params)
        assert np.array_equal(m1.drift, m2.drift)
        assert np.array_equal(m1.diffusion, m2.diffusion)

    def test_ordering_is_canonical(self, reference_matrices):
        assert reference_matrices.ordering == CANONICAL_ORDERING
