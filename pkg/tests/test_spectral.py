"""Tests for the closed-form dispersion, dark-state and estimate helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.exceptions import SingularConfigurationError, ValidationError
from src.model import MediumParams
from src.spectral import (
    OPAQUE, PRESETS, STRUCTURAL_NONZEROS, Convention, ExperimentalSetup, Preset,
    build_matrix_M, dark_eigenvector, experimental_estimate, group_delay,
    group_velocity, interpolate_fidelity, kramers_kronig_imag, mixing_angle,
    scaling_laws, susceptibility, transmission_spectrum, transparency_metric,
)

from .helpers import medium

BOTH = [Convention.PAPER, Convention.CANONICAL]


class TestSusceptibility:
    def test_paper_resonant_value(self):
        assert susceptibility(0.0, medium(100.0), 0.0, Convention.PAPER) == pytest.approx(-50.0)

    def test_far_detuned_vanishes(self):
        for convention in BOTH:
            chi = susceptibility(0.0, medium(100.0), 1e12, convention)
            assert abs(chi) < 1e-18

    def test_canonical_resonant_transmission(self):
        t = transmission_spectrum(0.0, medium(3.0), 0.0, Convention.CANONICAL)
        assert t == pytest.approx(math.exp(-3.0), rel=1e-12)

    def test_empty_medium_is_transparent(self):
        omega = np.linspace(-50, 50, 101)
        for convention in BOTH:
            np.testing.assert_array_equal(
                transmission_spectrum(omega, medium(0.0), 5.0, convention), 1.0
            )

    def test_transparent_window_level(self):
        t = transmission_spectrum(0.0, medium(100.0), 100.0, Convention.CANONICAL)
        estimate = math.exp(-100.0 / 100.0 ** 2)
        assert 0.5 * estimate < t < 1.5 * estimate

    def test_two_absorption_lines(self):
        delta = 20.0
        omega = np.linspace(-3 * delta, 3 * delta, 6001)
        t = transmission_spectrum(omega, medium(10.0), delta, Convention.CANONICAL)
        interior = t[1:-1]
        minima = omega[1:-1][(interior < t[:-2]) & (interior < t[2:])]
        assert len(minima) == 2
        assert minima[0] == pytest.approx(-delta, rel=0.05)
        assert minima[1] == pytest.approx(delta, rel=0.05)

    @settings(max_examples=20, deadline=None)
    @given(b=st.floats(0.0, 1e4), delta=st.floats(0.0, 500.0))
    def test_passive_medium(self, b, delta):
        omega = np.linspace(-3 * delta - 10, 3 * delta + 10, 1000)
        for convention in BOTH:
            chi = susceptibility(omega, medium(b), delta, convention)
            assert np.all(np.real(chi) <= 0.0)

    def test_lossless_line_center_is_singular(self):
        lossless = medium(10.0, decay_scale=0.0)
        with pytest.raises(SingularConfigurationError):
            susceptibility(0.0, lossless, 0.0, Convention.CANONICAL)
        with pytest.raises(SingularConfigurationError):
            susceptibility(np.array([-5.0, 0.0, 5.0]), lossless, 5.0, Convention.CANONICAL)
        chi = susceptibility(1.0, lossless, 5.0, Convention.CANONICAL)
        assert np.isfinite(chi)
        assert chi.real == 0.0

    def test_symmetric_transmission(self):
        omega = np.linspace(0, 200, 401)
        for convention in BOTH:
            plus = transmission_spectrum(omega, medium(50.0), 30.0, convention)
            minus = transmission_spectrum(-omega, medium(50.0), 30.0, convention)
            np.testing.assert_allclose(plus, minus, rtol=1e-12)

    def test_kramers_kronig_consistency(self):
        delta = 20.0
        omega = np.arange(-2000.0, 2000.0 + 0.025, 0.05)
        chi = susceptibility(omega, medium(10.0), delta, Convention.CANONICAL)
        implied = kramers_kronig_imag(omega, np.real(chi))
        window = np.abs(omega) <= delta / 2
        scale = np.max(np.abs(np.imag(chi[window])))
        assert np.max(np.abs(implied[window] - np.imag(chi[window]))) < 0.02 * scale

    def test_kramers_kronig_needs_uniform_grid(self):
        omega = np.concatenate([np.linspace(0, 1, 10), [5.0]])
        with pytest.raises(ValidationError):
            kramers_kronig_imag(omega, np.zeros_like(omega))

    def test_negative_splitting_rejected(self):
        with pytest.raises(ValidationError, match="delta"):
            susceptibility(0.0, medium(1.0), -1.0, Convention.CANONICAL)


class TestGroupDelay:
    @pytest.mark.parametrize("delta,expected", [(3600.0, 4.63e-3), (2000.0, 1.5e-2)])
    def test_paper_values(self, delta, expected):
        delay = group_delay(medium(6e4), delta, Convention.PAPER)
        assert delay == pytest.approx(expected, rel=1e-3)

    def test_zero_splitting_is_singular(self):
        for convention in BOTH:
            with pytest.raises(SingularConfigurationError):
                group_delay(medium(10.0), 0.0, convention)

    @pytest.mark.parametrize("b,delta", [(10.0, 100.0), (100.0, 300.0), (1000.0, 1000.0)])
    def test_conventions_differ_by_constant(self, b, delta):
        params = medium(b)
        paper = group_delay(params, delta, Convention.PAPER)
        assert group_delay(params, delta, Convention.CANONICAL) / paper == pytest.approx(0.25, rel=1e-3)
        assert group_delay(params, delta, Convention.CANONICAL, lossless=True) / paper == pytest.approx(0.25, rel=1e-12)

    def test_transparency_metric(self):
        assert transparency_metric(medium(200.0), 23.0) == pytest.approx(0.378, rel=1e-3)
        assert transparency_metric(medium(200.0), 0.0) == OPAQUE


class TestMixingAngle:
    def test_limits(self):
        params = medium(100.0)
        for convention in BOTH:
            assert mixing_angle(params, 0.0, convention) == (0.0, 1.0)
            assert mixing_angle(params, math.inf, convention) == (1.0, 0.0)

    def test_group_velocity_identity(self):
        params = MediumParams(gamma=1e5, optical_depth=100.0, length=0.01)
        delta = 40.0
        lossless = group_delay(params, delta, Convention.CANONICAL, lossless=True)
        expected = params.light_speed / (1.0 + lossless / params.transit_time)
        assert group_velocity(params, delta) == pytest.approx(expected, rel=1e-12)

    def test_paper_tangent(self):
        params = MediumParams(gamma=1.0, optical_depth=2.0, length=1.0, light_speed=3.0)
        cos_theta, sin_theta = mixing_angle(params, 4.0, Convention.PAPER)
        assert sin_theta / cos_theta == pytest.approx(2.0 * 3.0 / 4.0, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(b=st.floats(0.0, 1e6), delta=st.floats(1e-3, 1e5))
    def test_unit_norm(self, b, delta):
        params = MediumParams(gamma=1e5, optical_depth=b, length=1e-3)
        for convention in BOTH:
            c, s = mixing_angle(params, delta, convention)
            assert c * c + s * s == pytest.approx(1.0, abs=1e-12)


class TestDarkState:
    def test_zero_parameters_give_zero_matrix(self):
        assert not np.any(build_matrix_M(0.0, 0.0, 0.0).matrix)

    def test_splitting_entries(self):
        m = build_matrix_M(0.0, 1.0, 3.0, gamma_term=-0.5j).matrix
        assert m[2, 4] == 3j
        assert m[4, 2] == -3j
        np.testing.assert_array_equal(np.diag(m)[2:], -0.5j)

    def test_structural_nonzeros(self):
        m = build_matrix_M(0.7, 1.3, 2.1, gamma_term=-0.5j).matrix
        rows, cols = np.nonzero(m)
        assert set(zip(rows.tolist(), cols.tolist())) == set(STRUCTURAL_NONZEROS)

    def test_equal_coupling_and_splitting(self):
        dark = dark_eigenvector(build_matrix_M(0.0, 2.0, 2.0))
        v = dark.eigenvector
        assert abs(v[2]) / abs(v[1]) == pytest.approx(1.0, rel=1e-10)
        assert dark.cos_theta == pytest.approx(dark.sin_theta, rel=1e-10)

    def test_large_splitting_is_photonic(self):
        v = dark_eigenvector(build_matrix_M(0.0, 1.0, 1e6)).eigenvector
        assert abs(v[1]) > 1 - 1e-6

    def test_sweep_ratio_and_continuity(self):
        previous = None
        for delta in np.logspace(-1, 2, 200):
            m = build_matrix_M(0.0, 1.0, float(delta))
            dark = dark_eigenvector(m)
            v = dark.eigenvector
            assert np.linalg.norm(m.matrix @ v) < 1e-12 * m.norm
            assert abs(v[2]) / abs(v[1]) == pytest.approx(1.0 / delta, rel=1e-10)
            if previous is not None:
                assert abs(np.vdot(previous, v)) > 0.999
            previous = v

    def test_requires_zero_wavevector(self):
        with pytest.raises(ValidationError):
            dark_eigenvector(build_matrix_M(1.0, 1.0, 1.0))


class TestEstimates:
    def test_scaling_laws(self):
        laws = scaling_laws(100.0)
        assert laws.bandwidth_bound == pytest.approx(10.0)
        assert laws.min_splitting == pytest.approx(10.0)
        assert laws.efficiency_estimate == 1.0
        assert scaling_laws(4.0, efficiency_prefactor=0.3).efficiency_estimate == pytest.approx(0.6)
        assert scaling_laws(0.0).bandwidth_bound == 0.0
        with pytest.raises(ValidationError):
            scaling_laws(-1.0)

    def test_strontium_preset(self):
        report = experimental_estimate("sr")
        assert report.b == pytest.approx(200.0, rel=1e-12)
        assert 10.0 <= report.v_g <= 1000.0
        assert report.transparency == pytest.approx(0.378, rel=1e-3)
        assert report.fidelity_estimate is None

    def test_crystal_preset(self):
        report = experimental_estimate(Preset.PRYSO)
        assert report.b == 32.0
        assert report.tau == pytest.approx(1.0 / (2 * math.pi * 24e3 * math.sqrt(32.0)))

    def test_custom_setup_with_curve(self):
        setup = ExperimentalSetup(
            name="lab", gamma=1e5, length=0.01, delta_over_gamma=20.0, optical_depth=50.0
        )
        curve = [(10.0, 0.4), (100.0, 0.8)]
        report = experimental_estimate(setup, curve)
        assert report.fidelity_estimate == pytest.approx(0.4 + 0.4 * math.log(5) / math.log(10))

    def test_interpolation_clamps(self, caplog):
        assert interpolate_fidelity(1e6, [(10.0, 0.4), (100.0, 0.8)]) == pytest.approx(0.8)
        assert "clamping" in caplog.text

    @pytest.mark.parametrize("preset", list(Preset))
    def test_group_velocity_has_one_definition(self, preset):
        setup = PRESETS[preset]
        report = experimental_estimate(preset)
        expected = group_velocity(setup.medium(), setup.delta_over_gamma)
        assert report.v_g == pytest.approx(expected, rel=1e-12)
        assert interpolate_fidelity(5.0, []) is None

    def test_unknown_preset(self):
        with pytest.raises(ValidationError, match="preset"):
            experimental_estimate("rubidium")
