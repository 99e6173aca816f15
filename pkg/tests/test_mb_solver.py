"""Tests for the Maxwell-Bloch integrator, storage runs and frame conversions."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.exceptions import DivergenceError, MissingSnapshotsError, ValidationError
from src.mb_solver import (
    SimState, convert_result, default_grid, five_var_check, polariton_field,
    run_storage, simulate, to_stark_frame, to_zeeman_frame, validate_grid,
)
from src.metrics import energy_balance, fidelity
from src.model import Constant, MediumParams, ProbePulse, SchemeVariant, SimGrid, StepStore
from src.spectral import Convention, susceptibility

from .helpers import medium

STORE_PULSE = ProbePulse(sigma_tau=0.002, t_center=0.01)
STORE_GRID = SimGrid(nz=200, nt=5001, t_max=0.05)
STORE_DELTA = 5000.0
T_OFF, T_ON = 0.018, 0.031
# output burst after a sudden switch-off, in pulse widths
SWITCH_TRANSIENT = 0.5


def _energy(values, t):
    return float(trapezoid(np.abs(values) ** 2, t))


@pytest.fixture(scope="module")
def stored():
    return run_storage(medium(1.6e6), STORE_DELTA, T_OFF, T_ON, STORE_PULSE, STORE_GRID)


class TestPropagation:
    def test_empty_medium_passes_input_through(self, free_result):
        np.testing.assert_array_equal(free_result.e_out, free_result.e_in)
        np.testing.assert_allclose(
            free_result.e_in, free_result.pulse.field_y(free_result.t_grid), rtol=1e-14
        )

    def test_resonant_absorption_level(self):
        pulse = ProbePulse(sigma_tau=40.0, t_center=200.0)
        result = simulate(medium(2.0), Constant(0.0), pulse, SimGrid.from_step(0.25, 400.0, 50))
        ratio = np.max(np.abs(result.e_out) ** 2) / np.max(np.abs(result.e_in) ** 2)
        assert ratio == pytest.approx(math.exp(-2.0), rel=0.01)

    def test_matches_frequency_domain_transfer(self, short_pulse):
        params = medium(10.0)
        grid = SimGrid.from_step(0.005, 16.0, 200)
        result = simulate(params, Constant(10.0), short_pulse, grid, snapshots=False)

        omega = 2 * np.pi * np.fft.fftfreq(grid.nt, grid.dt)
        # numpy's e^{+iΩt} components are e^{-iωt} components with ω = -Ω
        chi = susceptibility(-omega, params, 10.0, Convention.CANONICAL)
        expected = np.fft.ifft(np.fft.fft(result.e_in) * np.exp(chi))

        peak = np.max(np.abs(result.e_out))
        assert np.max(np.abs(result.e_out - expected)) < 0.01 * peak

    def test_zeeman_and_stark_agree(self, short_pulse, short_grid):
        params = medium(10.0)
        zeeman = simulate(params, Constant(10.0), short_pulse, short_grid)
        stark = simulate(params, Constant(10.0), short_pulse, short_grid, SchemeVariant.STARK)
        peak = np.max(np.abs(zeeman.e_out))
        assert np.max(np.abs(zeeman.e_out - stark.e_out)) <= 1e-10 * peak

        converted = to_stark_frame(zeeman).snapshots.data
        for name in ("sigma_1", "sigma_2"):
            ref = stark.snapshots.data[name]
            assert np.max(np.abs(converted[name] - ref)) <= 1e-10 * np.max(np.abs(ref))

    @pytest.mark.parametrize("factor", [2.0, 2.0 - 0.5j, 1j])
    def test_linear_in_amplitude(self, short_pulse, short_grid, factor):
        params = medium(10.0)
        one = simulate(params, Constant(10.0), short_pulse, short_grid, snapshots=False)
        scaled = simulate(params, Constant(10.0), short_pulse.scaled(factor), short_grid, snapshots=False)
        peak = np.max(np.abs(scaled.e_out))
        np.testing.assert_allclose(scaled.e_out, factor * one.e_out, rtol=1e-12, atol=1e-14 * peak)

    def test_longer_horizon_keeps_the_prefix(self, short_pulse):
        params = medium(10.0)
        short = simulate(params, Constant(10.0), short_pulse, SimGrid.from_step(0.005, 3.0, 50))
        long = simulate(params, Constant(10.0), short_pulse, SimGrid.from_step(0.005, 6.0, 50))
        n = short.grid.nt
        peak = np.max(np.abs(long.e_out))
        np.testing.assert_allclose(short.e_out, long.e_out[:n], rtol=1e-12, atol=1e-12 * peak)

    def test_zero_input_stays_zero(self, short_grid):
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0, amplitude=0.0)
        result = simulate(medium(10.0), Constant(10.0), pulse, short_grid)
        assert not np.any(result.e_out)
        assert not np.any(result.snapshots.data["sigma_z"])

    def test_divergence_is_reported(self, short_pulse):
        pulse = short_pulse.scaled(1e308)
        with np.errstate(all="ignore"), pytest.raises(DivergenceError) as err:
            simulate(medium(100.0), Constant(10.0), pulse, SimGrid.from_step(0.005, 4.0, 20))
        assert err.value.step > 0

    def test_diagnostics_and_trace(self, short_pulse, short_grid):
        schedule = StepStore(delta0=10.0, t_off=2.5, t_on=3.5)
        result = simulate(medium(10.0), schedule, short_pulse, short_grid)
        assert result.diagnostics.steps == short_grid.nt - 1
        assert np.isfinite(result.diagnostics.max_residual)
        assert set(np.unique(result.delta_trace)) == {0.0, 10.0}
        assert result.snapshots.times[-1] == short_grid.t_max


class TestGridValidation:
    def test_coarse_step_against_pulse(self, short_pulse):
        with pytest.raises(ValidationError, match="sigma_tau"):
            validate_grid(medium(10.0), Constant(0.0), short_pulse, SimGrid.from_step(0.02, 6.0, 50))

    def test_coarse_step_against_splitting(self, short_pulse):
        with pytest.raises(ValidationError, match="delta0"):
            validate_grid(medium(10.0), Constant(10.0), short_pulse, SimGrid.from_step(0.012, 6.0, 50))

    def test_stiff_optical_depth(self):
        pulse = ProbePulse(sigma_tau=1.0, t_center=5.0)
        with pytest.raises(ValidationError) as err:
            validate_grid(medium(1e6), Constant(0.0), pulse, SimGrid.from_step(0.05, 10.0, 3))
        assert err.value.field == "nz"

    def test_default_grid_policy(self, short_pulse):
        grid = default_grid(short_pulse, Constant(10.0), 6.0)
        assert grid.nz == 400
        assert grid.dt <= 0.005 * (1 + 1e-12)
        validate_grid(medium(10.0), Constant(10.0), short_pulse, grid)

    def test_missing_horizon(self, short_pulse):
        with pytest.raises(ValidationError, match="t_max"):
            simulate(medium(1.0), Constant(1.0), short_pulse)


class TestEnergy:
    def test_lossless_balance(self):
        params = medium(100.0, decay_scale=0.0)
        pulse = ProbePulse(sigma_tau=0.2, t_center=1.0)
        grid = SimGrid(nz=200, nt=1001, t_max=2.0, snapshot_stride=10)
        report = energy_balance(simulate(params, Constant(30.0), pulse, grid))
        assert report.residual < 5e-3
        assert report.stored_atomic[-1] > 0

    def test_empty_medium_balance(self, free_result):
        report = energy_balance(free_result)
        assert report.residual < 1e-6
        assert not np.any(report.stored_atomic)
        np.testing.assert_array_equal(report.energy_in, report.energy_out)

    def test_needs_snapshots(self, short_pulse):
        result = simulate(
            medium(1.0), Constant(0.0), short_pulse, SimGrid.from_step(0.01, 4.0, 10),
            snapshots=False,
        )
        with pytest.raises(MissingSnapshotsError):
            energy_balance(result)


class TestFrames:
    def test_symmetric_classes_map_to_sigma_y(self):
        s = np.array([1.0 + 2.0j, -0.5j, 3.0])
        state = SimState(
            SchemeVariant.STARK, 0.0, {"E_y": np.zeros(3, complex)},
            {"sigma_1": s.copy(), "sigma_2": s.copy()},
        )
        zeeman = to_zeeman_frame(state)
        np.testing.assert_allclose(zeeman.atomic["sigma_y"], math.sqrt(2) * s, rtol=1e-14)
        np.testing.assert_array_equal(zeeman.atomic["sigma_z"], 0)

    def test_antisymmetric_classes_map_to_sigma_z(self):
        s = np.array([1.0, 2.0j])
        state = SimState(
            SchemeVariant.STARK, 0.0, {"E_y": np.zeros(2, complex)},
            {"sigma_1": -s, "sigma_2": s.copy()},
        )
        zeeman = to_zeeman_frame(state)
        np.testing.assert_array_equal(zeeman.atomic["sigma_y"], 0)
        np.testing.assert_allclose(zeeman.atomic["sigma_z"], -1j * math.sqrt(2) * s, rtol=1e-14)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        sy = rng.normal(size=64) + 1j * rng.normal(size=64)
        sz = rng.normal(size=64) + 1j * rng.normal(size=64)
        state = SimState(
            SchemeVariant.ZEEMAN, 1.0, {"E_y": np.zeros(64, complex)},
            {"sigma_y": sy, "sigma_z": sz},
        )
        back = to_zeeman_frame(to_stark_frame(state))
        np.testing.assert_allclose(back.atomic["sigma_y"], sy, rtol=0, atol=1e-14 * np.max(np.abs(sy)))
        np.testing.assert_allclose(back.atomic["sigma_z"], sz, rtol=0, atol=1e-14 * np.max(np.abs(sz)))

    def test_grid_mismatch(self):
        state = SimState(
            SchemeVariant.STARK, 0.0, {"E_y": np.zeros(5, complex)},
            {"sigma_1": np.zeros(5, complex), "sigma_2": np.zeros(6, complex)},
        )
        with pytest.raises(ValidationError):
            to_zeeman_frame(state)

    def test_wrong_direction(self, free_result):
        with pytest.raises(ValidationError):
            convert_result(free_result, SchemeVariant.ZEEMAN)


class TestFiveVariable:
    def test_y_input_leaves_x_dark(self, short_pulse, short_grid):
        schedule = StepStore(delta0=10.0, t_off=2.5, t_on=3.5)
        report = five_var_check(medium(10.0), schedule, short_pulse, short_grid)
        assert report.passed, report.errors
        assert report.max_ex_ratio == 0.0
        assert report.max_sx_ratio == 0.0
        assert report.ey_mismatch < 1e-12

    def test_zero_input(self, short_grid):
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0, amplitude=0.0)
        assert five_var_check(medium(10.0), Constant(10.0), pulse, short_grid).passed

    def test_x_input_leaves_y_dark(self, short_grid):
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0, pol_x=1.0, pol_y=0.0)
        result = simulate(medium(10.0), Constant(10.0), pulse, short_grid, SchemeVariant.FULL)
        assert not np.any(result.snapshots.data["E_y"])
        assert not np.any(result.snapshots.data["sigma_z"])
        assert np.max(np.abs(result.e_out_x)) > 0

    def test_rejects_x_polarized_pulse(self, short_grid):
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0, pol_x=0.6, pol_y=0.8)
        with pytest.raises(ValidationError, match="pol_x"):
            five_var_check(medium(10.0), Constant(10.0), pulse, short_grid)


class TestStorage:
    def test_retrieval_fidelity(self, stored):
        assert fidelity(stored).fidelity >= 0.8

    def test_pulse_inside_at_switch_off(self, stored):
        assert stored.diagnostics.entered_fraction > 0.99

    def test_nothing_leaves_while_stored(self, stored):
        t = stored.t_grid
        peak = np.max(np.abs(stored.e_in) ** 2)
        intensity = np.abs(stored.e_out) ** 2 / peak
        settled = T_OFF + SWITCH_TRANSIENT * STORE_PULSE.sigma_tau
        assert np.max(intensity[(t >= settled) & (t < T_ON)]) < 1e-3
        # the sudden switch releases a short burst before the output settles
        assert np.max(intensity[(t >= T_OFF) & (t < settled)]) < 0.3

    def test_polariton_is_atomic_while_stored(self, stored):
        record = polariton_field(stored)
        inside = (record.times > T_OFF) & (record.times < T_ON)
        assert np.any(inside)
        np.testing.assert_array_equal(
            record.psi[inside], 1j * stored.snapshots.data["sigma_z"][inside]
        )

    def test_stored_forever(self):
        result = run_storage(
            medium(1.6e6), STORE_DELTA, T_OFF, math.inf, STORE_PULSE, STORE_GRID,
            snapshots=False,
        )
        t = result.t_grid
        assert _energy(result.e_out, t) < 0.05 * _energy(result.e_in, t)

    def test_no_splitting_absorbs(self):
        pulse = ProbePulse(sigma_tau=10.0, t_center=50.0)
        result = run_storage(
            medium(20.0), 0.0, 60.0, 70.0, pulse, SimGrid.from_step(0.25, 120.0, 50),
            snapshots=False,
        )
        t = result.t_grid
        assert _energy(result.e_out, t) < 1e-6 * _energy(result.e_in, t)

    def test_grid_refinement(self, stored):
        fine = run_storage(
            medium(1.6e6), STORE_DELTA, T_OFF, T_ON, STORE_PULSE,
            SimGrid(nz=399, nt=10001, t_max=0.05), snapshots=False,
        )
        assert abs(fidelity(fine).fidelity - fidelity(stored).fidelity) < 1e-3

    def test_early_switch_warns(self):
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0)
        with pytest.warns(RuntimeWarning, match="t_off"):
            run_storage(
                medium(10.0), 10.0, 1.5, 3.0, pulse, SimGrid.from_step(0.005, 5.0, 20),
                snapshots=False,
            )


class TestPolariton:
    def test_far_detuned_is_photonic(self):
        params = MediumParams(gamma=1.0, optical_depth=1.0, length=1.0, light_speed=1.0)
        pulse = ProbePulse(sigma_tau=0.3, t_center=2.0)
        result = simulate(params, Constant(100.0), pulse, SimGrid.from_step(5e-4, 4.0, 50))
        record = polariton_field(result)
        e_y = result.snapshots.data["E_y"]
        assert np.max(np.abs(record.psi - e_y)) <= 1e-2 * np.max(np.abs(e_y))

    def test_balanced_mixing_is_dark(self):
        # L/c equals the lossless delay b/(4Δ²): θ = π/4
        params = MediumParams(
            gamma=1.0, optical_depth=100.0, length=1.0, light_speed=16.0, decay_scale=0.0
        )
        pulse = ProbePulse(sigma_tau=2.0, t_center=10.0)
        grid = SimGrid.from_step(0.005, 20.0, 50, snapshot_stride=40)
        result = simulate(params, Constant(20.0), pulse, grid)
        record = polariton_field(result)

        np.testing.assert_allclose(record.cos_theta, math.sqrt(0.5), rtol=1e-12)
        np.testing.assert_allclose(record.sin_theta, math.sqrt(0.5), rtol=1e-12)
        assert np.max(np.abs(record.bright)) < 0.05 * np.max(np.abs(record.psi))

        report = energy_balance(result)
        peak = int(np.argmax(record.excitation))
        stored_total = report.stored_field[peak] + report.stored_atomic[peak]
        assert record.excitation[peak] == pytest.approx(stored_total, rel=1e-2)

    def test_adiabatic_ramp_keeps_excitation(self):
        ramp = 0.004
        result = run_storage(
            medium(1.6e6, decay_scale=0.0), STORE_DELTA, T_OFF, T_ON, STORE_PULSE,
            STORE_GRID, ramp_time=ramp,
        )
        record = polariton_field(result)
        before = record.excitation[result.snapshots.nearest(T_OFF - ramp / 2)]
        after = record.excitation[result.snapshots.nearest(T_OFF + ramp / 2)]
        assert after == pytest.approx(before, rel=0.05)

    def test_needs_snapshots(self, short_pulse):
        result = simulate(
            medium(1.0), Constant(1.0), short_pulse, SimGrid.from_step(0.01, 4.0, 10),
            snapshots=False,
        )
        with pytest.raises(MissingSnapshotsError):
            polariton_field(result)
