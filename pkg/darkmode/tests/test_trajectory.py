from unittest import TestCase

import numpy as np
from scipy.linalg import expm

from darkmode import RNG_NAME
from darkmode.effective import effective_model
from darkmode.exceptions import ConfigError, InsufficientSamplesError, UnstableModelError
from darkmode.models import DynamicsModel, build_dynamics
from darkmode.steady_state import phonon_report, reduced_lyapunov, steady_state
from darkmode.tests.fixtures import params_with_G, single_cavity_params
from darkmode.trajectory import (
    TrajectoryConfig, estimate_occupations, exact_propagators, oracle_model, simulate, stationarity_check,
    trajectory_check
)
from darkmode.utils import hz_to_rad


def damped_pair(diffusion=0.0):
    params = params_with_G(np.zeros((2, 2)))
    drift = np.diag([-(1j * mode.omega + mode.gamma) for mode in params.mech])
    return params, DynamicsModel(drift, diffusion * np.eye(2))


class TrajectoryConfigTestCase(TestCase):

    def test_validation(self):
        with self.assertRaises(ConfigError):
            TrajectoryConfig(dt=0.0, n_steps=10)
        with self.assertRaises(ConfigError):
            TrajectoryConfig(dt=1e-3, n_steps=10, n_burn_in=10)
        with self.assertRaises(ConfigError):
            TrajectoryConfig(dt=1e-3, n_steps=10, record_stride=0)
        with self.assertRaises(ConfigError):
            TrajectoryConfig(dt=1e-3, n_steps=10, seed=-1)

    def test_as_dict(self):
        cfg = TrajectoryConfig(dt=1e-3, n_steps=10, seed=7)
        self.assertEqual(cfg.as_dict()['seed'], 7)
        self.assertTrue(cfg.as_dict()['stationary_start'])


class PropagatorTestCase(TestCase):

    def test_scalar_oscillator(self):
        omega, gamma, n, dt = hz_to_rad(1.2e6), hz_to_rad(0.65), 40.0, 1e-3
        phi, Q = exact_propagators([[-(1j * omega + gamma)]], [[2 * gamma * n]], dt)

        self.assertAlmostEqual(abs(phi[0, 0] / np.exp((1j * omega - gamma) * dt) - 1), 0.0, places=9)
        self.assertAlmostEqual(Q[0, 0].real / (n * (1 - np.exp(-2 * gamma * dt))), 1.0, places=9)

    def test_short_step_limit(self):
        params = single_cavity_params(20.0, n_th=1.0)
        model = build_dynamics(params)
        dt = 1e-9
        phi, Q = exact_propagators(model.drift, model.diffusion, dt)
        noise_scale = np.abs(model.diffusion).max() * dt

        np.testing.assert_allclose(phi, expm(np.conjugate(model.drift) * dt), rtol=0, atol=1e-12)
        np.testing.assert_allclose(np.diag(Q).real, np.diag(model.diffusion) * dt, rtol=1e-6, atol=1e-6 * noise_scale)

    def test_stationary_moments_are_a_fixed_point(self):
        params = single_cavity_params(100.0, n_th=1.0)
        for model in (build_dynamics(params), oracle_model(params)):
            M = steady_state(model).M
            for dt in (1e-8, 1e-5, 1e-3):
                phi, Q = exact_propagators(model.drift, model.diffusion, dt)
                mapped = phi @ M @ phi.conj().T + Q

                self.assertLess(np.linalg.norm(mapped - M) / np.linalg.norm(M), 1e-10)

    def test_noise_covariance_is_hermitian(self):
        model = build_dynamics(single_cavity_params(40.0, n_th=1.0))
        _, Q = exact_propagators(model.drift, model.diffusion, 1e-4)
        np.testing.assert_array_equal(Q, Q.conj().T)

    def test_unstable_drift(self):
        with self.assertRaises(UnstableModelError):
            exact_propagators([[-1j * 10 + 1.0]], [[1.0]], 1e-3)


class SimulateTestCase(TestCase):

    def test_deterministic_decay(self):
        params, model = damped_pair()
        cfg = TrajectoryConfig(dt=1e-2, n_steps=200)
        run = simulate(model, cfg, v0=[1.0, 1.0])

        slope = np.polyfit(run.times, np.log(run.occupation_series(0)), 1)[0]
        self.assertAlmostEqual(slope / (-2 * params.mech[0].gamma), 1.0, delta=1e-6)
        self.assertAlmostEqual(run.amplitudes[1, 0], np.exp(-(1j * params.mech[0].omega + params.mech[0].gamma) * 1e-2))

    def test_zero_state_stays_at_rest(self):
        _, model = damped_pair()
        run = simulate(model, TrajectoryConfig(dt=1e-2, n_steps=50), v0=np.zeros(2))
        self.assertFalse(np.any(run.amplitudes))

    def test_recording(self):
        _, model = damped_pair(diffusion=1.0)
        run = simulate(model, TrajectoryConfig(dt=1e-2, n_steps=100, n_burn_in=10, record_stride=5))

        self.assertEqual(len(run.times), 18)
        self.assertAlmostEqual(run.times[0], 0.1)
        self.assertAlmostEqual(run.times[1] - run.times[0], 0.05)
        self.assertEqual(run.size, 2)
        self.assertEqual(run.metadata['rng'], RNG_NAME)
        self.assertEqual(run.metadata['modes'], 2)

    def test_initial_state_shape(self):
        _, model = damped_pair()
        with self.assertRaises(ConfigError):
            simulate(model, TrajectoryConfig(dt=1e-2, n_steps=10), v0=np.zeros(3))

    def test_seeded_runs_repeat(self):
        model = oracle_model(single_cavity_params(20.0, n_th=1.0))
        cfg = TrajectoryConfig(dt=1e-3, n_steps=2000, seed=12345)

        first = simulate(model, cfg)
        np.testing.assert_array_equal(first.amplitudes, simulate(model, cfg).amplitudes)
        other = simulate(model, TrajectoryConfig(dt=1e-3, n_steps=2000, seed=12346))
        self.assertFalse(np.array_equal(first.amplitudes, other.amplitudes))


class OccupationEstimateTestCase(TestCase):

    def test_thermal_occupation(self):
        params = single_cavity_params(20.0, n_th=1.0)
        cfg = TrajectoryConfig(dt=1e-2, n_steps=200000, n_burn_in=100, seed=3)
        run = simulate(oracle_model(params), cfg)
        estimate = estimate_occupations(run, n_th=1.0)
        expected = phonon_report(reduced_lyapunov(effective_model(params)))

        self.assertLess(abs(estimate.n_total - expected.n_total), 4 * estimate.n_total_error)
        self.assertEqual(estimate.normalized, estimate.n_total)
        self.assertTrue(stationarity_check(run, sigmas=4.0))

    def test_uncoupled_modes_stay_thermal(self):
        params = params_with_G(np.zeros((2, 2)), n_th=1.0)
        cfg = TrajectoryConfig(dt=1e-2, n_steps=200000, n_burn_in=100, seed=7)
        estimate = trajectory_check(params, cfg)

        self.assertLess(abs(estimate.n1 - 1.0), 4 * estimate.n1_error)
        self.assertLess(abs(estimate.n2 - 1.0), 4 * estimate.n2_error)
        self.assertLess(abs(estimate.n_total - 2.0), 4 * estimate.n_total_error)

    def test_dark_mode_regime(self):
        params = single_cavity_params(1000.0, n_th=1.0)
        cfg = TrajectoryConfig(dt=1e-3, n_steps=400000, n_burn_in=10000, record_stride=10, seed=11)
        estimate = trajectory_check(params, cfg)
        expected = phonon_report(reduced_lyapunov(effective_model(params)))

        self.assertLess(abs(estimate.n_total - expected.n_total), 4 * estimate.n_total_error)
        self.assertEqual(estimate.normalized, estimate.n_total)

    def test_short_run_is_rejected(self):
        params = single_cavity_params(1000.0, n_th=1.0)
        run = simulate(oracle_model(params), TrajectoryConfig(dt=1e-3, n_steps=200))

        with self.assertRaises(InsufficientSamplesError) as context:
            estimate_occupations(run)
        self.assertGreater(context.exception.required_steps, 200)

    def test_batch_count(self):
        _, model = damped_pair(diffusion=1.0)
        run = simulate(model, TrajectoryConfig(dt=1e-2, n_steps=100))
        with self.assertRaises(ConfigError):
            estimate_occupations(run, n_batches=5)

    def test_oracle_sizes(self):
        params = single_cavity_params(20.0)
        self.assertEqual(oracle_model(params).size, 2)
        self.assertEqual(oracle_model(params, full_model=True).size, 4)
