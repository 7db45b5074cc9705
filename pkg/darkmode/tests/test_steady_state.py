from unittest import TestCase

import numpy as np
from scipy.linalg import solve_continuous_lyapunov
from scipy.optimize import minimize_scalar

from darkmode.effective import effective_model
from darkmode.exceptions import ConfigError, NumericError, UnstableModelError
from darkmode.models import DynamicsModel, build_dynamics
from darkmode.scenarios import builtin_scenarios
from darkmode.steady_state import (
    MomentMatrix, dark_mode_limit, phonon_approximate, phonon_closed_form, phonon_report, probe_occupation,
    reduced_dynamics, reduced_lyapunov, solve_lyapunov, steady_state
)
from darkmode.tests.fixtures import EQUAL_GAMMA_HZ, equal_gamma_params, params_with_G, single_cavity_params
from darkmode.utils import hz_to_rad, rotating_frame


class LyapunovTestCase(TestCase):

    def test_free_oscillator(self):
        omega, gamma, n = hz_to_rad(1.2e6), hz_to_rad(0.65), 250.0
        moments = solve_lyapunov([[-(1j * omega + gamma)]], [[2 * gamma * n]])

        self.assertAlmostEqual(moments.M[0, 0].real / n, 1.0, places=12)
        self.assertEqual(moments.size, 1)

    def test_uncoupled_modes_thermalize(self):
        params = params_with_G(np.zeros((2, 2)), n_th=1000.0)
        moments = steady_state(build_dynamics(params))

        np.testing.assert_allclose(moments.occupations[:2], 1000.0, rtol=1e-10)
        np.testing.assert_allclose(moments.occupations[2:], 0.0, atol=1e-9)

    def test_matches_scipy(self):
        model = build_dynamics(single_cavity_params(100.0, n_th=1.0))
        moments = steady_state(model)
        drift, _ = rotating_frame(model.drift)
        expected = solve_continuous_lyapunov(np.conjugate(drift), -model.diffusion)

        np.testing.assert_allclose(moments.M, expected, rtol=0, atol=1e-8 * np.abs(expected).max())
        self.assertLess(moments.residual, 1e-10)

    def test_moments_are_hermitian_and_read_only(self):
        moments = steady_state(build_dynamics(single_cavity_params(40.0)))

        np.testing.assert_array_equal(moments.M, moments.M.conj().T)
        with self.assertRaises(ValueError):
            moments.M[0, 0] = 0

    def test_unstable_drift(self):
        with self.assertRaises(UnstableModelError) as context:
            solve_lyapunov([[-1j * 10 + 0.5, 0], [0, -1j * 12 - 1.0]], np.eye(2))
        self.assertAlmostEqual(context.exception.abscissa, 0.5)

    def test_negative_diffusion_is_not_a_covariance(self):
        with self.assertRaises(NumericError):
            solve_lyapunov([[-1j * 10 - 1.0, 0], [0, -1j * 12 - 1.0]], np.diag([-1.0, 1.0]))


class ReducedModelTestCase(TestCase):

    def test_reduced_diffusion_has_no_cavity_noise(self):
        eff = effective_model(single_cavity_params(100.0, n_th=10.0))
        model = reduced_dynamics(eff)

        self.assertEqual(model.size, 2)
        np.testing.assert_array_equal(model.drift, -1j * eff.H_eff)
        self.assertEqual(model.diffusion[0, 0], 2 * eff.mech[0].gamma * 10.0)
        self.assertEqual(model.diffusion[0, 1], 0.0)

    def test_explicit_baths(self):
        eff = effective_model(params_with_G(np.zeros((2, 2))))
        moments = reduced_lyapunov(eff, baths=[(eff.mech[0].gamma, 3.0), (eff.mech[1].gamma, 7.0)])

        np.testing.assert_allclose(moments.occupations, [3.0, 7.0], rtol=1e-10)

    def test_matches_full_model_when_adiabatic(self):
        params = single_cavity_params(5.0)
        full = phonon_report(steady_state(build_dynamics(params)))
        reduced = phonon_report(reduced_lyapunov(effective_model(params)))

        self.assertAlmostEqual(full.n1 / reduced.n1, 1.0, delta=1e-2)
        self.assertAlmostEqual(full.n2 / reduced.n2, 1.0, delta=1e-2)

    def test_matches_closed_form_with_equal_damping(self):
        gamma = hz_to_rad(EQUAL_GAMMA_HZ)
        for Gamma1_hz in (1.0, 20.0, 40.0, 100.0, 1000.0):
            eff = effective_model(equal_gamma_params(Gamma1_hz, n_th=1.0))
            numeric = phonon_report(reduced_lyapunov(eff)).n_total
            expected = phonon_closed_form(gamma, hz_to_rad(Gamma1_hz), hz_to_rad(80.0), 1.0)

            self.assertAlmostEqual(numeric / expected, 1.0, places=9)

    def test_matches_closed_form_on_a_log_grid(self):
        gamma, delta_omega = hz_to_rad(EQUAL_GAMMA_HZ), hz_to_rad(80.0)
        for Gamma1_hz in np.logspace(-1, 3, 200):
            eff = effective_model(equal_gamma_params(Gamma1_hz, n_th=1.0))
            numeric = phonon_report(reduced_lyapunov(eff)).n_total
            expected = phonon_closed_form(gamma, hz_to_rad(Gamma1_hz), delta_omega, 1.0)

            np.testing.assert_allclose(numeric, expected, rtol=1e-8)

    def test_matches_full_model_on_builtin_grids(self):
        scenarios = builtin_scenarios()
        for name in ('scenario-A1', 'scenario-B'):
            scenario = scenarios[name]
            for control in scenario.grid():
                params = scenario.params_at(control)
                full = phonon_report(steady_state(build_dynamics(params))).n_total
                reduced = phonon_report(reduced_lyapunov(effective_model(params))).n_total

                self.assertLess(abs(full / reduced - 1), 0.02, msg='{0} at {1:.6g} rad/s'.format(name, control))

    def test_balanced_cavities_cool_independently(self):
        scenario = builtin_scenarios()['scenario-B']
        Gamma1 = hz_to_rad(50.0)
        params = scenario.params_at(Gamma1)
        report = phonon_report(reduced_lyapunov(effective_model(params)), n_th=scenario.n_th)

        for n, mode in zip((report.n1, report.n2), params.mech):
            self.assertAlmostEqual(n / scenario.n_th, mode.gamma / (mode.gamma + 2 * Gamma1), places=9)


class ClosedFormPhononTestCase(TestCase):

    def test_dark_mode_limit(self):
        n_th = 1.0
        limit = dark_mode_limit(hz_to_rad(EQUAL_GAMMA_HZ), hz_to_rad(80.0), n_th)

        self.assertAlmostEqual(limit.exact, 0.061539, places=5)
        self.assertAlmostEqual(limit.approx, 0.0635, places=10)
        at_ep = phonon_closed_form(hz_to_rad(EQUAL_GAMMA_HZ), hz_to_rad(40.0), hz_to_rad(80.0), n_th)
        self.assertEqual(limit.exact, at_ep)

    def test_dark_mode_limit_is_the_minimum(self):
        gamma, delta_omega = hz_to_rad(EQUAL_GAMMA_HZ), hz_to_rad(80.0)
        grid = hz_to_rad(np.array([30.0, 37.1, 40.0, 43.2, 50.0]))
        values = phonon_closed_form(gamma, grid, delta_omega, 1.0)

        self.assertEqual(int(np.argmin(values)), 2)

    def test_golden_section_finds_the_ep(self):
        gamma, delta_omega = hz_to_rad(0.05), hz_to_rad(80.0)
        result = minimize_scalar(
            lambda Gamma1: phonon_closed_form(gamma, Gamma1, delta_omega, 1.0),
            bracket=(hz_to_rad(10.0), hz_to_rad(30.0), hz_to_rad(200.0)),
            method='golden'
        )

        self.assertLess(abs(result.x / (delta_omega / 2) - 1), 0.01)
        self.assertLess(abs(result.fun / dark_mode_limit(gamma, delta_omega, 1.0).exact - 1), 1e-4)

    def test_degenerate_modes_have_no_limit(self):
        with self.assertRaises(ConfigError) as context:
            dark_mode_limit(hz_to_rad(EQUAL_GAMMA_HZ), 0.0, 1.0)
        self.assertEqual(context.exception.fields, ['delta_omega'])

    def test_approximation_holds_far_from_the_ep(self):
        gamma, delta_omega = hz_to_rad(EQUAL_GAMMA_HZ), hz_to_rad(80.0)
        exact = phonon_closed_form(gamma, hz_to_rad(50.0), delta_omega, 1.0)
        approx = phonon_approximate(gamma, hz_to_rad(50.0), delta_omega, 1.0)

        self.assertLess(abs(approx / exact - 1), 0.05)
        self.assertGreater(approx, exact)

    def test_vectorized(self):
        values = phonon_approximate(1.0, np.array([1.0, 2.0]), 4.0, 1.0)
        self.assertEqual(values.shape, (2,))


class PhononReportTestCase(TestCase):

    def test_normalization(self):
        report = phonon_report(np.diag([2.0, 3.0, 0.0, 0.0]), n_th=10.0)

        self.assertEqual(report.n_total, 5.0)
        self.assertEqual(report.normalized, 0.5)
        self.assertIsNone(report.n_total_error)
        self.assertIsNone(phonon_report(np.diag([2.0, 3.0])).normalized)

    def test_negative_occupation(self):
        with self.assertRaises(NumericError):
            phonon_report(np.diag([-1.0, 3.0]))

    def test_probe_occupation(self):
        moments = MomentMatrix(np.array([[2.0, 0.5], [0.5, 4.0]]))

        self.assertAlmostEqual(probe_occupation(moments, (1.0, 0.0)), 2.0)
        self.assertAlmostEqual(probe_occupation(moments, (1 / np.sqrt(2), 1 / np.sqrt(2))), 3.5)

    def test_probe_occupation_is_per_unit_weight(self):
        moments = MomentMatrix(np.array([[2.0, 0.5], [0.5, 4.0]]))

        self.assertAlmostEqual(probe_occupation(moments, (2.0, 0.0)), 2.0)
        self.assertAlmostEqual(probe_occupation(moments, (0.0, 3.0)), 4.0)

        with self.assertRaises(ConfigError) as context:
            probe_occupation(moments, (0.0, 0.0))
        self.assertEqual(context.exception.fields, ['probe_weights'])
