import datetime
import json
import os
import tempfile

from unittest import TestCase
from unittest.mock import patch

import numpy as np

from darkmode import THERMAL_OCCUPATION
from darkmode.exceptions import (
    ConfigError, FitError, InsufficientSamplesError, NumericError, SweepError, UnstableModelError,
    derive_error_data, error_to_string
)
from darkmode.trajectory import TrajectoryConfig
from darkmode.utils import (
    batch_means, dump_json, get_setting, hz_to_rad, integrated_autocorr_time, json_serializer, rad_to_hz,
    reference_frequency, rotating_frame, thermal_occupation
)


class SettingsTestCase(TestCase):

    def test_get_setting(self):
        with patch.dict(os.environ, {'DARKMODE_THREADS': '4', 'DARKMODE_EMPTY': ''}):
            self.assertEqual(get_setting('THREADS', 1, int), 4)
            self.assertEqual(get_setting('EMPTY', 'default'), 'default')
        self.assertIsNone(get_setting('NOT_SET_ANYWHERE'))


class UnitsTestCase(TestCase):

    def test_conversions(self):
        self.assertEqual(hz_to_rad(1.0), 2 * np.pi)
        self.assertEqual(rad_to_hz(2 * np.pi), 1.0)
        np.testing.assert_allclose(rad_to_hz(hz_to_rad([1.0, 40.0])), [1.0, 40.0])
        self.assertIsInstance(hz_to_rad(1), float)

    def test_thermal_occupation(self):
        n = thermal_occupation(hz_to_rad(1.2e6), 300.0)
        self.assertAlmostEqual(n / THERMAL_OCCUPATION, 1.0, delta=1e-2)

    def test_rotating_frame(self):
        drift = np.diag([-1j * 10.0 - 1.0, -1j * 12.0 - 2.0, -3.0])

        self.assertEqual(reference_frequency(drift), 11.0)
        shifted, omega_ref = rotating_frame(drift)
        self.assertEqual(omega_ref, 11.0)
        np.testing.assert_allclose(np.diag(shifted), [1j - 1.0, -1j - 2.0, 11j - 3.0])


class StatisticsTestCase(TestCase):

    def test_batch_means(self):
        mean, error = batch_means(np.repeat([1.0, 3.0], 50), 2)

        self.assertEqual(mean, 2.0)
        self.assertAlmostEqual(error, 1.0)
        with self.assertRaises(ValueError):
            batch_means([1.0, 2.0], 5)

    def test_white_noise_is_uncorrelated(self):
        series = np.random.default_rng(1).standard_normal(100000)
        self.assertLess(integrated_autocorr_time(series), 1.5)

    def test_autoregressive_series(self):
        rho = 0.9
        rng = np.random.default_rng(2)
        noise = rng.standard_normal(200000)
        series = np.empty_like(noise)
        series[0] = noise[0]
        for k in range(1, len(series)):
            series[k] = rho * series[k - 1] + noise[k]

        self.assertAlmostEqual(integrated_autocorr_time(series) / ((1 + rho) / (1 - rho)), 1.0, delta=0.2)

    def test_short_series(self):
        self.assertEqual(integrated_autocorr_time([1.0]), 1.0)
        self.assertEqual(integrated_autocorr_time(np.ones(10)), 1.0)


class JSONTestCase(TestCase):

    def test_serializer(self):
        data = {
            'count': np.int64(3),
            'value': np.float64(0.5),
            'array': np.arange(3),
            'config': TrajectoryConfig(dt=1e-3, n_steps=10),
            'when': datetime.date(2024, 1, 1)
        }
        decoded = json.loads(json.dumps(data, default=json_serializer))

        self.assertEqual(decoded['count'], 3)
        self.assertEqual(decoded['array'], [0, 1, 2])
        self.assertEqual(decoded['config']['n_steps'], 10)
        self.assertEqual(decoded['when'], '2024-01-01')
        with self.assertRaises(TypeError):
            json_serializer(object())

    def test_dump_json(self):
        path = dump_json({'b': 1, 'a': np.float64(2.0)}, os.path.join(tempfile.mkdtemp(), 'data.json'))

        with open(path, 'rb') as f:
            content = f.read()
        self.assertTrue(content.endswith(b'}\n'))
        self.assertLess(content.index(b'"a"'), content.index(b'"b"'))


class ErrorDataTestCase(TestCase):

    def test_codes(self):
        self.assertEqual(derive_error_data(ConfigError('bad', fields=['axis']))['error_code'], 'VALIDATION')
        self.assertEqual(derive_error_data(UnstableModelError('gain'))['error_code'], 'UNSTABLE')
        self.assertEqual(derive_error_data(FitError('no'))['error_code'], 'FIT')
        self.assertEqual(derive_error_data(SweepError('many'))['error_code'], 'UNKNOWN_ERROR')
        self.assertEqual(derive_error_data(ValueError('x'), code='CUSTOM')['error_code'], 'CUSTOM')

    def test_attached_info(self):
        data = derive_error_data(ConfigError('bad', fields=['axis.points']))
        self.assertEqual(data['field_info'], ['axis.points'])
        self.assertEqual(data['underlying'], 'bad')

        self.assertEqual(derive_error_data(UnstableModelError('gain', abscissa=np.float64(0.5)))['abscissa'], 0.5)
        self.assertEqual(derive_error_data(NumericError('residual', residual=1e-3))['residual'], 1e-3)
        self.assertEqual(
            derive_error_data(InsufficientSamplesError('short', required_steps=5000))['required_steps'], 5000
        )

    def test_error_to_string(self):
        self.assertEqual(error_to_string(ValueError('message')), 'message')
        self.assertEqual(error_to_string(KeyError()), 'KeyError')
