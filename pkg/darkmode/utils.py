import json
import os

import numpy as np

from . import HBAR, K_BOLTZMANN, TWO_PI


def get_setting(name, default=None, cast=str):
    """ :return: the ``DARKMODE_<name>`` environment override, or the default """

    value = os.environ.get('DARKMODE_{0}'.format(name))
    if value is None or value == '':
        return default
    return cast(value)


def hz_to_rad(value):
    """ Ordinary frequency (Hz) to angular frequency (rad/s) """
    return TWO_PI * np.asarray(value, dtype=float) if np.ndim(value) else TWO_PI * float(value)


def rad_to_hz(value):
    """ Angular frequency (rad/s) to ordinary frequency (Hz) """
    return np.asarray(value, dtype=float) / TWO_PI if np.ndim(value) else float(value) / TWO_PI


def thermal_occupation(omega, temperature):
    """ High-temperature thermal occupation k_B T / (hbar omega), omega in rad/s """
    return K_BOLTZMANN * temperature / (HBAR * omega)


def reference_frequency(drift):
    """
    :return: the mean oscillation frequency of the mechanical diagonal of a drift matrix, in rad/s.
    Shifting every diagonal entry by i * reference leaves second moments and decay rates unchanged.
    """

    diagonal = np.diag(drift)
    return -float(np.mean(diagonal[:2].imag))


def rotating_frame(drift, omega_ref=None):
    """ :return: (drift seen from a frame rotating at omega_ref, omega_ref) """

    if omega_ref is None:
        omega_ref = reference_frequency(drift)
    return drift + 1j * omega_ref * np.eye(drift.shape[0]), omega_ref


def integrated_autocorr_time(series, window_factor=5.0):
    """
    Integrated autocorrelation time of a real series in units of samples, from the FFT autocorrelation with a
    self-consistent window (the smallest M with M >= window_factor * tau(M))
    """

    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 2:
        return 1.0

    x = x - x.mean()
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(x, n=size)
    acf = np.fft.irfft(spectrum * np.conjugate(spectrum), n=size)[:n]
    if acf[0] <= 0:
        return 1.0
    acf /= acf[0]

    taus = 2.0 * np.cumsum(acf) - 1.0
    windows = np.arange(n) >= window_factor * taus
    window = int(np.argmax(windows)) if windows.any() else n - 1
    return max(float(taus[window]), 1.0)


def batch_means(series, n_batches):
    """ :return: (mean, standard error) of a correlated series from non-overlapping batch means """

    x = np.asarray(series, dtype=float)
    batch_size = len(x) // n_batches
    if batch_size < 1:
        raise ValueError('Series of length {0} cannot form {1} batches'.format(len(x), n_batches))

    batches = x[:batch_size * n_batches].reshape(n_batches, batch_size).mean(axis=1)
    return float(x.mean()), float(batches.std(ddof=1) / np.sqrt(n_batches))


def json_serializer(obj):
    """ Handles numpy scalars and arrays when part of a metadata object """

    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, 'as_dict'):
        return obj.as_dict()
    if hasattr(obj, 'isoformat'):
        return obj.isoformat()
    raise TypeError('Object of type {0} is not JSON serializable'.format(type(obj).__name__))


def dump_json(data, path):
    with open(path, 'w', newline='\n') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=json_serializer)
        f.write('\n')
    return path
