import logging

from collections import namedtuple
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths

from . import FIT_MAX_ITERATIONS, FIT_STEP_TOLERANCE, SPECTRUM_HALF_SPAN_WIDTHS, SPECTRUM_POINTS, TWO_PI
from .effective import effective_model
from .exceptions import ConfigError, FitError, UnstableModelError
from .models import stability_check
from .utils import rotating_frame

logger = logging.getLogger(__name__)

ThermometryReport = namedtuple('ThermometryReport', ('per_peak', 'total'))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """ Probe power spectral density in quanta per (rad/s) on an ascending angular-frequency grid (rad/s) """

    freq: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        freq = np.array(self.freq, dtype=float)
        values = np.array(self.values, dtype=float)
        if freq.shape != values.shape or freq.ndim != 1:
            raise ConfigError('Spectrum grid and values must be 1-d arrays of equal length', fields=['freq', 'values'])
        if np.any(np.diff(freq) <= 0):
            raise ConfigError('Spectrum grid must be strictly ascending', fields=['freq'])
        if np.any(values < 0):
            raise ConfigError('Spectrum values must be non-negative', fields=['values'])

        freq.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, 'freq', freq)
        object.__setattr__(self, 'values', values)

    def integral(self):
        """ :return: the trapezoidal integral of S over d(omega) / 2 pi """
        return float(trapezoid(self.values, self.freq) / TWO_PI)


@dataclass(frozen=True)
class LorentzianPeak:
    """ a w^2 / ((omega - center)^2 + w^2), area = pi a w """

    center: float
    half_width: float
    amplitude: float

    @property
    def area(self):
        return np.pi * self.amplitude * self.half_width

    def evaluate(self, freq):
        detuning = np.asarray(freq, dtype=float) - self.center
        return self.amplitude * self.half_width ** 2 / (detuning ** 2 + self.half_width ** 2)


@dataclass(frozen=True)
class LorentzianFit:
    peaks: Tuple[LorentzianPeak, ...]
    offset: float
    residual_norm: float
    iterations: int = 0

    @property
    def centers(self):
        return np.array([peak.center for peak in self.peaks])

    @property
    def half_widths(self):
        return np.array([peak.half_width for peak in self.peaks])

    @property
    def areas(self):
        return np.array([peak.area for peak in self.peaks])

    def evaluate(self, freq):
        return self.offset + sum(peak.evaluate(freq) for peak in self.peaks)


def default_grid(params, points=SPECTRUM_POINTS, half_span_widths=SPECTRUM_HALF_SPAN_WIDTHS):
    """ Uniform grid over omega_bar +/- half_span_widths * max(mode linewidth, |dw|) """

    eff = effective_model(params)
    widths = [mode.gamma + eff.Gamma[i].sum() for i, mode in enumerate(params.mech)]
    half_span = half_span_widths * max(max(widths), abs(params.delta_omega))
    return np.linspace(params.mean_omega - half_span, params.mean_omega + half_span, points)


def tail_grid(center, scale, span, points):
    """
    Non-uniform grid center + scale * sinh(u) with uniform u: spacing ~scale near the center, growing
    geometrically out to +/- span. Suited to integrating Lorentzian tails.
    """

    limit = np.arcsinh(span / scale)
    return center + scale * np.sinh(np.linspace(-limit, limit, points))


def probe_psd(model, weights, grid):
    """
    S(omega) = w^dagger chi(omega) D chi(omega)^dagger w with chi(omega) = (i omega I - conj(A))^-1, where w embeds the
    probe weights on the mechanical components. Its integral over d(omega)/2 pi equals w^dagger M w.
    """

    stable, abscissa = stability_check(model)
    if not stable:
        raise UnstableModelError('Cannot synthesize a spectrum of an unstable model', abscissa=abscissa)
    if not np.any(weights):
        raise ConfigError('Probe weights must not both be zero', fields=['probe_weights'])

    drift, omega_ref = rotating_frame(model.drift)
    n = model.size
    w = np.zeros(n, dtype=complex)
    w[:2] = weights

    grid = np.asarray(grid, dtype=float)
    detuning = grid - omega_ref

    # chi^dagger w solves (i omega I - conj(A))^dagger y = w
    adjoint = -1j * detuning[:, np.newaxis, np.newaxis] * np.eye(n) - drift.T[np.newaxis, :, :]
    y = np.linalg.solve(adjoint, np.broadcast_to(w, (len(grid), n))[..., np.newaxis])[..., 0]

    values = np.einsum('kp,p,kp->k', np.conjugate(y), np.diag(model.diffusion), y).real
    return Spectrum(grid, np.maximum(values, 0.0))


def lorentzian_sum(freq, peaks, offset=0.0):
    return offset + sum(peak.evaluate(freq) for peak in peaks)


def _initial_guess(x, y, n_peaks):
    indices, _ = find_peaks(y)
    if len(indices) == 0:
        indices = np.array([int(np.argmax(y))])
    indices = indices[np.argsort(y[indices])[::-1][:n_peaks]]

    half_widths = peak_widths(y, indices, rel_height=0.5)[0] / 2
    step = np.mean(np.diff(x))
    guesses = [
        (y[index], x[index], max(half_width * step, step)) for index, half_width in zip(indices, half_widths)
    ]

    # A single visible maximum with two requested peaks: a narrow and a broad line sharing the center
    while len(guesses) < n_peaks:
        height, center, half_width = guesses[0]
        guesses[0] = (0.7 * height, center, 0.7 * half_width)
        guesses.append((0.3 * height, center, 4 * half_width))

    p0 = []
    for height, center, half_width in guesses:
        p0.extend([np.log(max(height, 1e-12)), center, np.log(half_width)])
    p0.append(0.0)
    return np.array(p0)


def _model(p, x, n_peaks):
    result = np.full_like(x, p[-1])
    for k in range(n_peaks):
        amplitude, center, half_width = np.exp(p[3 * k]), p[3 * k + 1], np.exp(p[3 * k + 2])
        result += amplitude * half_width ** 2 / ((x - center) ** 2 + half_width ** 2)
    return result


def _jacobian(p, x, n_peaks):
    jac = np.empty((len(x), len(p)))
    for k in range(n_peaks):
        amplitude, center, half_width = np.exp(p[3 * k]), p[3 * k + 1], np.exp(p[3 * k + 2])
        detuning = x - center
        denominator = detuning ** 2 + half_width ** 2
        value = amplitude * half_width ** 2 / denominator
        jac[:, 3 * k] = value
        jac[:, 3 * k + 1] = 2 * value * detuning / denominator
        jac[:, 3 * k + 2] = 2 * value * detuning ** 2 / denominator
    jac[:, -1] = 1.0
    return jac


def _decode(p, n_peaks, x_origin, x_scale, y_scale):
    peaks = []
    for k in range(n_peaks):
        peaks.append(LorentzianPeak(
            center=float(x_origin + x_scale * p[3 * k + 1]),
            half_width=float(x_scale * np.exp(p[3 * k + 2])),
            amplitude=float(y_scale * np.exp(p[3 * k]))
        ))
    return tuple(sorted(peaks, key=lambda peak: peak.center)), float(y_scale * p[-1])


def fit_lorentzians(spectrum, n_peaks=1, max_iterations=FIT_MAX_ITERATIONS, step_tolerance=FIT_STEP_TOLERANCE):
    """
    Levenberg-Marquardt fit of n_peaks Lorentzians plus a constant offset, initialized from the largest local
    maxima. Peaks are returned sorted by center frequency.
    """

    if n_peaks not in (1, 2):
        raise ConfigError('Only one- and two-peak fits are supported', fields=['n_peaks'])

    freq, values = spectrum.freq, spectrum.values
    x_origin = (freq[0] + freq[-1]) / 2
    x_scale = (freq[-1] - freq[0]) / 2
    y_scale = float(np.max(values)) or 1.0
    x = (freq - x_origin) / x_scale
    y = values / y_scale

    p0 = _initial_guess(x, y, n_peaks)
    result = least_squares(
        lambda p: _model(p, x, n_peaks) - y,
        p0,
        jac=lambda p: _jacobian(p, x, n_peaks),
        method='lm',
        xtol=step_tolerance,
        ftol=step_tolerance,
        max_nfev=max_iterations
    )

    peaks, offset = _decode(result.x, n_peaks, x_origin, x_scale, y_scale)
    residual_norm = float(np.linalg.norm(lorentzian_sum(freq, peaks, offset) - values))

    if result.status <= 0:
        best = LorentzianFit(peaks=peaks, offset=offset, residual_norm=residual_norm, iterations=result.nfev)
        raise FitError('Lorentzian fit did not converge: {0}'.format(result.message), best_params=best)

    logger.debug('Lorentzian fit converged after {0} evaluations, residual {1:.3g}'.format(result.nfev, residual_norm))
    return LorentzianFit(peaks=peaks, offset=offset, residual_norm=residual_norm, iterations=result.nfev)


def spectral_thermometry(fit, weights):
    """
    Probe-referred occupations: each fitted peak area / 2 pi, normalized by |c|^2 as in probe_occupation. These are
    occupations of the measured combination c1 b1 + c2 b2, not of the individual modes.
    """

    norm = float(np.real(np.vdot(weights, weights)))
    per_peak = tuple(float(area / TWO_PI / norm) for area in fit.areas)
    return ThermometryReport(per_peak=per_peak, total=float(sum(per_peak)))
