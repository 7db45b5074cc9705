"""
Stochastic trajectories of the linear Langevin system, used as an independent check on the steady-state moments.

The simulated state is x = conj(v), for which x <- Phi x + xi with Phi = exp(conj(A) dt) has stationary covariance
E[x x^dagger] = M. Trajectories store v.
"""

import logging

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import expm

from . import RNG_NAME, __VERSION__
from .effective import effective_model
from .exceptions import ConfigError, InsufficientSamplesError, NumericError, UnstableModelError
from .models import DynamicsModel, build_dynamics, stability_check
from .steady_state import PhononReport, reduced_dynamics, steady_state
from .utils import batch_means, integrated_autocorr_time, rotating_frame

logger = logging.getLogger(__name__)

FACTORIZATION_FLOOR = 1e-12
MIN_AUTOCORR_TIMES = 100
MIN_BATCHES = 20
NOISE_CHUNK = 65536


@dataclass(frozen=True)
class TrajectoryConfig:
    """ Step (s), total step count including burn-in, seed and recording stride """

    dt: float
    n_steps: int
    n_burn_in: int = 0
    seed: int = 0
    record_stride: int = 1
    stationary_start: bool = True

    def __post_init__(self):
        if not self.dt > 0 or not np.isfinite(self.dt):
            raise ConfigError('Trajectory step must be positive', fields=['dt'])
        if not 0 <= self.n_burn_in < self.n_steps:
            raise ConfigError('Trajectory needs n_steps > n_burn_in >= 0', fields=['n_steps', 'n_burn_in'])
        if self.record_stride < 1:
            raise ConfigError('Recording stride must be at least 1', fields=['record_stride'])
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError('Seed must be a 64-bit unsigned integer', fields=['seed'])

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    config: TrajectoryConfig
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.amplitudes):
            raise ConfigError('Trajectory times and amplitudes differ in length', fields=['times', 'amplitudes'])
        if not np.all(np.isfinite(self.amplitudes)):
            raise NumericError('Trajectory contains non-finite amplitudes')

    @property
    def size(self):
        return self.amplitudes.shape[1]

    def occupation_series(self, mode):
        return np.abs(self.amplitudes[:, mode]) ** 2


def oracle_model(params, full_model=False):
    """ :return: the reduced two-mode model by default, or the four-mode model """

    if full_model:
        return build_dynamics(params)
    return reduced_dynamics(effective_model(params))


def _van_loan(drift, diffusion, dt):
    n = drift.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = -drift
    block[:n, n:] = diffusion
    block[n:, n:] = drift.conj().T
    exponential = expm(block * dt)
    phi = exponential[n:, n:].conj().T
    return phi, phi @ exponential[:n, n:]


def exact_propagators(A, D, dt):
    """
    Exact one-step map Phi = exp(conj(A) dt) and noise covariance
    Q = int_0^dt exp(conj(A) s) D exp(conj(A) s)^dagger ds.
    Q comes from the augmented-block exponential at a step short enough to keep the block well scaled, then doubled
    up to dt with Phi_2h = Phi_h^2, Q_2h = Phi_h Q_h Phi_h^dagger + Q_h.
    """

    A = np.asarray(A, dtype=complex)
    D = np.asarray(D, dtype=float)
    if not dt > 0:
        raise ConfigError('Propagator step must be positive', fields=['dt'])

    stable, abscissa = stability_check(DynamicsModel(A, D))
    if not stable:
        raise UnstableModelError('Cannot discretize an unstable drift matrix', abscissa=abscissa)

    shifted, omega_ref = rotating_frame(A)
    drift = np.conjugate(shifted)

    norm = np.linalg.norm(drift, 1) * dt
    doublings = max(0, int(np.ceil(np.log2(norm)))) if norm > 0 else 0
    phi, Q = _van_loan(drift, D, dt / 2 ** doublings)
    for _ in range(doublings):
        Q = phi @ Q @ phi.conj().T + Q
        phi = phi @ phi

    Q = (Q + Q.conj().T) / 2
    return phi * np.exp(1j * omega_ref * dt), Q


def _noise_factor(Q):
    eigenvalues, eigenvectors = np.linalg.eigh(Q)
    scale = np.linalg.norm(Q)
    if scale > 0 and eigenvalues.min() < -FACTORIZATION_FLOOR * scale:
        raise NumericError(
            'Step noise covariance is not positive semidefinite (eigenvalue {0:.3g})'.format(eigenvalues.min())
        )
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0, None))[np.newaxis, :]


def _complex_normal(rng, count, n):
    draws = rng.standard_normal((count, n, 2))
    return (draws[..., 0] + 1j * draws[..., 1]) / np.sqrt(2)


def simulate(model, cfg, v0=None):
    """
    Runs one trajectory. The initial state is v0 when given, otherwise a draw from the stationary distribution
    (cfg.stationary_start) or zero. The generator is Philox seeded with cfg.seed.
    """

    phi, Q = exact_propagators(model.drift, model.diffusion, cfg.dt)
    noise_factor = _noise_factor(Q)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    n = model.size

    if v0 is not None:
        v0 = np.asarray(v0, dtype=complex)
        if v0.shape != (n,):
            raise ConfigError('Initial state must have {0} components'.format(n), fields=['v0'])
        x = np.conjugate(v0)
    elif cfg.stationary_start:
        x = _noise_factor(steady_state(model).M) @ _complex_normal(rng, 1, n)[0]
    else:
        x = np.zeros(n, dtype=complex)

    recorded_steps = np.arange(cfg.n_burn_in, cfg.n_steps, cfg.record_stride)
    states = np.empty((len(recorded_steps), n), dtype=complex)

    row = 0
    step = 0
    while step < cfg.n_steps:
        count = min(NOISE_CHUNK, cfg.n_steps - step)
        noise = _complex_normal(rng, count, n) @ noise_factor.T
        for k in range(count):
            if row < len(recorded_steps) and step == recorded_steps[row]:
                states[row] = x
                row += 1
            x = phi @ x + noise[k]
            step += 1

    metadata = {
        'rng': RNG_NAME,
        'numpy_version': np.__version__,
        'tool_version': __VERSION__,
        'seed': cfg.seed,
        'config': cfg.as_dict(),
        'modes': n
    }
    logger.debug('Simulated {0} steps of a {1}-mode model, recorded {2}'.format(cfg.n_steps, n, len(states)))
    return Trajectory(times=recorded_steps * cfg.dt, amplitudes=np.conjugate(states), config=cfg, metadata=metadata)


def estimate_occupations(trajectory, n_batches=MIN_BATCHES, n_th=None):
    """
    Time-averaged |b_i|^2 with batch-means standard errors. Requires at least 100 integrated autocorrelation
    times of recorded samples.
    """

    if n_batches < MIN_BATCHES:
        raise ConfigError('At least {0} batches are required'.format(MIN_BATCHES), fields=['n_batches'])

    series = [trajectory.occupation_series(i) for i in range(2)]
    n_samples = len(series[0])

    tau = max(integrated_autocorr_time(s) for s in series)
    required_samples = int(np.ceil(max(MIN_AUTOCORR_TIMES * tau, n_batches)))
    if n_samples < required_samples:
        cfg = trajectory.config
        required_steps = cfg.n_burn_in + required_samples * cfg.record_stride
        raise InsufficientSamplesError(
            'Trajectory has {0} samples, {1} are needed ({2:.3g} autocorrelation times of {3:.3g} samples); '
            'run at least {4} steps'.format(n_samples, required_samples, MIN_AUTOCORR_TIMES, tau, required_steps),
            required_steps=required_steps
        )

    (n1, n1_error), (n2, n2_error) = (batch_means(s, n_batches) for s in series)
    n_total = n1 + n2
    return PhononReport(
        n1=n1, n2=n2, n_total=n_total, normalized=n_total / n_th if n_th else None, n1_error=n1_error, n2_error=n2_error
    )


def stationarity_check(trajectory, sigmas=3.0, n_batches=MIN_BATCHES):
    """ True when both halves give occupations within `sigmas` combined batch-means errors of each other """

    middle = len(trajectory.times) // 2
    for i in range(2):
        series = trajectory.occupation_series(i)
        first, first_error = batch_means(series[:middle], n_batches)
        second, second_error = batch_means(series[middle:], n_batches)
        if abs(first - second) > sigmas * np.hypot(first_error, second_error):
            return False
    return True


def trajectory_check(params, cfg, full_model=False, n_batches=MIN_BATCHES):
    """ Simulates the oracle model of params and returns its occupation estimate """

    model = oracle_model(params, full_model=full_model)
    n_th = params.mech[0].n_th or None
    return estimate_occupations(simulate(model, cfg), n_batches=n_batches, n_th=n_th)
