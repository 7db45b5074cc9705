import logging

from collections import namedtuple
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from . import ADIABATICITY_THRESHOLD
from .exceptions import ConfigError
from .utils import rotating_frame

logger = logging.getLogger(__name__)

Stability = namedtuple('Stability', ('stable', 'abscissa'))


def _frozen_array(values, dtype=float, shape=None, name='array'):
    array = np.array(values, dtype=dtype)
    if shape is not None and array.shape != shape:
        raise ConfigError('{0} must have shape {1}, got {2}'.format(name, shape, array.shape), fields=[name])
    array.flags.writeable = False
    return array


def _require_finite(name, *values):
    for value in values:
        if not np.all(np.isfinite(value)):
            raise ConfigError('{0} must be finite'.format(name), fields=[name])


@dataclass(frozen=True)
class MechanicalMode:
    """ A membrane mode: angular frequency, amplitude decay rate (both rad/s) and thermal occupation """

    omega: float
    gamma: float
    n_th: float = 0.0

    def __post_init__(self):
        _require_finite('mechanical mode', self.omega, self.gamma, self.n_th)
        if self.omega <= 0:
            raise ConfigError('Mechanical frequency must be positive', fields=['omega'])
        if self.gamma <= 0:
            raise ConfigError('Mechanical decay rate must be positive', fields=['gamma'])
        if self.n_th < 0:
            raise ConfigError('Thermal occupation must be non-negative', fields=['n_th'])


@dataclass(frozen=True)
class CavityMode:
    """ A driven cavity mode: amplitude decay rate and detuning Delta = omega_d - omega_c (rad/s) """

    kappa: float
    detuning: float
    n_opt: float = 0.0

    def __post_init__(self):
        _require_finite('cavity mode', self.kappa, self.detuning, self.n_opt)
        if self.kappa <= 0:
            raise ConfigError('Cavity decay rate must be positive', fields=['kappa'])
        if self.n_opt < 0:
            raise ConfigError('Optical bath occupation must be non-negative', fields=['n_opt'])


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """ Multiphoton couplings G[i][j] (rad/s) between mechanical mode i and cavity mode j """

    G: np.ndarray

    def __post_init__(self):
        G = _frozen_array(self.G, shape=(2, 2), name='G')
        _require_finite('G', G)
        object.__setattr__(self, 'G', G)

    @classmethod
    def from_photon_numbers(cls, g, photon_numbers):
        """ G_ij = g_ij * alpha_j, with real alpha_j = sqrt(|alpha_j|^2) """

        g = np.asarray(g, dtype=float)
        photon_numbers = np.asarray(photon_numbers, dtype=float)
        if np.any(photon_numbers < 0):
            raise ConfigError('Photon numbers must be non-negative', fields=['photon_number'])
        return cls(g * np.sqrt(photon_numbers)[np.newaxis, :])

    @classmethod
    def zero(cls):
        return cls(np.zeros((2, 2)))

    def vector(self, cavity):
        """ :return: the coupling vector (G_1j, G_2j) of cavity j (0-based) """
        return self.G[:, cavity].copy()

    def __eq__(self, other):
        return isinstance(other, CouplingMatrix) and np.array_equal(self.G, other.G)

    def __hash__(self):
        return hash(self.G.tobytes())

    def as_dict(self):
        return {'G': self.G.tolist()}


@dataclass(frozen=True)
class SystemParams:
    """ Two mechanical modes, two cavity modes, their coupling and the measured probe combination """

    mech: Tuple[MechanicalMode, MechanicalMode]
    cav: Tuple[CavityMode, CavityMode]
    coupling: CouplingMatrix = field(default_factory=CouplingMatrix.zero)
    probe_weights: Tuple[float, float] = (1 / np.sqrt(2), 1 / np.sqrt(2))

    def __post_init__(self):
        object.__setattr__(self, 'mech', tuple(self.mech))
        object.__setattr__(self, 'cav', tuple(self.cav))
        object.__setattr__(self, 'probe_weights', tuple(float(c) for c in self.probe_weights))

        if len(self.mech) != 2:
            raise ConfigError('Exactly two mechanical modes are required', fields=['mech'])
        if len(self.cav) != 2:
            raise ConfigError('Exactly two cavity modes are required', fields=['cav'])
        if len(self.probe_weights) != 2:
            raise ConfigError('Probe weights must have two entries', fields=['probe_weights'])
        _require_finite('probe_weights', self.probe_weights)
        if not any(self.probe_weights):
            raise ConfigError('Probe weights must not both be zero', fields=['probe_weights'])

    @property
    def delta_omega(self):
        return self.mech[0].omega - self.mech[1].omega

    @property
    def mean_omega(self):
        return (self.mech[0].omega + self.mech[1].omega) / 2

    @property
    def G(self):
        return self.coupling.G

    def active_cavities(self):
        """ :return: indices of the cavity modes that couple to at least one mechanical mode """
        return [j for j in range(2) if np.any(self.G[:, j] != 0)]

    def with_coupling(self, G):
        return replace(self, coupling=G if isinstance(G, CouplingMatrix) else CouplingMatrix(G))


@dataclass(frozen=True, eq=False)
class DynamicsModel:
    """
    Linear Langevin system dv/dt = A v + noise over the ordered mode vector (b1, b2, da1, da2), or (b1, b2) for
    the reduced model, with diagonal diffusion D
    """

    drift: np.ndarray
    diffusion: np.ndarray

    def __post_init__(self):
        drift = _frozen_array(self.drift, dtype=complex, name='drift')
        diffusion = _frozen_array(self.diffusion, dtype=float, name='diffusion')

        n = drift.shape[0]
        if drift.shape != (n, n) or diffusion.shape != (n, n):
            raise ConfigError('Drift and diffusion must be square and of equal size', fields=['drift', 'diffusion'])
        _require_finite('drift', drift)
        _require_finite('diffusion', diffusion)

        object.__setattr__(self, 'drift', drift)
        object.__setattr__(self, 'diffusion', diffusion)

    @property
    def size(self):
        return self.drift.shape[0]

    # Matrix-notation aliases
    @property
    def A(self):
        return self.drift

    @property
    def D(self):
        return self.diffusion


def build_dynamics(params):
    """ Maps the linearized beam-splitter Hamiltonian and the decay channels onto the drift and diffusion """

    A = np.zeros((4, 4), dtype=complex)
    D = np.zeros((4, 4))

    for i, mode in enumerate(params.mech):
        A[i, i] = -(1j * mode.omega + mode.gamma)
        D[i, i] = 2 * mode.gamma * mode.n_th

    for j, mode in enumerate(params.cav):
        a = 2 + j
        A[a, a] = 1j * mode.detuning - mode.kappa
        D[a, a] = 2 * mode.kappa * mode.n_opt
        for i in range(2):
            A[i, a] = A[a, i] = 1j * params.G[i, j]

    return DynamicsModel(A, D)


def stability_check(model):
    """ :return: (stable, spectral abscissa) of the drift matrix """

    # Real parts are invariant under a common frequency shift
    drift, _ = rotating_frame(model.drift)
    abscissa = float(np.max(np.linalg.eigvals(drift).real))
    return Stability(abscissa < 0, abscissa)


def adiabaticity_ratio(params):
    """ :return: max |G_ij| / kappa_j, the validity gauge for eliminating the cavity modes """

    kappas = np.array([mode.kappa for mode in params.cav])
    return float(np.max(np.abs(params.G) / kappas[np.newaxis, :]))


def check_adiabaticity(params, threshold=ADIABATICITY_THRESHOLD):
    """ Logs a warning when the cavity modes are not fast compared to the couplings """

    ratio = adiabaticity_ratio(params)
    if ratio > threshold:
        logger.warning(
            'Adiabaticity ratio max|G|/kappa = {0:.3g} exceeds {1:.3g}; the effective model may be inaccurate'.format(
                ratio, threshold
            )
        )
    return ratio
