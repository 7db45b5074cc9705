"""
Cavity-mediated dynamics of the two mechanical modes after adiabatic elimination of the cavity fields.

The cavity susceptibilities are evaluated on resonance (Delta_j = -omega_bar), where they are purely dissipative:
the backaction rates are Gamma_ij = G_ij^2 / kappa_j and the mediated couplings are Gamma_1 = G_11 G_21 / kappa_1 and
Gamma_2 = G_12 G_22 / kappa_2. Optical spring (dispersive) terms are not modelled.
"""

import logging

from collections import namedtuple
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import AT_EP, BRIGHT, DARK, HYBRID, NOT_APPLICABLE, POST_EP, PRE_EP
from . import DARK_MODE_RATIO_THRESHOLD, EP_TOLERANCE, EQUAL_GAMMA_TOLERANCE, OVERLAP_THRESHOLD
from .exceptions import ClosedFormInapplicableError, ConfigError
from .models import CouplingMatrix, MechanicalMode, check_adiabaticity

logger = logging.getLogger(__name__)

CLOSED_FORM = 'closed-form'
NUMERIC = 'numeric'

# Relative size below which Gamma1 + Gamma2 counts as an exact cancellation
CANCELLATION_TOLERANCE = 1e-12

EPLocation = namedtuple('EPLocation', ('analytic', 'numeric', 'min_gap'))


@dataclass(frozen=True, eq=False)
class EffectiveModel:
    """ The 2x2 non-Hermitian effective Hamiltonian (rad/s) with the backaction rates it is built from """

    H_eff: np.ndarray
    Gamma11: float
    Gamma12: float
    Gamma21: float
    Gamma22: float
    Gamma1: float
    Gamma2: float
    mech: Tuple[MechanicalMode, MechanicalMode]
    coupling: Optional[CouplingMatrix] = None

    def __post_init__(self):
        H_eff = np.array(self.H_eff, dtype=complex)
        H_eff.flags.writeable = False
        object.__setattr__(self, 'H_eff', H_eff)
        object.__setattr__(self, 'mech', tuple(self.mech))

    @property
    def Gamma(self):
        """ :return: backaction rates as a matrix, row = mechanical mode, column = cavity mode """
        return np.array([[self.Gamma11, self.Gamma12], [self.Gamma21, self.Gamma22]])

    @property
    def delta_omega(self):
        return self.mech[0].omega - self.mech[1].omega

    @property
    def mean_omega(self):
        return (self.mech[0].omega + self.mech[1].omega) / 2

    @property
    def off_diagonal(self):
        """ :return: the net mediated coupling Gamma1 + Gamma2 entering H_eff """
        return float(-self.H_eff[0, 1].imag)

    def is_single_cavity(self):
        return self.Gamma2 == 0 and self.Gamma12 == 0 and self.Gamma22 == 0


@dataclass(frozen=True)
class Eigenmode:
    omega_eig: float
    gamma_eig: float
    classification: str
    regime: str


@dataclass(frozen=True)
class EigenmodeReport:
    """ Eigenmodes ordered (plus, minus): plus is the higher-frequency branch before the EP, the broad one after """

    modes: Tuple[Eigenmode, Eigenmode]
    regime: str
    discriminant: complex
    source: str

    @property
    def plus(self):
        return self.modes[0]

    @property
    def minus(self):
        return self.modes[1]

    @property
    def omegas(self):
        return np.array([mode.omega_eig for mode in self.modes])

    @property
    def gammas(self):
        return np.array([mode.gamma_eig for mode in self.modes])

    @property
    def classification(self):
        return '|'.join(mode.classification for mode in self.modes)


@dataclass(frozen=True, eq=False)
class DarkBrightBasis:
    bright: np.ndarray
    dark: np.ndarray
    cavity: int


def effective_model(params):
    """ Eliminates both cavity modes and assembles the effective Hamiltonian """

    check_adiabaticity(params)

    G = params.G
    kappas = np.array([mode.kappa for mode in params.cav])

    Gamma = G ** 2 / kappas[np.newaxis, :]
    Gamma1 = G[0, 0] * G[1, 0] / kappas[0]
    Gamma2 = G[0, 1] * G[1, 1] / kappas[1]
    mediated = Gamma1 + Gamma2
    if abs(mediated) <= CANCELLATION_TOLERANCE * (abs(Gamma1) + abs(Gamma2)):
        mediated = 0.0

    mech = params.mech
    H_eff = np.array([
        [mech[0].omega - 1j * (mech[0].gamma + Gamma[0, 0] + Gamma[0, 1]), -1j * mediated],
        [-1j * mediated, mech[1].omega - 1j * (mech[1].gamma + Gamma[1, 0] + Gamma[1, 1])]
    ])

    return EffectiveModel(
        H_eff=H_eff,
        Gamma11=float(Gamma[0, 0]),
        Gamma12=float(Gamma[0, 1]),
        Gamma21=float(Gamma[1, 0]),
        Gamma22=float(Gamma[1, 1]),
        Gamma1=float(Gamma1),
        Gamma2=float(Gamma2),
        mech=mech,
        coupling=params.coupling
    )


def discriminant(H):
    """ Discriminant (H00 - H11)^2 + 4 H01 H10 of the characteristic polynomial of a 2x2 matrix """
    return complex((H[0, 0] - H[1, 1]) ** 2 + 4 * H[0, 1] * H[1, 0])


def _classify_regime(disc, delta_omega, coupling_rate):
    if coupling_rate == 0:
        return NOT_APPLICABLE

    scale = max(abs(delta_omega), abs(coupling_rate))
    if abs(disc) < EP_TOLERANCE * scale ** 2:
        return AT_EP
    return PRE_EP if disc.real > 0 else POST_EP


def _equal_rates(first, second, tolerance=EQUAL_GAMMA_TOLERANCE):
    return abs(first - second) <= tolerance * (first + second) / 2


def eigenmodes_closed_form(eff):
    """
    Eigenmodes of the single-cavity, equal-damping case:
    before the EP omega = omega_bar +/- sqrt((dw/2)^2 - Gamma1^2) with a common linewidth, after it a common
    frequency and linewidths gamma + Gamma1 +/- sqrt(Gamma1^2 - (dw/2)^2)
    """

    if not eff.is_single_cavity():
        raise ClosedFormInapplicableError('Closed form inapplicable: the second cavity mode is active')

    gamma1, gamma2 = eff.mech[0].gamma, eff.mech[1].gamma
    if not _equal_rates(gamma1, gamma2):
        raise ClosedFormInapplicableError(
            'Closed form inapplicable: gamma1 = {0:.6g} and gamma2 = {1:.6g} rad/s differ by more than {2:.0%}'.format(
                gamma1, gamma2, EQUAL_GAMMA_TOLERANCE
            )
        )
    if not _equal_rates(eff.Gamma11, eff.Gamma21) and (eff.Gamma11 or eff.Gamma21):
        raise ClosedFormInapplicableError('Closed form inapplicable: unequal backaction rates Gamma11 and Gamma21')

    half_split = eff.delta_omega / 2
    coupling = eff.Gamma1
    damping = (gamma1 + gamma2) / 2 + (eff.Gamma11 + eff.Gamma21) / 2

    disc = complex(4 * (half_split ** 2 - coupling ** 2))
    regime = _classify_regime(disc, eff.delta_omega, coupling)
    root = np.sqrt(abs(half_split ** 2 - coupling ** 2))

    if regime == POST_EP:
        # damping - root without cancellation when Gamma1 >> |dw|
        narrow = (damping - abs(coupling)) + half_split ** 2 / (abs(coupling) + root)
        gammas = (damping + root, narrow)
        omegas = (eff.mean_omega, eff.mean_omega)
        classifications = (BRIGHT, DARK)
    elif regime == AT_EP:
        gammas = (damping, damping)
        omegas = (eff.mean_omega, eff.mean_omega)
        classifications = (HYBRID, HYBRID)
    else:
        gammas = (damping, damping)
        omegas = (eff.mean_omega + root, eff.mean_omega - root)
        classifications = (HYBRID, HYBRID)

    modes = tuple(Eigenmode(float(w), float(g), c, regime) for w, g, c in zip(omegas, gammas, classifications))
    return EigenmodeReport(modes=modes, regime=regime, discriminant=disc, source=CLOSED_FORM)


def _reference_basis(coupling):
    if coupling is None:
        return None
    for cavity in range(2):
        if np.any(coupling.G[:, cavity] != 0):
            return dark_bright_basis(coupling, cavity)
    return None


def _classify_vector(vector, basis):
    if basis is None:
        return HYBRID

    vector = vector / np.linalg.norm(vector)
    if abs(np.vdot(basis.dark, vector)) ** 2 > OVERLAP_THRESHOLD:
        return DARK
    if abs(np.vdot(basis.bright, vector)) ** 2 > OVERLAP_THRESHOLD:
        return BRIGHT
    return HYBRID


def eigenmodes_numeric(eff):
    """ Eigen-decomposition of the effective Hamiltonian: omega = Re(lambda), gamma = -Im(lambda) """

    omega_ref = eff.mean_omega
    shifted = eff.H_eff - omega_ref * np.eye(2)
    eigenvalues, eigenvectors = np.linalg.eig(shifted)

    disc = discriminant(eff.H_eff)
    regime = _classify_regime(disc, eff.delta_omega, eff.off_diagonal)

    if regime == POST_EP:
        order = np.argsort(eigenvalues.imag)  # most negative imaginary part = broadest first
    else:
        order = np.argsort(-eigenvalues.real)

    basis = _reference_basis(eff.coupling)
    modes = tuple(
        Eigenmode(
            omega_eig=float(eigenvalues[k].real + omega_ref),
            gamma_eig=float(-eigenvalues[k].imag),
            classification=_classify_vector(eigenvectors[:, k], basis),
            regime=regime
        )
        for k in order
    )
    return EigenmodeReport(modes=modes, regime=regime, discriminant=disc, source=NUMERIC)


def eigenmodes(eff):
    """ :return: the closed-form report when its precondition holds, otherwise the numeric one """

    try:
        return eigenmodes_closed_form(eff)
    except ClosedFormInapplicableError:
        return eigenmodes_numeric(eff)


def scale_cavity_coupling(params, cavity, Gamma):
    """
    :return: params with the coupling vector of one cavity rescaled so that its mediated coupling
    G_1j G_2j / kappa_j has magnitude Gamma, keeping the direction of the vector
    """

    G = np.array(params.G)
    current = abs(G[0, cavity] * G[1, cavity]) / params.cav[cavity].kappa
    if current == 0:
        raise ConfigError('Cavity {0} does not couple both mechanical modes'.format(cavity + 1), fields=['G'])

    G[:, cavity] *= np.sqrt(Gamma / current)
    return params.with_coupling(G)


def locate_ep(params, grid):
    """
    Locates the exceptional point of the single-cavity scenario along a grid of Gamma1 values (rad/s).
    :return: the analytic value |dw|/2, the grid point with the smallest eigenvalue gap, and that gap
    """

    if 1 in params.active_cavities():
        raise ClosedFormInapplicableError('EP location requires a single active cavity, cavity 2 is coupled')

    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ConfigError('EP search grid must be non-empty and non-negative', fields=['grid'])

    gaps = []
    for Gamma1 in grid:
        H = effective_model(scale_cavity_coupling(params, 0, Gamma1)).H_eff
        shifted = H - np.mean(np.diag(H).real) * np.eye(2)
        eigenvalues = np.linalg.eigvals(shifted)
        gaps.append(abs(eigenvalues[0] - eigenvalues[1]))

    index = int(np.argmin(gaps))
    return EPLocation(analytic=abs(params.delta_omega) / 2, numeric=float(grid[index]), min_gap=float(gaps[index]))


def dark_bright_basis(coupling, cavity=0):
    """ Bright vector along (G_1j, G_2j) and dark vector along (G_2j, -G_1j), both normalized """

    vector = coupling.vector(cavity)
    norm = np.hypot(vector[0], vector[1])
    if norm == 0:
        raise ConfigError('Cavity {0} has a zero coupling vector'.format(cavity + 1), fields=['G'])

    bright = vector / norm
    dark = np.array([vector[1], -vector[0]]) / norm
    return DarkBrightBasis(bright=bright, dark=dark, cavity=cavity)


def dark_mode_condition(params, ratio_threshold=DARK_MODE_RATIO_THRESHOLD):
    """ :return: True when |G11 G21| / kappa1 >= ratio_threshold * |dw| / 2 """

    Gamma1 = abs(params.G[0, 0] * params.G[1, 0]) / params.cav[0].kappa
    half_split = abs(params.delta_omega) / 2
    if half_split == 0:
        return Gamma1 > 0
    # relative slack so that a rate set exactly at the threshold counts
    return Gamma1 >= ratio_threshold * half_split * (1 - 1e-9)


def coupling_vectors_perpendicular(coupling, tolerance=1e-12):
    """ :return: True when (G11, G21) and (G12, G22) are orthogonal """

    first, second = coupling.vector(0), coupling.vector(1)
    scale = np.linalg.norm(first) * np.linalg.norm(second)
    if scale == 0:
        return False
    return abs(np.dot(first, second)) <= tolerance * scale
