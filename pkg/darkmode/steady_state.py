import logging

from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import LYAPUNOV_RESIDUAL_TOLERANCE, PSD_FLOOR
from .exceptions import ConfigError, NumericError, UnstableModelError
from .models import DynamicsModel, stability_check
from .utils import rotating_frame

logger = logging.getLogger(__name__)

DarkModeLimit = namedtuple('DarkModeLimit', ('exact', 'approx'))


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """ Steady-state second moments M[p][q] = <v_p^dagger v_q> over the ordered mode vector """

    M: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        M.flags.writeable = False
        object.__setattr__(self, 'M', M)

    @property
    def size(self):
        return self.M.shape[0]

    @property
    def occupations(self):
        return np.real(np.diag(self.M))


@dataclass(frozen=True)
class PhononReport:
    n1: float
    n2: float
    n_total: float
    normalized: Optional[float] = None
    n1_error: Optional[float] = None
    n2_error: Optional[float] = None

    @property
    def n_total_error(self):
        if self.n1_error is None or self.n2_error is None:
            return None
        return float(np.hypot(self.n1_error, self.n2_error))


def solve_lyapunov(A, D):
    """
    Solves conj(A) M + M A^T + D = 0 exactly through the vectorized (Kronecker) linear system.
    The solve runs in a frame rotating at the mean mechanical frequency; M is invariant under that shift.
    """

    A = np.asarray(A, dtype=complex)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]

    stable, abscissa = stability_check(DynamicsModel(A, D))
    if not stable:
        raise UnstableModelError(
            'Drift matrix is unstable (spectral abscissa {0:.6g} rad/s)'.format(abscissa), abscissa=abscissa
        )

    A, _ = rotating_frame(A)
    identity = np.eye(n)
    kernel = np.kron(identity, np.conjugate(A)) + np.kron(A, identity)

    try:
        solution = np.linalg.solve(kernel, -D.ravel(order='F').astype(complex))
    except np.linalg.LinAlgError as e:
        raise NumericError('Lyapunov system is singular: {0}'.format(e))

    M = solution.reshape((n, n), order='F')
    residual = float(np.linalg.norm(np.conjugate(A) @ M + M @ A.T + D))
    scale = float(np.linalg.norm(D))
    if residual > LYAPUNOV_RESIDUAL_TOLERANCE * scale:
        raise NumericError('Lyapunov residual {0:.3g} exceeds tolerance'.format(residual), residual=residual)

    M = (M + M.conj().T) / 2

    norm = np.linalg.norm(M)
    if norm > 0:
        lowest = float(np.min(np.linalg.eigvalsh(M)))
        if lowest < -PSD_FLOOR * norm:
            raise NumericError(
                'Moment matrix is not positive semidefinite (eigenvalue {0:.3g})'.format(lowest), residual=residual
            )

    return MomentMatrix(M, residual=residual / scale if scale else 0.0)


def steady_state(model):
    """ :return: the stationary MomentMatrix of a DynamicsModel """
    return solve_lyapunov(model.drift, model.diffusion)


def _baths(eff, baths):
    if baths is None:
        return [(mode.gamma, mode.n_th) for mode in eff.mech]
    return [(float(gamma), float(n_th)) for gamma, n_th in baths]


def reduced_dynamics(eff, baths=None):
    """
    Drift -i H_eff for (b1, b2), with thermal noise only through the intrinsic channels:
    D = diag(2 gamma_1 n_th1, 2 gamma_2 n_th2). Cavity-induced damping carries no added noise.
    """

    baths = _baths(eff, baths)
    diffusion = np.diag([2 * gamma * n_th for gamma, n_th in baths])
    return DynamicsModel(-1j * eff.H_eff, diffusion)


def reduced_lyapunov(eff, baths=None):
    """ Steady state of the two-mode effective model; baths default to the mechanical modes of eff """
    return steady_state(reduced_dynamics(eff, baths))


def phonon_closed_form(gamma, Gamma1, delta_omega, n_th):
    """
    Total phonon number of two equally damped modes cooled by a single cavity:
    n = 2 n_th gamma [4(gamma + G1)^2 + dw^2] / {(gamma + G1) [4(gamma + G1)^2 + dw^2 - 4 G1^2]}
    """

    damping = gamma + np.asarray(Gamma1, dtype=float)
    bracket = 4 * damping ** 2 + delta_omega ** 2
    result = 2 * n_th * gamma * bracket / (damping * (bracket - 4 * np.asarray(Gamma1, dtype=float) ** 2))
    return float(result) if np.ndim(result) == 0 else result


def phonon_approximate(gamma, Gamma1, delta_omega, n_th):
    """ The Gamma1 >> gamma, dw^2 >> Gamma1 gamma limit: n = 2 n_th gamma (4 G1^2 + dw^2) / (G1 dw^2) """

    Gamma1 = np.asarray(Gamma1, dtype=float)
    result = 2 * n_th * gamma * (4 * Gamma1 ** 2 + delta_omega ** 2) / (Gamma1 * delta_omega ** 2)
    return float(result) if np.ndim(result) == 0 else result


def dark_mode_limit(gamma, delta_omega, n_th):
    """ Phonon number at the EP Gamma1 = |dw|/2, the lowest reachable with a single cavity """

    if delta_omega == 0:
        raise ConfigError(
            'No finite dark-mode limit for degenerate modes: the dark mode exists at all couplings',
            fields=['delta_omega']
        )

    half_split = abs(delta_omega) / 2
    return DarkModeLimit(
        exact=phonon_closed_form(gamma, half_split, delta_omega, n_th),
        approx=8 * n_th * gamma / abs(delta_omega)
    )


def phonon_report(moments, n_th=None, tolerance=PSD_FLOOR):
    """ Extracts the mechanical occupations n_i = M[b_i][b_i] """

    M = moments.M if isinstance(moments, MomentMatrix) else np.asarray(moments)
    occupations = np.real(np.diag(M))[:2]

    floor = -tolerance * max(np.linalg.norm(M), 1.0)
    if np.any(occupations < floor):
        raise NumericError('Negative mechanical occupation {0}'.format(occupations.min()))
    n1, n2 = (float(max(n, 0.0)) for n in occupations)

    n_total = n1 + n2
    normalized = n_total / n_th if n_th else None
    return PhononReport(n1=n1, n2=n2, n_total=n_total, normalized=normalized)


def probe_occupation(moments, weights):
    """
    :return: w^dagger M w / |w|^2 for the probe combination c1 b1 + c2 b2, the same per-unit-weight convention as
    spectral_thermometry. The probe PSD integrates to the unnormalized w^dagger M w.
    """

    M = moments.M if isinstance(moments, MomentMatrix) else np.asarray(moments)
    w = np.zeros(M.shape[0], dtype=complex)
    w[:2] = weights
    norm = float(np.real(np.vdot(w, w)))
    if norm == 0:
        raise ConfigError('Probe weights must not both be zero', fields=['probe_weights'])
    return float(np.real(np.conjugate(w) @ M @ w)) / norm
