import json
import os

import numpy as np

from darkmode import GAMMA1_HZ, GAMMA2_HZ, MEAN_OMEGA_HZ, THERMAL_OCCUPATION
from darkmode.exceptions import NumericError
from darkmode.models import CavityMode, CouplingMatrix, MechanicalMode, SystemParams
from darkmode.steady_state import reduced_lyapunov
from darkmode.utils import hz_to_rad

EQUAL_GAMMA_HZ = 0.635


def mechanical_modes(delta_omega_hz=80.0, gamma1_hz=GAMMA1_HZ, gamma2_hz=GAMMA2_HZ, n_th=THERMAL_OCCUPATION):
    return (
        MechanicalMode(hz_to_rad(MEAN_OMEGA_HZ + delta_omega_hz / 2), hz_to_rad(gamma1_hz), n_th),
        MechanicalMode(hz_to_rad(MEAN_OMEGA_HZ - delta_omega_hz / 2), hz_to_rad(gamma2_hz), n_th)
    )


def cavity_modes(n_opt=0.0):
    detuning = -hz_to_rad(MEAN_OMEGA_HZ)
    return (
        CavityMode(hz_to_rad(270e3) / 2, detuning, n_opt),
        CavityMode(hz_to_rad(290e3) / 2, detuning, n_opt)
    )


def params_with_G(G, **kwargs):
    return SystemParams(mech=mechanical_modes(**kwargs), cav=cavity_modes(), coupling=CouplingMatrix(G))


def single_cavity_params(Gamma1_hz, **kwargs):
    """ g11 = g21 with the first cavity only, scaled to a mediated coupling Gamma1 """

    cav = cavity_modes()
    G11 = np.sqrt(hz_to_rad(Gamma1_hz) * cav[0].kappa)
    return SystemParams(mech=mechanical_modes(**kwargs), cav=cav, coupling=CouplingMatrix([[G11, 0], [G11, 0]]))


def equal_gamma_params(Gamma1_hz, delta_omega_hz=80.0, n_th=THERMAL_OCCUPATION):
    return single_cavity_params(
        Gamma1_hz, delta_omega_hz=delta_omega_hz, gamma1_hz=EQUAL_GAMMA_HZ, gamma2_hz=EQUAL_GAMMA_HZ, n_th=n_th
    )


def small_config(values_hz, kind='single_cavity', name='test-sweep', delta_omega_hz=80.0, **extra):
    parameter = 'Gamma12_hz' if kind == 'fixed_gamma1_sweep_gamma12' else 'Gamma1_hz'
    config = {
        'name': name,
        'delta_omega_hz': delta_omega_hz,
        'axis': {'parameter': parameter, 'spacing': 'explicit', 'values_hz': list(values_hz)},
        'rule': {'kind': kind}
    }
    if kind == 'fixed_gamma1_sweep_gamma12':
        config['rule']['gamma1_hz'] = 1000.0
    config.update(extra)
    return config


def write_config(directory, config, filename='config.json'):
    path = os.path.join(directory, filename)
    with open(path, 'w') as f:
        json.dump(config, f)
    return path


def failing_above(threshold_hz):
    """ reduced_lyapunov stand-in that fails once the mediated coupling exceeds a threshold """

    def solve(eff, baths=None):
        if eff.Gamma1 > hz_to_rad(threshold_hz):
            raise NumericError('Lyapunov residual too large')
        return reduced_lyapunov(eff, baths)

    return solve
