"""
Scenario definitions: a base parameter set, a swept control rate and the rule that turns the control value into a
coupling matrix. Configurations are JSON documents with every frequency in ordinary Hz (keys end in ``_hz``); they
are converted to rad/s here and nowhere else.
"""

import copy
import json
import logging

from dataclasses import dataclass

import numpy as np

from . import CAVITY1_LINEWIDTH_HZ, CAVITY2_LINEWIDTH_HZ, GAMMA1_HZ, GAMMA2_HZ, MEAN_OMEGA_HZ, THERMAL_OCCUPATION
from .exceptions import ConfigError
from .models import CavityMode, CouplingMatrix, MechanicalMode, SystemParams
from .utils import hz_to_rad, thermal_occupation

logger = logging.getLogger(__name__)

GAMMA1_AXIS = 'Gamma1_hz'
GAMMA12_AXIS = 'Gamma12_hz'

SINGLE_CAVITY = 'single_cavity'
FIXED_GAMMA1 = 'fixed_gamma1_sweep_gamma12'
BALANCED = 'balanced'
ENHANCED = 'enhanced'

RULE_AXES = {
    SINGLE_CAVITY: GAMMA1_AXIS,
    FIXED_GAMMA1: GAMMA12_AXIS,
    BALANCED: GAMMA1_AXIS,
    ENHANCED: GAMMA1_AXIS
}

TOP_LEVEL_KEYS = {
    'name', 'description', 'mechanical', 'mean_omega_hz', 'delta_omega_hz', 'gamma1_hz', 'gamma2_hz', 'n_th',
    'temperature_k', 'cavity', 'coupling', 'probe_weights', 'axis', 'rule'
}
MECHANICAL_KEYS = {'omega_hz', 'gamma_hz', 'n_th', 'temperature_k'}
CAVITY_KEYS = {'kappa_hz', 'linewidth_hz', 'detuning_hz', 'n_opt'}
COUPLING_KEYS = {'G_hz', 'g_hz', 'photon_number'}
AXIS_KEYS = {'parameter', 'spacing', 'start_hz', 'stop_hz', 'points', 'values_hz', 'include_hz'}
RULE_KEYS = {'kind', 'gamma1_hz'}

SPACINGS = ('linear', 'log', 'explicit')


def _check_keys(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError('{0} must be an object'.format(section), fields=[section])

    unknown = sorted(set(data) - allowed)
    missing_suffix = [key for key in unknown if key + '_hz' in allowed]
    if missing_suffix:
        raise ConfigError(
            'Frequency keys need the _hz unit suffix: {0}'.format(', '.join(missing_suffix)),
            fields=['{0}.{1}'.format(section, key) for key in missing_suffix]
        )
    if unknown:
        raise ConfigError(
            'Unknown keys in {0}: {1}'.format(section, ', '.join(unknown)),
            fields=['{0}.{1}'.format(section, key) for key in unknown]
        )


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError('{0} must be a finite number'.format(field), fields=[field])
    return float(value)


def _pair(values, field):
    if not isinstance(values, list) or len(values) != 2:
        raise ConfigError('{0} must list exactly two entries'.format(field), fields=[field])
    return values


@dataclass(frozen=True)
class Axis:
    """ Grid over one control rate, in Hz """

    parameter: str
    spacing: str
    start: float = None
    stop: float = None
    points: int = None
    values: tuple = ()
    include: tuple = ()

    def grid_hz(self):
        if self.spacing == 'linear':
            grid = np.linspace(self.start, self.stop, self.points)
        elif self.spacing == 'log':
            grid = np.geomspace(self.start, self.stop, self.points)
        else:
            grid = np.array(self.values, dtype=float)
        return np.unique(np.concatenate([grid, np.array(self.include, dtype=float)]))

    def grid(self):
        """ :return: the control values in rad/s """
        return hz_to_rad(self.grid_hz())


@dataclass(frozen=True)
class Rule:
    """ Maps a control rate (rad/s) onto the coupling matrix """

    kind: str
    gamma1: float = None

    def coupling(self, control, cav):
        if control < 0:
            raise ConfigError('Control rate must be non-negative', fields=['axis'])

        kappa1, kappa2 = cav[0].kappa, cav[1].kappa
        if self.kind == SINGLE_CAVITY:
            G11 = np.sqrt(control * kappa1)
            return CouplingMatrix([[G11, 0.0], [G11, 0.0]])

        if self.kind == FIXED_GAMMA1:
            G11 = np.sqrt(self.gamma1 * kappa1)
            return CouplingMatrix([[G11, np.sqrt(control * kappa2)], [G11, 0.0]])

        G11 = np.sqrt(control * kappa1)
        G12 = np.sqrt(control * kappa2)
        G22 = -G12 if self.kind == BALANCED else G12
        return CouplingMatrix([[G11, G12], [G11, G22]])


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    description: str
    params: SystemParams
    axis: Axis
    rule: Rule
    config: dict

    def grid(self):
        return self.axis.grid()

    def grid_hz(self):
        return self.axis.grid_hz()

    def params_at(self, control):
        """ :return: SystemParams at one control value (rad/s) """
        return self.params.with_coupling(self.rule.coupling(control, self.params.cav))

    @property
    def n_th(self):
        return self.params.mech[0].n_th

    def as_dict(self):
        return copy.deepcopy(self.config)

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.config == other.config

    def __hash__(self):
        return hash(json.dumps(self.config, sort_keys=True))


def _occupation(source, prefix, omega_hz):
    """ Thermal occupation given directly as n_th, or from temperature_k at the mode frequency """

    if 'n_th' in source and 'temperature_k' in source:
        raise ConfigError('Give either n_th or temperature_k', fields=[prefix + 'n_th', prefix + 'temperature_k'])
    if 'temperature_k' not in source:
        return _number(source.get('n_th', THERMAL_OCCUPATION), prefix + 'n_th')

    temperature = _number(source['temperature_k'], prefix + 'temperature_k')
    if temperature <= 0 or omega_hz <= 0:
        raise ConfigError('temperature_k and the mode frequency must be positive', fields=[prefix + 'temperature_k'])
    return float(thermal_occupation(hz_to_rad(omega_hz), temperature))


def _resolve_mechanical(raw):
    shorthand = {'mean_omega_hz', 'delta_omega_hz', 'gamma1_hz', 'gamma2_hz', 'n_th', 'temperature_k'} & set(raw)
    if 'mechanical' in raw:
        if shorthand:
            raise ConfigError(
                'Give either the mechanical list or the shorthand keys, not both',
                fields=['mechanical'] + sorted(shorthand)
            )
        modes = []
        for index, mode in enumerate(_pair(raw['mechanical'], 'mechanical')):
            section = 'mechanical[{0}]'.format(index)
            _check_keys(section, mode, MECHANICAL_KEYS)
            for key in ('omega_hz', 'gamma_hz'):
                if key not in mode:
                    raise ConfigError('{0} is required'.format(key), fields=['{0}.{1}'.format(section, key)])
            modes.append({
                'omega_hz': _number(mode['omega_hz'], section + '.omega_hz'),
                'gamma_hz': _number(mode['gamma_hz'], section + '.gamma_hz'),
                'n_th': _occupation(mode, section + '.', mode['omega_hz'])
            })
        return modes

    mean = _number(raw.get('mean_omega_hz', MEAN_OMEGA_HZ), 'mean_omega_hz')
    if 'delta_omega_hz' not in raw:
        raise ConfigError('delta_omega_hz or a mechanical list is required', fields=['delta_omega_hz'])
    delta = _number(raw['delta_omega_hz'], 'delta_omega_hz')
    n_th = _occupation(raw, '', mean)
    return [
        {'omega_hz': mean + delta / 2, 'gamma_hz': _number(raw.get('gamma1_hz', GAMMA1_HZ), 'gamma1_hz'), 'n_th': n_th},
        {'omega_hz': mean - delta / 2, 'gamma_hz': _number(raw.get('gamma2_hz', GAMMA2_HZ), 'gamma2_hz'), 'n_th': n_th}
    ]


def _resolve_cavity(raw, mean_omega_hz):
    cavities = raw.get('cavity', [{'linewidth_hz': CAVITY1_LINEWIDTH_HZ}, {'linewidth_hz': CAVITY2_LINEWIDTH_HZ}])

    resolved = []
    for index, cavity in enumerate(_pair(cavities, 'cavity')):
        section = 'cavity[{0}]'.format(index)
        _check_keys(section, cavity, CAVITY_KEYS)

        if ('kappa_hz' in cavity) == ('linewidth_hz' in cavity):
            raise ConfigError(
                'Give exactly one of kappa_hz and linewidth_hz',
                fields=[section + '.kappa_hz', section + '.linewidth_hz']
            )
        if 'kappa_hz' in cavity:
            kappa_hz = _number(cavity['kappa_hz'], section + '.kappa_hz')
        else:
            kappa_hz = _number(cavity['linewidth_hz'], section + '.linewidth_hz') / 2

        resolved.append({
            'kappa_hz': kappa_hz,
            'detuning_hz': _number(cavity.get('detuning_hz', -mean_omega_hz), section + '.detuning_hz'),
            'n_opt': _number(cavity.get('n_opt', 0.0), section + '.n_opt')
        })
    return resolved


def _matrix(values, field):
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError('{0} must be a 2x2 numeric matrix'.format(field), fields=[field])
    if matrix.shape != (2, 2) or not np.all(np.isfinite(matrix)):
        raise ConfigError('{0} must be a 2x2 numeric matrix'.format(field), fields=[field])
    return matrix


def _resolve_coupling(raw):
    coupling = raw.get('coupling')
    if coupling is None:
        return {'G_hz': [[0.0, 0.0], [0.0, 0.0]]}
    _check_keys('coupling', coupling, COUPLING_KEYS)

    from_photons = None
    if 'g_hz' in coupling or 'photon_number' in coupling:
        if not ('g_hz' in coupling and 'photon_number' in coupling):
            raise ConfigError(
                'g_hz and photon_number must be given together', fields=['coupling.g_hz', 'coupling.photon_number']
            )
        photon_number = np.array(_pair(coupling['photon_number'], 'coupling.photon_number'), dtype=float)
        if np.any(photon_number < 0):
            raise ConfigError('Photon numbers must be non-negative', fields=['coupling.photon_number'])
        from_photons = _matrix(coupling['g_hz'], 'coupling.g_hz') * np.sqrt(photon_number)[np.newaxis, :]

    if 'G_hz' in coupling:
        G = _matrix(coupling['G_hz'], 'coupling.G_hz')
        if from_photons is not None and not np.allclose(G, from_photons, rtol=1e-9, atol=0):
            raise ConfigError(
                'coupling.G_hz disagrees with coupling.g_hz * sqrt(photon_number)',
                fields=['coupling.G_hz', 'coupling.g_hz', 'coupling.photon_number']
            )
    elif from_photons is not None:
        G = from_photons
    else:
        raise ConfigError('coupling needs G_hz or g_hz with photon_number', fields=['coupling'])

    return {'G_hz': G.tolist()}


def _resolve_axis(raw):
    if 'axis' not in raw:
        raise ConfigError('axis is required', fields=['axis'])
    axis = raw['axis']
    _check_keys('axis', axis, AXIS_KEYS)

    parameter = axis.get('parameter')
    if parameter not in (GAMMA1_AXIS, GAMMA12_AXIS):
        raise ConfigError(
            'axis.parameter must be {0} or {1}'.format(GAMMA1_AXIS, GAMMA12_AXIS), fields=['axis.parameter']
        )
    spacing = axis.get('spacing', 'linear')
    if spacing not in SPACINGS:
        raise ConfigError('axis.spacing must be one of {0}'.format(', '.join(SPACINGS)), fields=['axis.spacing'])

    resolved = {'parameter': parameter, 'spacing': spacing}
    if spacing == 'explicit':
        if 'values_hz' not in axis or not isinstance(axis['values_hz'], list) or not axis['values_hz']:
            raise ConfigError('Explicit axes need a non-empty values_hz list', fields=['axis.values_hz'])
        resolved['values_hz'] = [_number(v, 'axis.values_hz') for v in axis['values_hz']]
    else:
        for key in ('start_hz', 'stop_hz', 'points'):
            if key not in axis:
                raise ConfigError('axis.{0} is required for {1} spacing'.format(key, spacing), fields=['axis.' + key])
        resolved['start_hz'] = _number(axis['start_hz'], 'axis.start_hz')
        resolved['stop_hz'] = _number(axis['stop_hz'], 'axis.stop_hz')
        points = axis['points']
        if isinstance(points, bool) or not isinstance(points, int) or points < 1:
            raise ConfigError('axis.points must be a positive integer', fields=['axis.points'])
        resolved['points'] = points
        if resolved['stop_hz'] < resolved['start_hz']:
            raise ConfigError('axis.stop_hz must not be below axis.start_hz', fields=['axis.start_hz', 'axis.stop_hz'])
        if spacing == 'log' and resolved['start_hz'] <= 0:
            raise ConfigError('Log-spaced axes need a positive start', fields=['axis.start_hz'])

    if 'include_hz' in axis:
        if not isinstance(axis['include_hz'], list):
            raise ConfigError('axis.include_hz must be a list', fields=['axis.include_hz'])
        resolved['include_hz'] = [_number(v, 'axis.include_hz') for v in axis['include_hz']]

    values = resolved.get('values_hz', []) + resolved.get('include_hz', []) + [resolved.get('start_hz', 0.0)]
    if min(values) < 0:
        raise ConfigError('Control rates must be non-negative', fields=['axis'])
    return resolved


def _resolve_rule(raw, axis):
    if 'rule' not in raw:
        raise ConfigError('rule is required', fields=['rule'])
    rule = raw['rule']
    _check_keys('rule', rule, RULE_KEYS)

    kind = rule.get('kind')
    if kind not in RULE_AXES:
        raise ConfigError('rule.kind must be one of {0}'.format(', '.join(sorted(RULE_AXES))), fields=['rule.kind'])
    if RULE_AXES[kind] != axis['parameter']:
        raise ConfigError(
            'rule {0} sweeps {1}, not {2}'.format(kind, RULE_AXES[kind], axis['parameter']),
            fields=['rule.kind', 'axis.parameter']
        )

    resolved = {'kind': kind}
    if kind == FIXED_GAMMA1:
        if 'gamma1_hz' not in rule:
            raise ConfigError('rule {0} needs gamma1_hz'.format(kind), fields=['rule.gamma1_hz'])
        resolved['gamma1_hz'] = _number(rule['gamma1_hz'], 'rule.gamma1_hz')
        if resolved['gamma1_hz'] < 0:
            raise ConfigError('rule.gamma1_hz must be non-negative', fields=['rule.gamma1_hz'])
    elif 'gamma1_hz' in rule:
        raise ConfigError(
            'rule {0} derives Gamma1 from the axis; gamma1_hz conflicts with it'.format(kind),
            fields=['rule.gamma1_hz', 'axis.parameter']
        )
    return resolved


def resolve_config(raw):
    """ Validates a raw configuration and returns it in canonical form, every default filled in """

    _check_keys('config', raw, TOP_LEVEL_KEYS)
    if not isinstance(raw.get('name'), str) or not raw['name']:
        raise ConfigError('name is required', fields=['name'])

    mechanical = _resolve_mechanical(raw)
    mean_omega_hz = (mechanical[0]['omega_hz'] + mechanical[1]['omega_hz']) / 2
    axis = _resolve_axis(raw)

    weights = _pair(raw.get('probe_weights', [1 / np.sqrt(2), 1 / np.sqrt(2)]), 'probe_weights')
    return {
        'name': raw['name'],
        'description': str(raw.get('description', '')),
        'mechanical': mechanical,
        'cavity': _resolve_cavity(raw, mean_omega_hz),
        'coupling': _resolve_coupling(raw),
        'probe_weights': [_number(c, 'probe_weights') for c in weights],
        'axis': axis,
        'rule': _resolve_rule(raw, axis)
    }


def scenario_from_config(raw):
    config = resolve_config(raw)

    mech = [
        MechanicalMode(omega=hz_to_rad(mode['omega_hz']), gamma=hz_to_rad(mode['gamma_hz']), n_th=mode['n_th'])
        for mode in config['mechanical']
    ]
    cav = [
        CavityMode(kappa=hz_to_rad(mode['kappa_hz']), detuning=hz_to_rad(mode['detuning_hz']), n_opt=mode['n_opt'])
        for mode in config['cavity']
    ]
    params = SystemParams(
        mech=mech,
        cav=cav,
        coupling=CouplingMatrix(hz_to_rad(np.array(config['coupling']['G_hz']))),
        probe_weights=config['probe_weights']
    )

    axis_config = config['axis']
    axis = Axis(
        parameter=axis_config['parameter'],
        spacing=axis_config['spacing'],
        start=axis_config.get('start_hz'),
        stop=axis_config.get('stop_hz'),
        points=axis_config.get('points'),
        values=tuple(axis_config.get('values_hz', ())),
        include=tuple(axis_config.get('include_hz', ()))
    )

    rule_config = config['rule']
    gamma1 = rule_config.get('gamma1_hz')
    rule = Rule(kind=rule_config['kind'], gamma1=None if gamma1 is None else hz_to_rad(gamma1))

    return Scenario(
        name=config['name'], description=config['description'], params=params, axis=axis, rule=rule, config=config
    )


def _reject_duplicates(pairs):
    keys = [key for key, _ in pairs]
    duplicates = sorted({key for key in keys if keys.count(key) > 1})
    if duplicates:
        raise ConfigError('Duplicate keys: {0}'.format(', '.join(duplicates)), fields=duplicates)
    return dict(pairs)


def load_config(path):
    """
    Loads a scenario from a JSON file. A sweep metadata file is accepted as well: its ``scenario`` block is the
    resolved configuration of the run that wrote it.
    """

    try:
        with open(path, 'r') as f:
            raw = json.load(f, object_pairs_hook=_reject_duplicates)
    except OSError as e:
        raise ConfigError('Cannot read config {0}: {1}'.format(path, e), fields=['path'])
    except json.JSONDecodeError as e:
        raise ConfigError('Config {0} is not valid JSON: {1}'.format(path, e), fields=['path'])

    if isinstance(raw, dict) and 'scenario' in raw and 'name' not in raw:
        raw = raw['scenario']

    scenario = scenario_from_config(raw)
    logger.info('Loaded scenario {0} from {1}'.format(scenario.name, path))
    return scenario


BUILTIN_CONFIGS = (
    {
        'name': 'scenario-A1',
        'description': 'Dark-mode generation and the exceptional point: cavity 1 couples both modes equally '
                       '(g11 = g21), cavity 2 off, Gamma1 swept',
        'delta_omega_hz': 80.0,
        'axis': {
            'parameter': GAMMA1_AXIS, 'spacing': 'log', 'start_hz': 0.5, 'stop_hz': 1000.0, 'points': 101,
            'include_hz': [40.0]
        },
        'rule': {'kind': SINGLE_CAVITY}
    },
    {
        'name': 'scenario-A2',
        'description': 'Dark-mode breaking: Gamma1 held at 1000 Hz, cavity 2 couples mode 1 only, Gamma12 swept',
        'delta_omega_hz': 80.0,
        'axis': {'parameter': GAMMA12_AXIS, 'spacing': 'linear', 'start_hz': 0.0, 'stop_hz': 500.0, 'points': 41},
        'rule': {'kind': FIXED_GAMMA1, 'gamma1_hz': 1000.0}
    },
    {
        'name': 'scenario-B',
        'description': 'Simultaneous cooling with balanced cavities: g12 = -g22 keeps Gamma1 + Gamma2 = 0',
        'delta_omega_hz': 60.0,
        'axis': {'parameter': GAMMA1_AXIS, 'spacing': 'log', 'start_hz': 0.5, 'stop_hz': 500.0, 'points': 41},
        'rule': {'kind': BALANCED}
    },
    {
        'name': 'scenario-B1',
        'description': 'Single-cavity reference for scenario-B at the same splitting',
        'delta_omega_hz': 60.0,
        'axis': {'parameter': GAMMA1_AXIS, 'spacing': 'log', 'start_hz': 0.5, 'stop_hz': 500.0, 'points': 41},
        'rule': {'kind': SINGLE_CAVITY}
    },
    {
        'name': 'scenario-C',
        'description': 'Enhanced dark mode: g12 = g22, the two cavity-mediated couplings add (Gamma2 = Gamma1)',
        'delta_omega_hz': 60.0,
        'axis': {'parameter': GAMMA1_AXIS, 'spacing': 'log', 'start_hz': 0.5, 'stop_hz': 500.0, 'points': 41},
        'rule': {'kind': ENHANCED}
    }
)


def builtin_scenarios():
    """ :return: dict of the built-in scenarios by name, in definition order """
    return {config['name']: scenario_from_config(config) for config in BUILTIN_CONFIGS}


def get_scenario(name_or_path):
    """ Looks up a built-in scenario by name, otherwise loads a config file """

    scenarios = builtin_scenarios()
    if name_or_path in scenarios:
        return scenarios[name_or_path]
    if name_or_path.endswith('.json'):
        return load_config(name_or_path)
    raise ConfigError(
        'Unknown scenario {0}; choose one of {1} or give a .json config'.format(name_or_path, ', '.join(scenarios)),
        fields=['scenario']
    )
