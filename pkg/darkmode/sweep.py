import datetime
import logging

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import pandas as pd

from . import MAX_FAILURE_FRACTION, RNG_NAME, SWEEP_COLUMNS, TEXT_COLUMNS, __VERSION__
from .effective import effective_model, eigenmodes_closed_form, eigenmodes_numeric
from .exceptions import (
    ClosedFormInapplicableError, ConfigError, FitError, InsufficientSamplesError, NumericError, SweepError,
    UnstableModelError, error_to_string
)
from .models import build_dynamics
from .spectra import default_grid, probe_psd
from .steady_state import dark_mode_limit, phonon_report, reduced_lyapunov, steady_state
from .trajectory import TrajectoryConfig, trajectory_check
from .utils import get_setting, rad_to_hz

logger = logging.getLogger(__name__)

OK = 'ok'
FAILED = 'failed'

POINT_ERRORS = (
    UnstableModelError, NumericError, FitError, InsufficientSamplesError, ClosedFormInapplicableError, ConfigError
)

FULL_MODEL_COLUMNS = ('n1_full_over_nth', 'n2_full_over_nth', 'ntotal_full_over_nth')
TRAJECTORY_COLUMNS = ('ntotal_traj_over_nth', 'ntotal_traj_error_over_nth')
SPECTRUM_COLUMNS = ('spectrum_file',)


@dataclass(frozen=True)
class SweepOptions:
    with_full_model: bool = False
    with_spectra: bool = False
    with_trajectory_check: bool = False
    parallelism: int = 1
    seed: int = 0
    trajectory: TrajectoryConfig = field(
        default_factory=lambda: TrajectoryConfig(dt=1e-3, n_steps=400000, n_burn_in=10000, record_stride=10)
    )

    def __post_init__(self):
        if self.parallelism < 1:
            raise ConfigError('Parallelism must be at least 1', fields=['parallelism'])
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError('Seed must be a 64-bit unsigned integer', fields=['seed'])

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SweepResult:
    scenario: object
    options: SweepOptions
    rows: pd.DataFrame
    metadata: dict
    spectra: dict = field(default_factory=dict)

    @property
    def failures(self):
        return int((self.rows['status'] == FAILED).sum())

    @property
    def partial(self):
        return self.failures > 0


def _timestamp():
    override = get_setting('TIMESTAMP')
    if override:
        return override
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _columns(options):
    columns = list(SWEEP_COLUMNS)
    if options.with_full_model:
        columns.extend(FULL_MODEL_COLUMNS)
    if options.with_spectra:
        columns.extend(SPECTRUM_COLUMNS)
    if options.with_trajectory_check:
        columns.extend(TRAJECTORY_COLUMNS)
    return columns


def spectrum_filename(index):
    return 'spectrum_{0:04d}.csv'.format(index)


def _dark_limit(params, n_th):
    if params.delta_omega == 0:
        return None, 'no dark-mode limit at zero splitting'
    gamma = (params.mech[0].gamma + params.mech[1].gamma) / 2
    return dark_mode_limit(gamma, params.delta_omega, n_th).exact / n_th, None


def _evaluate_point(scenario, options, index, control_hz, control):
    """ :return: (row dict, whether the closed form applied, spectrum or None) for one grid point """

    row = {column: None for column in _columns(options)}
    row.update(control_hz=control_hz, status=OK, reason='')
    notes = []
    spectrum = None

    try:
        params = scenario.params_at(control)
        eff = effective_model(params)
        report = eigenmodes_numeric(eff)
        n_th = scenario.n_th or 1.0
        phonons = phonon_report(reduced_lyapunov(eff), n_th=n_th)
    except POINT_ERRORS as e:
        logger.warning('Sweep point {0} ({1:.6g} Hz) failed: {2}'.format(index, control_hz, error_to_string(e)))
        row.update(status=FAILED, reason='{0}: {1}'.format(type(e).__name__, error_to_string(e)))
        return row, None, None

    row.update(
        omega_plus_hz=rad_to_hz(report.plus.omega_eig),
        omega_minus_hz=rad_to_hz(report.minus.omega_eig),
        gamma_plus_hz=rad_to_hz(report.plus.gamma_eig),
        gamma_minus_hz=rad_to_hz(report.minus.gamma_eig),
        n1_over_nth=phonons.n1 / n_th,
        n2_over_nth=phonons.n2 / n_th,
        ntotal_over_nth=phonons.n_total / n_th,
        classification=report.classification
    )

    try:
        closed_form = eigenmodes_closed_form(eff)
        row.update(
            omega_plus_cf_hz=rad_to_hz(closed_form.plus.omega_eig),
            omega_minus_cf_hz=rad_to_hz(closed_form.minus.omega_eig),
            gamma_plus_cf_hz=rad_to_hz(closed_form.plus.gamma_eig),
            gamma_minus_cf_hz=rad_to_hz(closed_form.minus.gamma_eig),
            regime=closed_form.regime
        )
    except ClosedFormInapplicableError as e:
        closed_form = None
        row['regime'] = report.regime
        notes.append('closed form: ' + error_to_string(e))

    row['dark_limit_over_nth'], note = _dark_limit(params, n_th)
    if note:
        notes.append('dark_limit_over_nth: ' + note)

    if options.with_full_model:
        try:
            full = phonon_report(steady_state(build_dynamics(params)), n_th=n_th)
            row.update(n1_full_over_nth=full.n1 / n_th, n2_full_over_nth=full.n2 / n_th,
                       ntotal_full_over_nth=full.n_total / n_th)
        except POINT_ERRORS as e:
            notes.append('full model: ' + error_to_string(e))

    if options.with_trajectory_check:
        cfg = replace(options.trajectory, seed=options.seed ^ index)
        try:
            estimate = trajectory_check(params, cfg)
            row.update(ntotal_traj_over_nth=estimate.n_total / n_th,
                       ntotal_traj_error_over_nth=estimate.n_total_error / n_th)
        except POINT_ERRORS as e:
            notes.append('trajectory: ' + error_to_string(e))

    if options.with_spectra:
        try:
            spectrum = probe_psd(build_dynamics(params), params.probe_weights, default_grid(params))
            row['spectrum_file'] = spectrum_filename(index)
        except POINT_ERRORS as e:
            notes.append('spectrum: ' + error_to_string(e))

    row['reason'] = '; '.join(notes)
    return row, closed_form is not None, spectrum


def run_sweep(scenario, options=None):
    """
    Evaluates every grid point of a scenario: effective model, numeric eigenmodes (with the closed form alongside
    where it applies), reduced steady state and phonon numbers, plus the cross-checks enabled in options. A failing
    point becomes a row with status 'failed'; more than half failing raises SweepError.
    """

    options = options or SweepOptions()
    parallelism = get_setting('THREADS', options.parallelism, int)

    grid_hz = scenario.grid_hz()
    grid = scenario.grid()
    if len(grid) == 0:
        raise ConfigError('Scenario grid is empty', fields=['axis'])

    started = _timestamp()
    logger.info('Running {0} over {1} points with parallelism {2}'.format(scenario.name, len(grid), parallelism))

    tasks = [(index, float(grid_hz[index]), float(grid[index])) for index in range(len(grid))]
    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as executor:
            outcomes = list(executor.map(lambda task: _evaluate_point(scenario, options, *task), tasks))
    else:
        outcomes = [_evaluate_point(scenario, options, *task) for task in tasks]

    rows = pd.DataFrame([outcome[0] for outcome in outcomes], columns=_columns(options))
    for column in rows.columns:
        if column not in TEXT_COLUMNS:
            rows[column] = rows[column].astype(float)
    spectra = {index: outcome[2] for index, outcome in enumerate(outcomes) if outcome[2] is not None}

    failures = [
        {'index': index, 'control_hz': row['control_hz'], 'reason': row['reason']}
        for index, row in rows.iterrows() if row['status'] == FAILED
    ]
    if len(failures) > MAX_FAILURE_FRACTION * len(rows):
        raise SweepError(
            '{0} of {1} sweep points failed'.format(len(failures), len(rows)), failures=failures
        )

    metadata = {
        'tool_version': __VERSION__,
        'numpy_version': np.__version__,
        'rng': RNG_NAME,
        'seed': options.seed,
        'options': options.as_dict(),
        'scenario': scenario.as_dict(),
        'closed_form_applicable': [outcome[1] for outcome in outcomes],
        'failures': failures,
        'started': started,
        'finished': _timestamp()
    }
    return SweepResult(scenario=scenario, options=options, rows=rows, metadata=metadata, spectra=spectra)
