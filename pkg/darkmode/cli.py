import argparse
import json
import logging
import sys

from . import __VERSION__
from .csv_utils import FORMATS, emit, write_spectrum_csv, write_trajectory
from .effective import effective_model, eigenmodes
from .exceptions import ClosedFormInapplicableError, ConfigError, derive_error_data
from .models import build_dynamics
from .scenarios import builtin_scenarios, get_scenario
from .spectra import default_grid, fit_lorentzians, probe_psd, spectral_thermometry
from .steady_state import dark_mode_limit, phonon_approximate, phonon_report, reduced_lyapunov, steady_state
from .sweep import SweepOptions, run_sweep
from .trajectory import TrajectoryConfig, estimate_occupations, oracle_model, simulate
from .utils import get_setting, hz_to_rad, json_serializer, rad_to_hz

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def _print(data, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(data, indent=2, sort_keys=True, default=json_serializer) + '\n')


def _point(args):
    scenario = get_scenario(args.scenario)
    return scenario, scenario.params_at(hz_to_rad(args.control_hz))


def scenario_list(args):
    for name, scenario in builtin_scenarios().items():
        sys.stdout.write('{0}\t{1}\n'.format(name, scenario.description))
    return EXIT_OK


def scenario_run(args):
    scenario = get_scenario(args.scenario)
    options = SweepOptions(
        with_full_model=args.full_model,
        with_spectra=args.spectra,
        with_trajectory_check=args.trajectory_check,
        parallelism=args.parallelism,
        seed=args.seed
    )
    result = run_sweep(scenario, options)
    for path in emit(result, format=args.format, out_dir=args.out_dir):
        sys.stdout.write(path + '\n')

    if result.partial:
        logger.warning('{0} of {1} points failed'.format(result.failures, len(result.rows)))
        return EXIT_PARTIAL
    return EXIT_OK


def eigen(args):
    _, params = _point(args)
    report = eigenmodes(effective_model(params))
    _print({
        'source': report.source,
        'regime': report.regime,
        'modes': [
            {
                'omega_hz': rad_to_hz(mode.omega_eig),
                'gamma_hz': rad_to_hz(mode.gamma_eig),
                'classification': mode.classification
            }
            for mode in report.modes
        ]
    })
    return EXIT_OK


def cool(args):
    scenario, params = _point(args)
    n_th = scenario.n_th or None
    if args.full_model:
        report = phonon_report(steady_state(build_dynamics(params)), n_th=n_th)
    else:
        report = phonon_report(reduced_lyapunov(effective_model(params)), n_th=n_th)
    _print({'n1': report.n1, 'n2': report.n2, 'n_total': report.n_total, 'n_total_over_nth': report.normalized})
    return EXIT_OK


def psd(args):
    _, params = _point(args)
    spectrum = probe_psd(build_dynamics(params), params.probe_weights, default_grid(params, points=args.points))
    output = {'occupation_in_window': spectrum.integral()}

    if args.out:
        write_spectrum_csv(spectrum, args.out)
        output['file'] = args.out
    if args.fit:
        fit = fit_lorentzians(spectrum, n_peaks=args.fit)
        thermometry = spectral_thermometry(fit, params.probe_weights)
        output['peaks'] = [
            {
                'center_hz': rad_to_hz(peak.center),
                'half_width_hz': rad_to_hz(peak.half_width),
                'occupation': occupation
            }
            for peak, occupation in zip(fit.peaks, thermometry.per_peak)
        ]
        output['probe_occupation'] = thermometry.total

    _print(output)
    return EXIT_OK


def limit(args):
    gamma = hz_to_rad(args.gamma_hz)
    delta_omega = hz_to_rad(args.delta_omega_hz)
    result = dark_mode_limit(gamma, delta_omega, args.n_th)
    output = {'exact': result.exact, 'approx': result.approx, 'exact_over_nth': result.exact / args.n_th}
    if args.gamma1_hz is not None:
        output['approx_at_gamma1'] = phonon_approximate(gamma, hz_to_rad(args.gamma1_hz), delta_omega, args.n_th)
    _print(output)
    return EXIT_OK


def trajectory(args):
    scenario, params = _point(args)
    cfg = TrajectoryConfig(
        dt=args.dt, n_steps=args.steps, n_burn_in=args.burn_in, seed=args.seed, record_stride=args.stride
    )
    run = simulate(oracle_model(params, full_model=args.full_model), cfg)
    if args.out:
        write_trajectory(run, args.out, metadata_path=args.out + '.meta.json')

    report = estimate_occupations(run, n_th=scenario.n_th or None)
    _print({
        'n1': report.n1,
        'n1_error': report.n1_error,
        'n2': report.n2,
        'n2_error': report.n2_error,
        'n_total': report.n_total,
        'n_total_error': report.n_total_error,
        'metadata': run.metadata
    })
    return EXIT_OK


def _add_point_arguments(parser):
    parser.add_argument('scenario', help='built-in scenario name or a .json config')
    parser.add_argument('--control-hz', type=float, required=True, help='value of the swept rate, Hz')


def build_parser():
    parser = argparse.ArgumentParser(prog='darkmode', description='Mechanical dark-mode cooling toolkit')
    parser.add_argument('--version', action='version', version='%(prog)s {0}'.format(__VERSION__))
    parser.add_argument('--log-level', default=None, help='logging level (default: DARKMODE_LOG_LEVEL or WARNING)')
    commands = parser.add_subparsers(dest='command', required=True)

    scenario = commands.add_parser('scenario', help='list or run scenarios')
    scenario_commands = scenario.add_subparsers(dest='scenario_command', required=True)
    scenario_commands.add_parser('list', help='list built-in scenarios').set_defaults(handler=scenario_list)

    run = scenario_commands.add_parser('run', help='run a sweep and write its outputs')
    run.add_argument('scenario', help='built-in scenario name or a .json config')
    run.add_argument('--out-dir', default='.')
    run.add_argument('--format', choices=FORMATS, default='csv')
    run.add_argument('--parallelism', type=int, default=1)
    run.add_argument('--seed', type=int, default=0)
    run.add_argument('--full-model', action='store_true', help='add four-mode steady-state columns')
    run.add_argument('--spectra', action='store_true', help='write a probe spectrum per point')
    run.add_argument('--trajectory-check', action='store_true', help='add stochastic trajectory estimates')
    run.set_defaults(handler=scenario_run)

    eigen_parser = commands.add_parser('eigen', help='eigenmodes at one point')
    _add_point_arguments(eigen_parser)
    eigen_parser.set_defaults(handler=eigen)

    cool_parser = commands.add_parser('cool', help='steady-state phonon numbers at one point')
    _add_point_arguments(cool_parser)
    cool_parser.add_argument('--full-model', action='store_true')
    cool_parser.set_defaults(handler=cool)

    psd_parser = commands.add_parser('psd', help='probe spectrum at one point')
    _add_point_arguments(psd_parser)
    psd_parser.add_argument('--points', type=int, default=2001)
    psd_parser.add_argument('--fit', type=int, choices=(1, 2), default=None, help='fit this many Lorentzians')
    psd_parser.add_argument('--out', default=None, help='spectrum CSV path')
    psd_parser.set_defaults(handler=psd)

    limit_parser = commands.add_parser('limit', help='single-cavity dark-mode cooling limit')
    limit_parser.add_argument('--gamma-hz', type=float, required=True)
    limit_parser.add_argument('--delta-omega-hz', type=float, required=True)
    limit_parser.add_argument('--n-th', type=float, required=True)
    limit_parser.add_argument('--gamma1-hz', type=float, default=None, help='also evaluate the approximate formula')
    limit_parser.set_defaults(handler=limit)

    trajectory_parser = commands.add_parser('trajectory', help='stochastic trajectory at one point')
    _add_point_arguments(trajectory_parser)
    trajectory_parser.add_argument('--dt', type=float, default=1e-3, help='step, s')
    trajectory_parser.add_argument('--steps', type=int, default=400000)
    trajectory_parser.add_argument('--burn-in', type=int, default=10000)
    trajectory_parser.add_argument('--stride', type=int, default=10)
    trajectory_parser.add_argument('--seed', type=int, default=0)
    trajectory_parser.add_argument('--full-model', action='store_true')
    trajectory_parser.add_argument('--out', default=None, help='trajectory CSV path')
    trajectory_parser.set_defaults(handler=trajectory)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    level = args.log_level or get_setting('LOG_LEVEL', 'WARNING')
    logging.basicConfig(level=level.upper(), format='%(levelname)s %(name)s: %(message)s')

    try:
        return args.handler(args)
    except (ConfigError, ClosedFormInapplicableError) as e:
        _print(derive_error_data(e), stream=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:
        logger.debug('Command failed', exc_info=True)
        _print(derive_error_data(e), stream=sys.stderr)
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
