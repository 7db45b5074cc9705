import logging
import os

import numpy as np
import pandas as pd

from . import MODE_ORDER, SWEEP_COLUMNS, TEXT_COLUMNS
from .exceptions import ConfigError
from .sweep import spectrum_filename
from .utils import dump_json, rad_to_hz

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
FORMATS = ('csv', 'json')


def clean_header_row(header):
    # Strip Byte Order Mark from the beginning of the header row
    return header.lstrip('\ufeff')


def write_csv(data_frame, path):
    """ RFC 4180 quoting, LF line endings and 17 significant digits, so that floats survive a round trip """

    data_frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', na_rep='')
    return path


def _records(data_frame):
    return data_frame.astype(object).where(data_frame.notna(), None).to_dict('records')


def sweep_paths(result, out_dir, format='csv'):
    name = result.scenario.name
    return os.path.join(out_dir, '{0}.{1}'.format(name, format)), os.path.join(out_dir, '{0}.meta.json'.format(name))


def write_spectrum_csv(spectrum, path):
    """ Columns freq_hz and psd; psd stays per rad/s so that its integral over freq_hz is the occupation """

    data_frame = pd.DataFrame({'freq_hz': rad_to_hz(spectrum.freq), 'psd': spectrum.values})
    return write_csv(data_frame, path)


def write_trajectory(trajectory, path, metadata_path=None):
    """ Columns time_s then real and imaginary parts of each mode amplitude """

    columns = {'time_s': trajectory.times}
    for index in range(trajectory.size):
        mode = MODE_ORDER[index]
        columns['{0}_re'.format(mode)] = trajectory.amplitudes[:, index].real
        columns['{0}_im'.format(mode)] = trajectory.amplitudes[:, index].imag

    written = [write_csv(pd.DataFrame(columns), path)]
    if metadata_path:
        written.append(dump_json(trajectory.metadata, metadata_path))
    return written


def emit(result, format='csv', out_dir='.'):
    """
    Writes the sweep table (CSV or JSON records), its metadata JSON and one spectrum CSV per point that carries a
    spectrum. All frequencies are in ordinary Hz.
    :return: list of written paths
    """

    if format not in FORMATS:
        raise ConfigError('Output format must be one of {0}'.format(', '.join(FORMATS)), fields=['format'])

    os.makedirs(out_dir, exist_ok=True)
    table_path, metadata_path = sweep_paths(result, out_dir, format)

    if format == 'csv':
        write_csv(result.rows, table_path)
    else:
        dump_json(_records(result.rows), table_path)
    dump_json(result.metadata, metadata_path)
    written = [table_path, metadata_path]

    for index, spectrum in sorted(result.spectra.items()):
        written.append(write_spectrum_csv(spectrum, os.path.join(out_dir, spectrum_filename(index))))

    logger.info('Wrote {0} files for {1} to {2}'.format(len(written), result.scenario.name, out_dir))
    return written


def read_sweep_csv(path):
    """ Reads an emitted sweep table back; numeric columns come back as float, empty text cells as '' """

    with open(path, 'r') as f:
        header = clean_header_row(f.readline()).strip()
    if not header.startswith(SWEEP_COLUMNS[0]):
        raise ConfigError('{0} is not a sweep table'.format(path), fields=['path'])

    data_frame = pd.read_csv(
        path,
        dtype={column: str for column in TEXT_COLUMNS},
        keep_default_na=False,
        na_values={column: [''] for column in header.split(',') if column not in TEXT_COLUMNS},
        float_precision='round_trip'
    )
    data_frame.columns = [clean_header_row(c) for c in data_frame.columns]

    for column in data_frame.columns:
        if column not in TEXT_COLUMNS:
            data_frame[column] = pd.to_numeric(data_frame[column]).astype(float)
    return data_frame


def read_spectrum_csv(path):
    data_frame = pd.read_csv(path, float_precision='round_trip')
    return np.asarray(data_frame['freq_hz'], dtype=float), np.asarray(data_frame['psd'], dtype=float)
