"""File formats: signal and track CSV, time-frequency CSV/PGM, JSON reports.

Signal CSV comes in two layouts:

    time,value            one row per sample; time,real,imag for complex signals
    0,0.5
    0.00390625,0.49

    sample_rate=256       a header line, then value (or real,imag) per row
    0.5
    0.49

Times must increase uniformly. Every malformed input raises ParseError with
the offending line number.
"""
import csv
import json
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from errors import DomainError, ParseError
from signals import Signal
from squeeze import SSTResult
from stft import TFMatrix

logger = logging.getLogger(__name__)

PGM_MAXVAL = 65535
PGM_RANGE_DB = 80.0
UNIFORM_TOLERANCE = 1e-6
SAMPLE_RATE_KEY = 'sample_rate='


def _number(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(line, 'not a number: {!r}'.format(text))


def _rows(handle):
    for line, row in enumerate(csv.reader(handle), start=1):
        row = [cell.strip() for cell in row]
        if row and any(row):
            yield line, row


def _is_header(row) -> bool:
    try:
        [float(cell) for cell in row]
    except ValueError:
        return True
    return False


def read_signal_csv(path: str) -> Signal:
    """Reads a signal in either CSV layout.

    :rtype: Signal
    """
    with open(path, newline='') as handle:
        rows = list(_rows(handle))
    if not rows:
        raise ParseError(1, 'empty file')

    sample_rate = None
    first_line, first = rows[0]
    if first[0].lower().startswith(SAMPLE_RATE_KEY):
        sample_rate = _number(first[0][len(SAMPLE_RATE_KEY):], first_line)
        if not (math.isfinite(sample_rate) and sample_rate > 0):
            raise ParseError(first_line, 'sample_rate must be positive')
        rows = rows[1:]
    elif _is_header(first):
        rows = rows[1:]
    if len(rows) < 2:
        raise ParseError(rows[-1][0] if rows else first_line, 'a signal needs at least 2 samples')

    width = len(rows[0][1])
    allowed = (1, 2) if sample_rate is not None else (2, 3)
    if width not in allowed:
        raise ParseError(rows[0][0], 'expected {} columns, got {}'.format(
            ' or '.join(map(str, allowed)), width))
    table = np.empty((len(rows), width))
    for i, (line, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(line, 'expected {} columns, got {}'.format(width, len(row)))
        table[i] = [_number(cell, line) for cell in row]

    t0 = 0.0
    if sample_rate is None:
        times, table = table[:, 0], table[:, 1:]
        steps = np.diff(times)
        bad = np.nonzero(steps <= 0)[0]
        if bad.size:
            raise ParseError(rows[bad[0] + 1][0], 'time does not increase')
        step = (times[-1] - times[0]) / (times.size - 1)
        uneven = np.nonzero(np.abs(steps - steps[0]) > UNIFORM_TOLERANCE * steps[0])[0]
        if uneven.size:
            raise ParseError(rows[uneven[0] + 1][0], 'time is not uniformly sampled')
        sample_rate, t0 = 1.0 / step, times[0]

    samples = table[:, 0] if table.shape[1] == 1 else table[:, 0] + 1j * table[:, 1]
    logger.info('read %d samples at %.6g Hz from %s', samples.size, sample_rate, path)
    return Signal(samples, sample_rate, t0)


def write_signal_csv(signal: Signal, path: str, with_time: bool = True):
    columns = [signal.samples.real]
    names = ['value'] if not signal.is_complex else ['real', 'imag']
    if signal.is_complex:
        columns.append(signal.samples.imag)
    if with_time:
        columns.insert(0, signal.times)
        header = ','.join(['time'] + names)
    else:
        header = '{}{!r}'.format(SAMPLE_RATE_KEY, signal.sample_rate)
    np.savetxt(path, np.column_stack(columns), fmt='%.17g', delimiter=',', header=header, comments='')


def write_track_csv(times, values, path: str, name: str = 'value'):
    """A time,value CSV for sigma tracks and entropy curves."""
    np.savetxt(path, np.column_stack([times, values]), fmt='%.17g', delimiter=',',
               header='time,{}'.format(name), comments='')


def _magnitude_and_grids(tf: Union[TFMatrix, SSTResult]):
    if isinstance(tf, SSTResult):
        return tf.magnitude(), tf.time_grid, tf.out_freq_grid
    return tf.magnitude(), tf.time_grid, tf.freq_grid


def _write_tf_csv(magnitude, time_grid, freq_grid, path):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['time\\freq'] + ['%.17g' % f for f in freq_grid])
        for t, row in zip(time_grid, magnitude):
            writer.writerow(['%.17g' % t] + ['%.17g' % v for v in row])


def read_tf_csv(path: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of the CSV export: (magnitude, time_grid, freq_grid)."""
    with open(path, newline='') as handle:
        rows = list(_rows(handle))
    if len(rows) < 2:
        raise ParseError(len(rows) + 1, 'a matrix needs a header and at least one row')
    _, header = rows[0]
    freq_grid = np.array([_number(cell, rows[0][0]) for cell in header[1:]])
    table = []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(line, 'expected {} columns, got {}'.format(len(header), len(row)))
        table.append([_number(cell, line) for cell in row])
    table = np.array(table)
    return table[:, 1:], table[:, 0], freq_grid


def _pgm_levels(magnitude: np.ndarray) -> np.ndarray:
    peak = magnitude.max() if magnitude.size else 0.0
    if peak == 0:
        return np.zeros(magnitude.shape, dtype='>u2')
    with np.errstate(divide='ignore'):
        decibels = 20 * np.log10(magnitude / peak)
    scaled = (np.clip(decibels, -PGM_RANGE_DB, 0.0) + PGM_RANGE_DB) / PGM_RANGE_DB
    return np.round(scaled * PGM_MAXVAL).astype('>u2')


def _write_pgm(magnitude, path):
    # time runs left to right, frequency bottom to top
    image = _pgm_levels(magnitude).T[::-1]
    with open(path, 'wb') as handle:
        handle.write('P5\n{} {}\n{}\n'.format(image.shape[1], image.shape[0], PGM_MAXVAL).encode('ascii'))
        handle.write(np.ascontiguousarray(image).tobytes())


def export_tf(tf: Union[TFMatrix, SSTResult], path: str, fmt: Optional[str] = None):
    """Writes |tf| as CSV (rows per time, grids in the first row and column) or as a
    16-bit log-magnitude PGM. The format defaults to the file extension."""
    fmt = (fmt or path.rsplit('.', 1)[-1]).lower()
    magnitude, time_grid, freq_grid = _magnitude_and_grids(tf)
    if not np.all(np.isfinite(magnitude)):
        raise DomainError('cannot export a transform with non-finite values')
    if fmt == 'csv':
        _write_tf_csv(magnitude, time_grid, freq_grid, path)
    elif fmt == 'pgm':
        _write_pgm(magnitude, path)
    else:
        raise DomainError('Invalid export format {!r}'.format(fmt))
    logger.info('wrote %dx%d transform to %s', magnitude.shape[0], magnitude.shape[1], path)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_report(report: dict, path: str):
    """JSON with sorted keys; non-finite numbers become null."""
    with open(path, 'w') as handle:
        json.dump(_jsonable(report), handle, sort_keys=True, indent=2)
        handle.write('\n')
