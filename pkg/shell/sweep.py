"""
Parameter sweeps: the Cartesian product of the [sweep] axes, one run per
point, spread over a thread pool of at most TUBEFLOW_THREADS workers.

A point that fails (bad config, flow failure, anything the solver raises)
still produces its summary row; the sweep never stops early.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError

from flow.runner import run
from kernels.errors import TubeflowError

from .output import write_bundle, write_rows

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ('termination', 'deviation', 'volD_drift', 'message')


@dataclass(frozen=True)
class SweepRow:
    index: int
    params: tuple
    termination: str
    deviation: float
    drift: float
    message: str = ''

    def as_row(self):
        return [value for _, value in self.params] + [self.termination, self.deviation, self.drift, self.message]


def sweep_points(axes):
    """Every combination of axis values, as tuples of (key, value) pairs."""
    keys = [key for key, _ in axes]
    return [tuple(zip(keys, values)) for values in itertools.product(*(values for _, values in axes))]


def run_point(config_file, index, params, directory=None):
    """Run one sweep point; never raises for a failing run."""
    try:
        setup = config_file.with_overrides(dict(params)).build()
    except ValidationError as e:
        logger.warning('[Sweep] point %d: config rejected: %s', index, '; '.join(e.messages))
        return SweepRow(index, params, 'ConfigError', float('nan'), float('nan'), '; '.join(e.messages))
    try:
        report = run(setup.config)
    except (TubeflowError, ArithmeticError, ValueError) as e:
        logger.error('[Sweep] point %d failed: %s', index, e)
        return SweepRow(index, params, 'Error', float('nan'), float('nan'), str(e))
    message = report.message
    if directory is not None:
        options = replace(setup.output, directory=Path(directory) / f'point_{index:03d}')
        try:
            write_bundle(report, options, setup.text)
        except OSError as e:
            logger.error('[Sweep] point %d: writing %s failed: %s', index, options.directory, e)
            message = f'{message}; output not written: {e}'
    return SweepRow(
        index=index,
        params=params,
        termination=str(report.termination),
        deviation=report.final.deviation,
        drift=report.volume_drift(),
        message=message,
    )


def run_sweep(config_file, threads=None, write_points=True):
    """
    Run every point and write sweep.csv into the [output] directory.
    Returns (rows in point order, path of sweep.csv).
    """
    axes = config_file.sweep_axes()
    points = sweep_points(axes)
    directory = config_file.build().output.directory
    directory.mkdir(parents=True, exist_ok=True)

    cap = settings.TUBEFLOW_THREADS if threads is None else threads
    workers = max(1, min(cap, len(points)))
    logger.info('[Sweep] %d point(s) over %s, %d worker(s)', len(points), ', '.join(k for k, _ in axes), workers)

    point_dir = directory if write_points else None
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(
            lambda item: run_point(config_file, item[0], item[1], point_dir), enumerate(points)
        ))

    header = [key for key, _ in axes] + list(SUMMARY_COLUMNS)
    path = write_rows(directory / 'sweep.csv', header, [row.as_row() for row in rows])
    failed = sum(1 for row in rows if row.termination not in ('ReachedTEnd', 'SteadyState'))
    logger.info('[Sweep] done: %d of %d run(s) ended normally', len(rows) - failed, len(rows))
    return rows, path
