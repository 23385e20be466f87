"""
Files written for a run: series.csv, one snapshot_<t>.csv per snapshot and,
when plots are on, series.svg and profile.svg.

Numbers are written with 17 significant digits so every value read back is
the float that was written. The SVGs are rendered from Django templates and
reference nothing outside themselves.
"""

import csv
import logging
import math
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from django.template.loader import render_to_string

from flow.models import archive_report
from flow.state import SERIES_COLUMNS

logger = logging.getLogger(__name__)

SNAPSHOT_COLUMNS = ('s', 'r', 'rho', 'u')
PLOT_WIDTH = 360
PLOT_HEIGHT = 220
PLOT_PAD = 44
PROFILE_COLOURS = ('#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b')
MAX_PROFILE_CURVES = len(PROFILE_COLOURS)


def format_number(value):
    return '%.17g' % value


def snapshot_name(t):
    return f'snapshot_{float(t)!r}.csv'


@dataclass
class OutputBundle:
    directory: Path
    series: Path = None
    snapshots: list = dataclass_field(default_factory=list)
    series_svg: Path = None
    profile_svg: Path = None
    archived_pk: int = None

    @property
    def files(self):
        paths = [self.series, *self.snapshots, self.series_svg, self.profile_svg]
        return [path for path in paths if path is not None]


def write_rows(path, header, rows):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    return path


def write_series(directory, report):
    rows = [[float(v) for v in row.as_row()] for row in report.rows]
    return write_rows(Path(directory) / 'series.csv', SERIES_COLUMNS, rows)


def write_snapshot(directory, snapshot):
    rows = zip(*(map(float, column) for column in (snapshot.s, snapshot.r, snapshot.rho, snapshot.u)))
    return write_rows(Path(directory) / snapshot_name(snapshot.t), SNAPSHOT_COLUMNS, rows)


# ─────────────────────────────────────────────
# SVG
# ─────────────────────────────────────────────

def _span(values):
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    low, high = min(finite), max(finite)
    if high - low <= 1e-12 * max(1.0, abs(high)):
        pad = max(abs(high) * 1e-3, 1e-12)
        return low - pad, high + pad
    return low, high


def _points(xs, ys, x_range, y_range):
    """SVG polyline points mapping the data box onto the plot area."""
    (x0, x1), (y0, y1) = x_range, y_range
    width, height = PLOT_WIDTH - 2 * PLOT_PAD, PLOT_HEIGHT - 2 * PLOT_PAD
    points = []
    for x, y in zip(xs, ys):
        if not (math.isfinite(x) and math.isfinite(y)):
            continue
        px = PLOT_PAD + (x - x0) / (x1 - x0) * width
        py = PLOT_HEIGHT - PLOT_PAD - (y - y0) / (y1 - y0) * height
        points.append(f'{px:.2f},{py:.2f}')
    return ' '.join(points)


def _panel(title, xs, curves, x_label):
    """curves: list of (label, colour, ys) sharing the x values."""
    x_range = _span(xs)
    y_range = _span([y for _, _, ys in curves for y in ys])
    return {
        'title': title,
        'x_label': x_label,
        'x_min': '%.4g' % x_range[0],
        'x_max': '%.4g' % x_range[1],
        'y_min': '%.6g' % y_range[0],
        'y_max': '%.6g' % y_range[1],
        'curves': [
            {'label': label, 'colour': colour, 'points': _points(xs, ys, x_range, y_range)}
            for label, colour, ys in curves
        ],
    }


def _layout(panels, columns=2):
    for index, panel in enumerate(panels):
        panel['x'] = (index % columns) * PLOT_WIDTH
        panel['y'] = (index // columns) * PLOT_HEIGHT
    rows = max(1, math.ceil(len(panels) / columns))
    return {
        'panels': panels,
        'width': PLOT_WIDTH * min(columns, max(1, len(panels))),
        'height': PLOT_HEIGHT * rows,
        'plot_width': PLOT_WIDTH,
        'plot_height': PLOT_HEIGHT,
        'pad': PLOT_PAD,
        'inner_right': PLOT_WIDTH - PLOT_PAD,
        'inner_bottom': PLOT_HEIGHT - PLOT_PAD,
    }


def series_svg(report):
    t = [row.t for row in report.rows]
    colour = PROFILE_COLOURS[0]
    panels = [
        _panel('area', t, [('area', colour, [row.area for row in report.rows])], 't'),
        _panel('enclosed volume', t, [('volD', colour, [row.vol_d for row in report.rows])], 't'),
        _panel('average mean curvature', t, [('Hbar', colour, [row.hbar for row in report.rows])], 't'),
        _panel('min u', t, [('min_u', colour, [row.min_u for row in report.rows])], 't'),
        _panel('max v and max phi', t, [
            ('max_v', colour, [row.max_v for row in report.rows]),
            ('max_phi', PROFILE_COLOURS[3], [row.max_phi for row in report.rows]),
        ], 't'),
        _panel('max r', t, [
            ('max_r', colour, [row.max_r for row in report.rows]),
            ('bound', PROFILE_COLOURS[3], [row.bound for row in report.rows]),
        ], 't'),
        _panel('deviation from mean', t, [('max|r - mean r|', colour, [row.deviation for row in report.rows])], 't'),
    ]
    context = _layout(panels)
    context['title'] = f'{report.config.model.name}: {report.termination}'
    return render_to_string('shell/series.svg', context)


def _thin(snapshots, limit=MAX_PROFILE_CURVES):
    if len(snapshots) <= limit:
        return list(snapshots)
    picks = sorted({round(i * (len(snapshots) - 1) / (limit - 1)) for i in range(limit)})
    return [snapshots[i] for i in picks]


def profile_svg(report):
    snapshots = _thin(report.snapshots)
    s = [float(v) for v in snapshots[0].s]
    curves = [
        (f't = {snap.t:.4g}', PROFILE_COLOURS[i % len(PROFILE_COLOURS)], [float(v) for v in snap.r])
        for i, snap in enumerate(snapshots)
    ]
    rho = [
        (f't = {snap.t:.4g}', PROFILE_COLOURS[i % len(PROFILE_COLOURS)], [float(v) for v in snap.rho])
        for i, snap in enumerate(snapshots)
    ]
    context = _layout([_panel('radius r(s)', s, curves, 's'), _panel('mean curvature rho(s)', s, rho, 's')])
    context['title'] = f'{report.config.model.name} on {report.config.domain}'
    context['legend'] = [{'label': label, 'colour': colour} for label, colour, _ in curves]
    return render_to_string('shell/profile.svg', context)


def write_bundle(report, options, config_text=''):
    """Write every output file of a run; returns the OutputBundle."""
    directory = Path(options.directory)
    directory.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(directory=directory)
    bundle.series = write_series(directory, report)
    bundle.snapshots = [write_snapshot(directory, snap) for snap in report.snapshots]
    if options.plots:
        bundle.series_svg = directory / 'series.svg'
        bundle.series_svg.write_text(series_svg(report), encoding='utf-8')
        bundle.profile_svg = directory / 'profile.svg'
        bundle.profile_svg.write_text(profile_svg(report), encoding='utf-8')
    if options.archive:
        stored = archive_report(report, config_text)
        bundle.archived_pk = stored.pk if stored is not None else None
    logger.info('[Output] wrote %d file(s) to %s', len(bundle.files), directory)
    return bundle
