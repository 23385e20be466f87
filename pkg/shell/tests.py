import csv
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from flow.models import FlowRun
from flow.runner import run
from flow.state import Scheme, SERIES_COLUMNS
from verify.identities import OracleReport

from .configfile import ConfigFile, default_document
from .forms import FlowForm, InitialForm, parse_axis, parse_multiplicities
from .output import format_number, profile_svg, series_svg, snapshot_name, write_bundle, write_series
from .sweep import run_sweep, sweep_points


def _document(directory, initial='profile = clamped\nc = 0.6\na = 0.02', flow='t_end = 0.01', extra=''):
    return (
        '[model]\npreset = spaceform-2-1-compact\n\n'
        '[domain]\nkind = flat\nlength = 6.283185307179586\nn = 33\n\n'
        f'[initial]\n{initial}\n\n'
        f'[flow]\n{flow}\n\n'
        f'[output]\ndirectory = {directory}\n'
        f'{extra}'
    )


class ScratchDirMixin:

    def setUp(self):
        super().setUp()
        scratch = tempfile.TemporaryDirectory()
        self.addCleanup(scratch.cleanup)
        self.scratch = Path(scratch.name)

    def write_config(self, text, name='run.ini'):
        path = self.scratch / name
        path.write_text(text, encoding='utf-8')
        return path


class ParsingTests(SimpleTestCase):

    def test_multiplicities(self):
        self.assertEqual(parse_multiplicities('0:1, 1:2;2:1'), {0.0: 1, 1.0: 2, 2.0: 1})
        with self.assertRaises(ValidationError):
            parse_multiplicities('1-2')

    def test_axis_list_and_range(self):
        self.assertEqual(parse_axis('0, 0.01'), (0.0, 0.01))
        self.assertEqual(parse_axis('0.5:1.0:3'), (0.5, 0.75, 1.0))
        self.assertEqual(parse_axis('33:65:2', int), (33, 65))
        with self.assertRaises(ValidationError):
            parse_axis('1:2')

    def test_sweep_points_are_the_product(self):
        points = sweep_points([('initial.a', (0.0, 0.01)), ('model.b', (1.0, 2.0, 3.0))])
        self.assertEqual(len(points), 6)
        self.assertEqual(points[0], (('initial.a', 0.0), ('model.b', 1.0)))
        self.assertEqual(points[-1], (('initial.a', 0.01), ('model.b', 3.0)))


class ConfigTests(ScratchDirMixin, SimpleTestCase):

    def test_build(self):
        setup = ConfigFile(_document(self.scratch), source='clamped.ini').build()
        self.assertEqual(setup.config.domain.n, 33)
        self.assertIs(setup.config.scheme, Scheme.RK4)
        self.assertEqual(setup.config.t_end, 0.01)
        self.assertEqual(setup.config.label, 'clamped')
        self.assertEqual(setup.output.directory, self.scratch)
        self.assertEqual(setup.boundary_warning, '')

    def test_default_document_builds(self):
        setup = ConfigFile(default_document()).build()
        self.assertEqual(setup.config.model.name, 'spaceform-2-1-compact')
        self.assertEqual(setup.profile.kind, 'clamped')

    def test_cosine_profile_violates_the_hessian_condition(self):
        text = _document(self.scratch, initial='profile = cosine\nc = 0.6\na = 0.02')
        with self.assertRaises(ValidationError) as raised:
            ConfigFile(text).build()
        self.assertIn('boundary residual', ' '.join(raised.exception.messages))
        self.assertIn('[initial]', ' '.join(raised.exception.messages))

    def test_report_mode_runs_anyway(self):
        text = _document(self.scratch, initial='profile = cosine\nc = 0.6\na = 0.02\nboundary_hessian = report')
        with self.assertLogs('shell.configfile', 'WARNING'):
            setup = ConfigFile(text).build()
        self.assertIn('boundary residual', setup.boundary_warning)

    def test_unknown_key_and_section(self):
        with self.assertRaises(ValidationError) as raised:
            ConfigFile(_document(self.scratch, flow='t_end = 0.01\nstep = 3')).build()
        self.assertEqual(raised.exception.messages, ["[flow]: Unknown key 'step'"])
        with self.assertRaises(ValidationError):
            ConfigFile(_document(self.scratch, extra='\n[plots]\nwidth = 3\n'))

    def test_missing_section(self):
        with self.assertRaises(ValidationError) as raised:
            ConfigFile('[model]\npreset = spaceform-2-1-compact\n').build()
        self.assertEqual(raised.exception.messages, ['[domain]: Missing section', '[initial]: Missing section'])

    def test_transverse_must_match_the_model(self):
        text = _document(self.scratch).replace('n = 33', 'n = 33\ntransverse = 3')
        with self.assertRaises(ValidationError) as raised:
            ConfigFile(text).build()
        self.assertIn('m^H - 1', ' '.join(raised.exception.messages))

    def test_phi_constant(self):
        setup = ConfigFile(_document(self.scratch, flow='t_end = 0.01\nphi_constant = 2.5')).build()
        self.assertEqual(setup.config.phi_constant, 2.5)
        self.assertEqual(ConfigFile(_document(self.scratch)).build().config.phi_constant, 1.0)
        form = FlowForm({'phi_constant': '0'})
        self.assertFalse(form.is_valid())
        self.assertIn('phi_constant must be positive', ' '.join(form.messages()))

    def test_dt_and_cfl_are_exclusive(self):
        form = FlowForm({'dt': '1e-3', 'cfl': '0.5'})
        self.assertFalse(form.is_valid())
        self.assertIn('either dt or cfl', ' '.join(form.messages()))

    def test_table_profile(self):
        s = np.linspace(0.0, 2 * math.pi, 41)
        (self.scratch / 'flat.csv').write_text(
            's,r\n' + '\n'.join(f'{a!r},0.6' for a in s) + '\n', encoding='utf-8'
        )
        text = _document(self.scratch, initial='profile = table\ntable = flat.csv')
        built = ConfigFile.load(self.write_config(text)).build()
        self.assertEqual(built.profile.kind, 'table')
        np.testing.assert_allclose(built.config.initial.values, 0.6, rtol=1e-14)

    def test_sloped_table_is_rejected(self):
        s = np.linspace(0.0, 2 * math.pi, 41)
        (self.scratch / 'sloped.csv').write_text(
            's,r\n' + '\n'.join(f'{a!r},{0.6 + 0.01 * a!r}' for a in s) + '\n', encoding='utf-8'
        )
        text = _document(self.scratch, initial='profile = table\ntable = sloped.csv\nboundary_hessian = report')
        with self.assertRaises(ValidationError) as raised:
            ConfigFile.load(self.write_config(text)).build()
        self.assertIn("r' = 0", ' '.join(raised.exception.messages))

    def test_unreadable_file(self):
        with self.assertRaises(ValidationError):
            ConfigFile.load(self.scratch / 'missing.ini')

    def test_initial_form_needs_mean_radius(self):
        setup = ConfigFile(_document(self.scratch)).build()
        form = InitialForm({'profile': 'cosine', 'a': '0.1'}, domain=setup.config.domain)
        self.assertFalse(form.is_valid())
        self.assertIn("'c'", ' '.join(form.messages()))


class OutputTests(ScratchDirMixin, SimpleTestCase):

    def _report(self):
        text = _document(self.scratch, flow='t_end = 0.01\ndt = 1e-3')
        text = text.replace('[output]\n', '[output]\nsnapshot_every = 5\n')
        setup = ConfigFile(text).build()
        return run(setup.config), setup

    def test_number_format_round_trips(self):
        for value in (0.1, 1 / 3, math.pi, 1e-300, 6.02214076e23):
            self.assertEqual(float(format_number(value)), value)
        self.assertEqual(snapshot_name(0.01), 'snapshot_0.01.csv')

    def test_series_csv_round_trip(self):
        report, _ = self._report()
        path = write_series(self.scratch, report)
        with open(path, newline='', encoding='utf-8') as f:
            lines = list(csv.reader(f))
        self.assertEqual(tuple(lines[0]), tuple(SERIES_COLUMNS))
        self.assertEqual(len(lines) - 1, len(report.rows))
        for written, row in zip(lines[1:], report.rows):
            self.assertEqual([float(v) for v in written], [float(v) for v in row.as_row()])

    def test_bundle(self):
        report, setup = self._report()
        bundle = write_bundle(report, setup.output, setup.text)
        names = sorted(path.name for path in bundle.files)
        self.assertIn('series.csv', names)
        self.assertIn('series.svg', names)
        self.assertIn('profile.svg', names)
        self.assertEqual(len(bundle.snapshots), 3)
        self.assertIsNone(bundle.archived_pk)
        with open(bundle.snapshots[-1], newline='', encoding='utf-8') as f:
            lines = list(csv.reader(f))
        self.assertEqual(lines[0], ['s', 'r', 'rho', 'u'])
        self.assertEqual(len(lines), 34)

    def test_svg_documents(self):
        report, _ = self._report()
        series = series_svg(report)
        self.assertTrue(series.startswith('<?xml'))
        self.assertIn('<svg xmlns="http://www.w3.org/2000/svg"', series)
        self.assertIn('polyline', series)
        self.assertIn('enclosed volume', series)
        self.assertIn('max v and max phi', series)
        self.assertNotIn('href', series)
        profile = profile_svg(report)
        self.assertIn('radius r(s)', profile)
        self.assertIn('t = 0.01', profile)


class SweepTests(ScratchDirMixin, SimpleTestCase):

    def test_sweep_over_amplitude(self):
        text = _document(self.scratch, extra='\n[sweep]\ninitial.a = 0, 0.01\n')
        rows, path = run_sweep(ConfigFile(text), threads=2)
        self.assertEqual([row.termination for row in rows], ['SteadyState', 'ReachedTEnd'])
        self.assertEqual(rows[0].deviation, 0.0)
        self.assertLessEqual(rows[1].drift, 1e-6)
        with open(path, newline='', encoding='utf-8') as f:
            lines = list(csv.reader(f))
        self.assertEqual(lines[0], ['initial.a', 'termination', 'deviation', 'volD_drift', 'message'])
        self.assertEqual(len(lines), 3)
        self.assertTrue((self.scratch / 'point_001' / 'series.csv').exists())

    def test_bad_point_does_not_stop_the_sweep(self):
        text = _document(self.scratch, extra='\n[sweep]\ndomain.n = 2, 33\n')
        rows, _ = run_sweep(ConfigFile(text), write_points=False)
        self.assertEqual(rows[0].termination, 'ConfigError')
        self.assertTrue(math.isnan(rows[0].drift))
        self.assertEqual(rows[1].termination, 'ReachedTEnd')

    def test_unwritable_point_keeps_its_row(self):
        text = _document(self.scratch, extra='\n[sweep]\ninitial.a = 0.01, 0.02\n')
        failure = OSError(28, 'No space left on device')
        with mock.patch('shell.sweep.write_bundle', side_effect=failure), \
                self.assertLogs('shell.sweep', level='ERROR') as logs:
            rows, path = run_sweep(ConfigFile(text))
        self.assertEqual([row.termination for row in rows], ['ReachedTEnd', 'ReachedTEnd'])
        for row in rows:
            self.assertIn('output not written', row.message)
            self.assertIn('No space left on device', row.message)
        self.assertEqual(len(logs.records), 2)
        self.assertTrue(path.exists())

    def test_unsweepable_key(self):
        text = _document(self.scratch, extra='\n[sweep]\nflow.scheme = 1, 2\n')
        with self.assertRaises(ValidationError) as raised:
            ConfigFile(text).sweep_axes()
        self.assertIn("Cannot sweep 'flow.scheme'", raised.exception.messages[0])


class CommandTests(ScratchDirMixin, TestCase):

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command('tubeflow', *args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as raised:
            self.call(*args)
        self.assertEqual(raised.exception.returncode, code)

    def test_run(self):
        path = self.write_config(_document(self.scratch, extra='archive = true\n'))
        out, _ = self.call('run', str(path))
        self.assertIn('ReachedTEnd', out)
        self.assertTrue((self.scratch / 'series.csv').exists())
        stored = FlowRun.objects.get()
        self.assertEqual(stored.label, 'run')
        self.assertEqual(stored.rows.count(), stored.steps + 1)

    def test_invalid_config_exits_with_1(self):
        path = self.write_config(_document(self.scratch, initial='profile = cosine\nc = 0.6\na = 0.02'))
        self.assertExitCode(1, 'run', str(path))

    def test_flow_failure_exits_with_2(self):
        text = _document(self.scratch, flow='scheme = explicit-euler\ndt = 0.05\nt_end = 1.0')
        text = text.replace('n = 33', 'n = 129')
        self.assertExitCode(2, 'run', str(self.write_config(text)))

    def test_unknown_preset_exits_with_1(self):
        self.assertExitCode(1, 'check', '--preset', 'no-such-preset')

    def test_oracle_failure_exits_with_3(self):
        reports = [
            OracleReport('kernel identities', 1e-16, 1e-12, 10),
            OracleReport('flat limit: cosine', 0.5, 1e-4, 201),
        ]
        with mock.patch('shell.management.commands.tubeflow.run_all', return_value=reports):
            self.assertExitCode(3, 'check', '--seed', '7')

    def test_passing_check(self):
        reports = [OracleReport('kernel identities', 1e-16, 1e-12, 10, seed=7)]
        with mock.patch('shell.management.commands.tubeflow.run_all', return_value=reports) as run_all:
            out, _ = self.call('check', '--seed', '7', '--samples', '10')
        run_all.assert_called_once_with(7, preset=None, samples=10)
        self.assertIn('All 1 checks passed.', out)

    def test_presets_and_defaults(self):
        out, _ = self.call('presets')
        self.assertIn('spaceform-2-1-compact', out)
        self.assertIn('multiplicities required', out)
        out, _ = self.call('defaults')
        self.assertEqual(out, default_document())
