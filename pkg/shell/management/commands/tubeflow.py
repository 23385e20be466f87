from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from flow.runner import run
from kernels.errors import ModelError
from kernels.presets import preset_catalogue
from shell.configfile import ConfigFile, default_document
from shell.output import write_bundle
from shell.sweep import run_sweep
from verify.identities import DEFAULT_SAMPLES, run_all

EXIT_CONFIG = 1
EXIT_FLOW = 2
EXIT_ORACLE = 3


class Command(BaseCommand):
    help = 'Volume-preserving mean curvature flow of tubes: run, check, sweep, presets, defaults.'

    def add_arguments(self, parser):
        subcommands = parser.add_subparsers(dest='subcommand', required=True)

        run_parser = subcommands.add_parser('run', help='Run one flow from a config file.')
        run_parser.add_argument('config')

        check_parser = subcommands.add_parser('check', help='Run the identity and oracle suites.')
        check_parser.add_argument('--seed', type=int, default=None)
        check_parser.add_argument('--preset', default=None)
        check_parser.add_argument('--samples', type=int, default=DEFAULT_SAMPLES)

        sweep_parser = subcommands.add_parser('sweep', help='Run the Cartesian product of the [sweep] axes.')
        sweep_parser.add_argument('config')
        sweep_parser.add_argument('--threads', type=int, default=None)

        subcommands.add_parser('presets', help='List the model presets.')
        subcommands.add_parser('defaults', help='Print a config document with every default.')

    def handle(self, *args, **options):
        handler = getattr(self, 'handle_' + options['subcommand'])
        return handler(**options)

    def _config_error(self, error):
        messages = error.messages if isinstance(error, ValidationError) else [str(error)]
        for message in messages:
            self.stderr.write(self.style.ERROR(f'  {message}'))
        return CommandError('Invalid configuration', returncode=EXIT_CONFIG)

    # ── run ─────────────────────────────────────────────────────────────

    def handle_run(self, config, **options):
        try:
            setup = ConfigFile.load(config).build()
        except ValidationError as e:
            raise self._config_error(e)

        self.stdout.write(self.style.MIGRATE_HEADING(
            f'\nRunning {setup.config.model} on {setup.config.domain}\n'
        ))
        if setup.boundary_warning:
            self.stdout.write(self.style.WARNING(f'  {setup.boundary_warning}'))

        report = run(setup.config)
        bundle = write_bundle(report, setup.output, setup.text)
        final = report.final
        self.stdout.write(f'  steps: {report.steps} ({report.rejected_steps} rejected)')
        self.stdout.write(f'  t: {final.t:.6g}   Hbar: {final.hbar:.12g}   min u: {final.min_u:.6g}')
        self.stdout.write(f'  volD drift: {report.volume_drift():.3g}   deviation decay: {report.deviation_decay():.3g}')
        if report.bound_is_ceiling:
            self.stdout.write(self.style.WARNING('  radius bound unavailable below the cut radius; ceiling used'))
        self.stdout.write(f'  output: {bundle.directory}')

        if not report.succeeded:
            self.stderr.write(self.style.ERROR(f'{report.termination}: {report.message}'))
            raise CommandError(f'Flow ended with {report.termination}', returncode=EXIT_FLOW)
        self.stdout.write(self.style.SUCCESS(f'{report.termination}: {report.message}'))

    # ── check ───────────────────────────────────────────────────────────

    def handle_check(self, seed=None, preset=None, samples=DEFAULT_SAMPLES, **options):
        seed = settings.TUBEFLOW_DEFAULT_SEED if seed is None else seed
        try:
            reports = run_all(seed, preset=preset, samples=samples)
        except ModelError as e:
            raise self._config_error(e)

        self.stdout.write(self.style.MIGRATE_HEADING(f'\nChecks (seed {seed})\n'))
        width = max(len(report.name) for report in reports)
        for report in reports:
            status = self.style.SUCCESS('pass') if report.passed else self.style.ERROR('FAIL')
            self.stdout.write(
                f'  {report.name:<{width}}  {status}  max error {report.max_error:.3e}'
                f'  tolerance {report.tolerance:.1e}  samples {report.samples}'
            )
        failed = [report for report in reports if not report.passed]
        self.stdout.write('')
        if failed:
            self.stdout.write(self.style.ERROR(f'{len(failed)} of {len(reports)} checks failed.'))
            raise CommandError('Oracle failure', returncode=EXIT_ORACLE)
        self.stdout.write(self.style.SUCCESS(f'All {len(reports)} checks passed.'))

    # ── sweep ───────────────────────────────────────────────────────────

    def handle_sweep(self, config, threads=None, **options):
        try:
            rows, path = run_sweep(ConfigFile.load(config), threads=threads)
        except ValidationError as e:
            raise self._config_error(e)

        self.stdout.write(self.style.MIGRATE_HEADING(f'\nSweep: {len(rows)} point(s)\n'))
        for row in rows:
            params = ', '.join(f'{key}={value:g}' for key, value in row.params)
            ok = row.termination in ('ReachedTEnd', 'SteadyState')
            status = self.style.SUCCESS(row.termination) if ok else self.style.ERROR(row.termination)
            self.stdout.write(f'  {params}  {status}  deviation {row.deviation:.3g}  drift {row.drift:.3g}')
        self.stdout.write(self.style.SUCCESS(f'Summary written to {path}'))

    # ── presets / defaults ──────────────────────────────────────────────

    def handle_presets(self, **options):
        for preset in preset_catalogue():
            marker = '' if preset.is_complete else self.style.WARNING('  (multiplicities required)')
            self.stdout.write(f'{preset.name:<28} {preset.provenance.value:<20} {preset.description}{marker}')

    def handle_defaults(self, **options):
        self.stdout.write(default_document(), ending='')
