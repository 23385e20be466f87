"""
Run configuration documents.

A config is an INI document with the sections [model], [domain], [initial],
[flow], [output] and, for sweeps, [sweep]. ConfigFile parses it with
configparser and builds a RunSetup through the section forms; any problem
surfaces as one django ValidationError listing every offending key.
"""

import configparser
import logging
from dataclasses import dataclass
from pathlib import Path

from django.core.exceptions import ValidationError

from flow.state import RunConfig, RunConfigError, Scheme

from .forms import DomainForm, FlowForm, InitialForm, ModelForm, OutputForm, SweepForm

logger = logging.getLogger(__name__)

SECTIONS = ('model', 'domain', 'initial', 'flow', 'output', 'sweep')
REQUIRED_SECTIONS = ('model', 'domain', 'initial')


@dataclass(frozen=True)
class OutputOptions:
    directory: Path
    record_every: int = 1
    snapshot_every: int = 0
    plots: bool = True
    archive: bool = False


@dataclass(eq=False)
class RunSetup:
    config: RunConfig
    output: OutputOptions
    profile: object
    text: str
    boundary_warning: str = ''


class ConfigFile:

    def __init__(self, text, base_dir=None, source='<string>'):
        self.text = text
        self.source = source
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#',))
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as e:
            raise ValidationError(f'{source}: {e}') from None
        unknown = [name for name in parser.sections() if name not in SECTIONS]
        if unknown:
            raise ValidationError(
                [f"[{name}]: Unknown section; expected one of {', '.join(SECTIONS)}" for name in unknown]
            )
        self.sections = {name: dict(parser.items(name)) for name in parser.sections()}

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ValidationError(f'Cannot read config {path}: {e}') from None
        return cls(text, base_dir=path.parent, source=str(path))

    def section(self, name):
        return dict(self.sections.get(name, {}))

    def with_overrides(self, overrides):
        """A copy with 'section.key' values replaced (sweep points)."""
        clone = ConfigFile.__new__(ConfigFile)
        clone.text = self.text
        clone.source = self.source
        clone.base_dir = self.base_dir
        clone.sections = {name: dict(values) for name, values in self.sections.items()}
        for dotted, value in overrides.items():
            section, key = dotted.split('.', 1)
            clone.sections.setdefault(section, {})[key] = repr(value)
        return clone

    def _validated(self, form):
        if not form.is_valid():
            raise ValidationError(form.messages())
        return form

    def build(self):
        missing = [name for name in REQUIRED_SECTIONS if name not in self.sections]
        if missing:
            raise ValidationError([f'[{name}]: Missing section' for name in missing])

        model = self._validated(ModelForm(self.section('model'), base_dir=self.base_dir)).model
        domain = self._validated(DomainForm(self.section('domain'), model=model, base_dir=self.base_dir)).domain
        initial = self._validated(InitialForm(self.section('initial'), domain=domain, base_dir=self.base_dir))
        flow = self._validated(FlowForm(self.section('flow'), base_dir=self.base_dir)).cleaned_data
        output = self._validated(OutputForm(self.section('output'), base_dir=self.base_dir)).cleaned_data

        if initial.boundary_warning:
            logger.warning('[Config] %s (boundary_hessian = report)', initial.boundary_warning)

        try:
            field = initial.profile.field(domain, model, flow['margin'])
            config = RunConfig(
                model=model,
                domain=domain,
                initial=field,
                scheme=Scheme(flow['scheme']),
                dt=flow.get('dt'),
                cfl=flow.get('cfl'),
                t_end=flow['t_end'],
                steady_tol=flow['steady_tol'],
                u_floor=flow['u_floor'],
                margin=flow['margin'],
                record_every=output['record_every'],
                snapshot_every=output['snapshot_every'],
                conserve_project=flow['conserve_project'],
                max_steps=flow['max_steps'],
                phi_constant=flow['phi_constant'],
                label=Path(self.source).stem,
            )
        except (RunConfigError, ValueError) as e:
            raise ValidationError(str(e)) from None

        return RunSetup(
            config=config,
            output=OutputOptions(
                directory=output['directory'],
                record_every=output['record_every'],
                snapshot_every=output['snapshot_every'],
                plots=output['plots'],
                archive=output['archive'],
            ),
            profile=initial.profile,
            text=self.text,
            boundary_warning=initial.boundary_warning,
        )

    def sweep_axes(self):
        if 'sweep' not in self.sections:
            raise ValidationError('[sweep]: Missing section')
        return self._validated(SweepForm(self.section('sweep'))).axes


DEFAULT_DOCUMENT = """\
# tubeflow run configuration; every key below shows its default.

[model]
# a named preset (see `tubeflow presets`) ...
preset = spaceform-2-1-compact
# ... or an explicit model:
# epsilon = compact                 # compact | noncompact
# ratios = 1, 2                     # the ratio set K
# mult_vertical = 1:1, 2:1          # k:m pairs, k in {0, 1, 2}
# mult_horizontal = 0:1, 1:2, 2:1   # k:m pairs, k in K or 0
# k0 = 2                            # block containing grad r
b = 1.0
# r_cut =                           # default pi/(2 b k_max) compact, inf noncompact
# r_max =                           # required for noncompact runs

[domain]
kind = flat                         # flat | spherical | hyperbolic | table
length = 6.283185307179586
n = 129
origin = 0.0
scale = 1.0                         # curvature scale of spherical/hyperbolic bases
# transverse =                      # fixed to m^H - 1 by the model
# table = base.csv                  # kind = table: columns s, omega[, gamma]

[initial]
profile = clamped                   # constant | cosine | clamped | table
c = 0.6
a = 0.02
m = 1
boundary_hessian = strict           # strict | report
# table = profile.csv               # profile = table: columns s, r

[flow]
scheme = rk4                        # explicit-euler | rk4 | imex
# dt =                              # fixed step; otherwise cfl
# cfl = 0.9
t_end = 1.0
steady_tol = 1e-10
u_floor = 0.001
margin = 0.001
conserve_project = false
max_steps = 1000000
phi_constant = 1.0                  # C in phi = exp(C r) v

[output]
# directory =                       # default TUBEFLOW_OUTPUT_DIR
record_every = 1
snapshot_every = 0
plots = true
archive = false

# [sweep]                           # only read by `tubeflow sweep`
# initial.a = 0, 0.01, 0.02         # a list ...
# model.b = 0.5:1.0:3               # ... or start:stop:count
"""


def default_document():
    return DEFAULT_DOCUMENT
