"""
Validation of config sections.

Each section of a config document is a flat key = value mapping, validated by
one Django form. Missing keys fall back to the section's defaults, unknown
keys are errors, and every message names its section and key.
"""

import math
from pathlib import Path

import numpy as np
from django import forms
from django.conf import settings

from domain.grid import MIN_NODES, BaseDomain
from domain.profiles import ClampedProfile, ConstantProfile, CosineProfile, TableProfile
from flow.state import DEFAULT_MARGIN, DEFAULT_PHI_CONSTANT, DEFAULT_U_FLOOR, Scheme
from kernels.errors import DomainError, ModelError
from kernels.presets import get_preset
from kernels.spaces import Curvature, SpaceModel

BOUNDARY_TOLERANCE = 1e-8


def parse_multiplicities(text):
    """'0:1, 1:2' -> {0.0: 1, 1.0: 2}"""
    pairs = {}
    for item in text.replace(';', ',').split(','):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition(':')
        if not sep:
            raise forms.ValidationError(f"Expected 'k:m' pairs, got '{item}'")
        try:
            pairs[float(key)] = int(value)
        except ValueError:
            raise forms.ValidationError(f"Expected 'k:m' pairs, got '{item}'") from None
    return pairs


def parse_floats(text):
    try:
        return tuple(float(item) for item in text.replace(';', ',').split(',') if item.strip())
    except ValueError:
        raise forms.ValidationError(f"Expected a comma separated list of numbers, got '{text}'") from None


def read_columns(path, required):
    """Columns of a CSV file with a header row, as float arrays keyed by name."""
    try:
        table = np.genfromtxt(path, delimiter=',', names=True, dtype=float, encoding='utf-8')
    except OSError as e:
        raise forms.ValidationError(f'Cannot read {path}: {e}') from None
    names = table.dtype.names or ()
    missing = [name for name in required if name not in names]
    if missing:
        raise forms.ValidationError(f"{path} lacks column(s) {', '.join(missing)}")
    return {name: np.atleast_1d(table[name]) for name in names}


class SectionForm(forms.Form):
    section = None
    defaults = {}

    def __init__(self, data=None, base_dir=None, **kwargs):
        data = dict(data or {})
        self.unknown_keys = sorted(set(data) - set(self.base_fields))
        merged = {key: str(value) for key, value in self.defaults.items()}
        merged.update(data)
        super().__init__(merged, **kwargs)
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    def clean(self):
        cleaned_data = super().clean()
        for key in self.unknown_keys:
            self.add_error(None, f"Unknown key '{key}'")
        return cleaned_data

    def resolve_path(self, value):
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path

    def messages(self):
        """Errors as '[section] key: message' lines."""
        lines = []
        for key, errors in self.errors.items():
            where = f'[{self.section}]' if key == '__all__' else f'[{self.section}] {key}'
            lines.extend(f'{where}: {error}' for error in errors)
        return lines


# ─────────────────────────────────────────────
# [model]
# ─────────────────────────────────────────────

class ModelForm(SectionForm):
    section = 'model'
    defaults = {'b': '1.0'}

    preset = forms.CharField(required=False)
    epsilon = forms.ChoiceField(required=False, choices=[('', ''), ('compact', 'compact'), ('noncompact', 'noncompact')])
    b = forms.FloatField(min_value=0.0)
    ratios = forms.CharField(required=False)
    mult_vertical = forms.CharField(required=False)
    mult_horizontal = forms.CharField(required=False)
    k0 = forms.FloatField(required=False)
    r_cut = forms.FloatField(required=False)
    r_max = forms.FloatField(required=False)

    def clean_b(self):
        b = self.cleaned_data.get('b')
        if b is not None and not (math.isfinite(b) and b > 0):
            raise forms.ValidationError('b must be a positive real')
        return b

    def clean_ratios(self):
        return parse_floats(self.cleaned_data.get('ratios', ''))

    def clean_mult_vertical(self):
        return parse_multiplicities(self.cleaned_data.get('mult_vertical', ''))

    def clean_mult_horizontal(self):
        return parse_multiplicities(self.cleaned_data.get('mult_horizontal', ''))

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            self.model = self._build(cleaned_data)
        except ModelError as e:
            raise forms.ValidationError(str(e))
        return cleaned_data

    def _build(self, data):
        vertical = data.get('mult_vertical') or None
        horizontal = data.get('mult_horizontal') or None
        if data.get('preset'):
            return get_preset(data['preset']).model(
                b=data['b'], mult_vertical=vertical, mult_horizontal=horizontal,
                r_cut=data.get('r_cut'), r_max=data.get('r_max'),
            )
        missing = [key for key in ('epsilon', 'ratios', 'mult_vertical', 'mult_horizontal')
                   if not data.get(key)]
        if data.get('k0') is None:
            missing.append('k0')
        if missing:
            raise ModelError(f"Give a preset or all of: {', '.join(missing)}")
        return SpaceModel(
            epsilon=Curvature.parse(data['epsilon']),
            b=data['b'],
            ratios=data['ratios'],
            mult_vertical=vertical,
            mult_horizontal=horizontal,
            k0=data['k0'],
            r_cut=data.get('r_cut'),
            r_max=data.get('r_max'),
        )


# ─────────────────────────────────────────────
# [domain]
# ─────────────────────────────────────────────

class DomainForm(SectionForm):
    section = 'domain'
    defaults = {'kind': 'flat', 'origin': '0.0', 'scale': '1.0'}

    kind = forms.ChoiceField(choices=[(k, k) for k in ('flat', 'spherical', 'hyperbolic', 'table')])
    length = forms.FloatField(required=False)
    n = forms.IntegerField(required=False, min_value=MIN_NODES)
    origin = forms.FloatField()
    scale = forms.FloatField()
    transverse = forms.IntegerField(required=False, min_value=0)
    table = forms.CharField(required=False)

    def __init__(self, data=None, model=None, **kwargs):
        super().__init__(data, **kwargs)
        self.model = model

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        kind = cleaned_data['kind']
        if kind == 'table':
            if not cleaned_data.get('table'):
                raise forms.ValidationError("kind = table needs 'table' (CSV with columns s, omega[, gamma])")
        else:
            for key in ('length', 'n'):
                if cleaned_data.get(key) is None:
                    self.add_error(key, 'This field is required.')
            if cleaned_data.get('length') is not None and not cleaned_data['length'] > 0:
                self.add_error('length', 'length must be positive')
        if self.errors:
            return cleaned_data

        transverse = self.model.m_horizontal - 1
        given = cleaned_data.get('transverse')
        if given is not None and given != transverse:
            # the connection term of the curvature assumes omega'/omega = sum m~ Gamma
            raise forms.ValidationError(
                f'transverse = {given} does not match the model: m^H - 1 = {transverse}'
            )
        try:
            self.domain = self._build(cleaned_data, transverse)
        except DomainError as e:
            raise forms.ValidationError(str(e))
        return cleaned_data

    def _build(self, data, transverse):
        kind = data['kind']
        if kind == 'flat':
            return BaseDomain.flat(data['length'], data['n'], origin=data['origin'])
        if kind == 'spherical':
            return BaseDomain.spherical(data['length'], data['n'], transverse, data['origin'], scale=data['scale'])
        if kind == 'hyperbolic':
            return BaseDomain.hyperbolic(data['length'], data['n'], transverse, data['origin'], scale=data['scale'])
        columns = read_columns(self.resolve_path(data['table']), ('s', 'omega'))
        return BaseDomain.from_table(columns['s'], columns['omega'], columns.get('gamma'))


# ─────────────────────────────────────────────
# [initial]
# ─────────────────────────────────────────────

class InitialForm(SectionForm):
    section = 'initial'
    defaults = {'profile': 'constant', 'a': '0.0', 'm': '1', 'boundary_hessian': 'strict'}

    profile = forms.ChoiceField(choices=[(k, k) for k in ('constant', 'cosine', 'clamped', 'table')])
    c = forms.FloatField(required=False)
    a = forms.FloatField()
    m = forms.IntegerField(min_value=1)
    table = forms.CharField(required=False)
    boundary_hessian = forms.ChoiceField(choices=[('strict', 'strict'), ('report', 'report')])

    def __init__(self, data=None, domain=None, **kwargs):
        super().__init__(data, **kwargs)
        self.domain = domain
        self.boundary_warning = ''

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        kind = cleaned_data['profile']
        if kind == 'table':
            if not cleaned_data.get('table'):
                raise forms.ValidationError("profile = table needs 'table' (CSV with columns s, r)")
            columns = read_columns(self.resolve_path(cleaned_data['table']), ('s', 'r'))
            self.profile = TableProfile(columns['s'], columns['r'])
        else:
            if cleaned_data.get('c') is None:
                raise forms.ValidationError(f"profile = {kind} needs the mean radius 'c'")
            c, a, m = cleaned_data['c'], cleaned_data['a'], cleaned_data['m']
            self.profile = {
                'constant': lambda: ConstantProfile(c),
                'cosine': lambda: CosineProfile(c, a, m),
                'clamped': lambda: ClampedProfile(c, a, m),
            }[kind]()
        try:
            ends = self.profile.endpoint_derivatives(self.domain)
        except DomainError as e:
            raise forms.ValidationError(str(e))
        self._check_boundary(ends, cleaned_data['boundary_hessian'])
        return cleaned_data

    def _check_boundary(self, ends, hessian_mode):
        if ends.max_first > BOUNDARY_TOLERANCE:
            raise forms.ValidationError(
                f"Initial profile violates r' = 0 at the endpoints: boundary residual {ends.max_first:.3g} "
                f'> {BOUNDARY_TOLERANCE:g}'
            )
        if ends.max_second > BOUNDARY_TOLERANCE:
            message = (
                f"Initial profile violates r'' = 0 at the endpoints: boundary residual {ends.max_second:.3g} "
                f'> {BOUNDARY_TOLERANCE:g}'
            )
            if hessian_mode == 'strict':
                raise forms.ValidationError(
                    f'{message}; use profile = clamped, or set boundary_hessian = report to run anyway'
                )
            self.boundary_warning = message


# ─────────────────────────────────────────────
# [flow]
# ─────────────────────────────────────────────

class FlowForm(SectionForm):
    section = 'flow'
    defaults = {
        'scheme': Scheme.RK4.value,
        't_end': '1.0',
        'steady_tol': '1e-10',
        'u_floor': repr(DEFAULT_U_FLOOR),
        'margin': repr(DEFAULT_MARGIN),
        'conserve_project': 'false',
        'max_steps': '1000000',
        'phi_constant': repr(DEFAULT_PHI_CONSTANT),
    }

    scheme = forms.ChoiceField(choices=[(s.value, s.value) for s in Scheme])
    dt = forms.FloatField(required=False)
    cfl = forms.FloatField(required=False)
    t_end = forms.FloatField(min_value=0.0)
    steady_tol = forms.FloatField(min_value=0.0)
    u_floor = forms.FloatField(min_value=0.0, max_value=1.0)
    margin = forms.FloatField()
    conserve_project = forms.BooleanField(required=False)
    max_steps = forms.IntegerField(min_value=1)
    phi_constant = forms.FloatField()

    def clean_dt(self):
        dt = self.cleaned_data.get('dt')
        if dt is not None and not dt > 0:
            raise forms.ValidationError('dt must be positive')
        return dt

    def clean_cfl(self):
        cfl = self.cleaned_data.get('cfl')
        if cfl is not None and not 0 < cfl <= 1:
            raise forms.ValidationError('cfl must lie in (0, 1]')
        return cfl

    def clean_margin(self):
        margin = self.cleaned_data.get('margin')
        if margin is not None and not 0 < margin < 1:
            raise forms.ValidationError('margin must lie in (0, 1)')
        return margin

    def clean_phi_constant(self):
        constant = self.cleaned_data.get('phi_constant')
        if constant is not None and not (math.isfinite(constant) and constant > 0):
            raise forms.ValidationError('phi_constant must be positive')
        return constant

    def clean(self):
        cleaned_data = super().clean()
        if cleaned_data.get('dt') is not None and cleaned_data.get('cfl') is not None:
            raise forms.ValidationError('Give either dt or cfl, not both')
        return cleaned_data


# ─────────────────────────────────────────────
# [output]
# ─────────────────────────────────────────────

class OutputForm(SectionForm):
    section = 'output'
    defaults = {'record_every': '1', 'snapshot_every': '0', 'plots': 'true', 'archive': 'false'}

    directory = forms.CharField(required=False)
    record_every = forms.IntegerField(min_value=1)
    snapshot_every = forms.IntegerField(min_value=0)
    plots = forms.BooleanField(required=False)
    archive = forms.BooleanField(required=False)

    def clean_directory(self):
        directory = self.cleaned_data.get('directory') or settings.TUBEFLOW_OUTPUT_DIR
        return self.resolve_path(directory)


# ─────────────────────────────────────────────
# [sweep]
# ─────────────────────────────────────────────

SWEEPABLE = {
    'model.b': float,
    'initial.a': float,
    'initial.c': float,
    'domain.n': int,
    'flow.dt': float,
}


def parse_axis(text, cast=float):
    """'0.5, 1.0' lists values; 'start:stop:count' spaces count values evenly."""
    text = text.strip()
    if ':' in text and ',' not in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise forms.ValidationError(f"Expected 'start:stop:count', got '{text}'")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise forms.ValidationError(f"Expected 'start:stop:count', got '{text}'") from None
        if count < 1:
            raise forms.ValidationError('A range needs at least one point')
        values = np.linspace(start, stop, count)
    else:
        values = parse_floats(text)
    if not len(values):
        raise forms.ValidationError('Empty sweep axis')
    return tuple(cast(v) for v in values)


class SweepForm(forms.Form):
    """Sweep axes: keys are 'section.key' names from SWEEPABLE."""

    def __init__(self, data=None, **kwargs):
        super().__init__({}, **kwargs)
        self.raw = dict(data or {})

    def clean(self):
        cleaned_data = super().clean()
        axes = []
        for key, text in self.raw.items():
            if key not in SWEEPABLE:
                self.add_error(None, f"Cannot sweep '{key}'; sweepable keys are {', '.join(SWEEPABLE)}")
                continue
            try:
                axes.append((key, parse_axis(text, SWEEPABLE[key])))
            except forms.ValidationError as e:
                self.add_error(None, f'{key}: {"; ".join(e.messages)}')
        if not axes and not self.errors:
            self.add_error(None, 'A sweep needs at least one axis')
        self.axes = axes
        return cleaned_data

    def messages(self):
        return [f'[sweep] {error}' for errors in self.errors.values() for error in errors]
