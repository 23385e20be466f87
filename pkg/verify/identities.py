"""
Check suites: algebraic identities, constant-tube oracles and the flat limit.

Every check ends in an OracleReport. Random samples come from a seeded
numpy Generator and the seed is carried in the report, so a failing check
can be replayed exactly.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from domain.grid import BaseDomain
from domain.profiles import ClampedProfile, CosineProfile
from flow.rhs import laplacian_identity, radius_speed, radius_speed_without_laplacian
from geometry.curvature import ambient_density, grad_norm_relation, mean_curvature, sample, tube_density
from kernels.presets import get_preset, preset_catalogue, spaceform
from kernels.roots import kernel_co, kernel_cot, kernel_double_sin, kernel_sinc, kernel_tan
from kernels.spaces import Curvature

from .oracles import cylinder_profile, embedded_revolution_oracle, spaceform_tube_oracle

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-12
DEFAULT_SAMPLES = 10_000
MAX_SPACEFORM_DIMENSION = 6
FLAT_LIMIT_B = 1e-6
FLAT_LIMIT_LENGTH = 4.0
FLAT_LIMIT_NODES = 201
NONCOMPACT_ARGUMENT = 1.5


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_error: float
    tolerance: float
    samples: int
    seed: int = None

    @property
    def passed(self):
        return bool(self.max_error <= self.tolerance)

    def as_row(self):
        return (self.name, self.max_error, self.tolerance, 'pass' if self.passed else 'FAIL', self.samples, self.seed)

    def __str__(self):
        status = 'pass' if self.passed else 'FAIL'
        return f'{self.name}: {status} (max error {self.max_error:.3g}, tolerance {self.tolerance:.3g})'


def _report(name, errors, tolerance, seed=None):
    errors = np.asarray(errors, dtype=float)
    # NaN must fail, not vanish in max()
    worst = math.inf if np.any(np.isnan(errors)) else float(np.max(errors, initial=0.0))
    report = OracleReport(name=name, max_error=worst, tolerance=tolerance, samples=int(errors.size), seed=seed)
    log = logger.debug if report.passed else logger.warning
    log('[Check] %s', report)
    return report


def _radius_range(model):
    if math.isfinite(model.r_cut):
        return 0.02 * model.r_cut, 0.95 * model.r_cut
    top = 5.0 if model.r_max is None else min(model.r_max, 5.0)
    # k b r <= NONCOMPACT_ARGUMENT for every ratio
    return 0.02, min(top, NONCOMPACT_ARGUMENT / (model.k_max * model.b))


# ─────────────────────────────────────────────
# Identities
# ─────────────────────────────────────────────

def _kernel_errors(model, r):
    """Three algebraic identities per ratio, as absolute errors."""
    sign = 1.0 if model.epsilon is Curvature.COMPACT else -1.0
    errors = []
    for k in model.ratios:
        kb = k * model.b
        co = np.asarray(kernel_co(model, k, r))
        tan = np.asarray(kernel_tan(model, k, r))
        sin = kb * r * np.asarray(kernel_sinc(model, k, r))
        errors.append(np.abs(tan * np.asarray(kernel_cot(model, k, r)) - sign * kb * kb))
        errors.append(np.abs(co * co + sign * sin * sin - 1.0))
        errors.append(np.abs(np.asarray(kernel_double_sin(model, k, r)) - 2.0 * tan * co * co))
    return np.concatenate(errors)


def identity_suite(model, samples=DEFAULT_SAMPLES, seed=0):
    """Algebraic identities at seeded random (r, g, Hbar, rho), as absolute errors."""
    rng = np.random.default_rng(seed)
    low, high = _radius_range(model)
    r = rng.uniform(low, high, samples)
    g = rng.uniform(-10.0, 10.0, samples)
    g[::10] = 0.0
    hbar = rng.uniform(-5.0, 5.0, samples)
    rho = rng.uniform(-5.0, 5.0, samples)
    tag = model.name

    roundtrip = grad_norm_relation.inverse(model, r, grad_norm_relation.forward(model, r, g))
    speed = radius_speed(model, r, g, hbar, rho)
    split = radius_speed_without_laplacian(model, r, g, hbar, rho) + laplacian_identity(model, r, g)
    psi = tube_density(model, r, g)
    psi_bar = ambient_density(model, r)
    density_errors = np.where(g == 0.0, np.abs(psi - psi_bar), np.maximum(psi_bar - psi, 0.0))

    return [
        _report(f'grad-norm roundtrip [{tag}]', np.abs(roundtrip - np.abs(g)), IDENTITY_TOLERANCE, seed),
        _report(f'split speed identity [{tag}]', np.abs(split - speed), IDENTITY_TOLERANCE, seed),
        _report(f'density comparison [{tag}]', density_errors, IDENTITY_TOLERANCE, seed),
        _report(f'kernel identities [{tag}]', _kernel_errors(model, r), IDENTITY_TOLERANCE, seed),
    ]


# ─────────────────────────────────────────────
# Constant tubes in space forms
# ─────────────────────────────────────────────

def spaceform_suite(samples=200, seed=0, max_dimension=MAX_SPACEFORM_DIMENSION):
    """mean_curvature of constant tubes against the textbook sum, every space form up to max_dimension."""
    rng = np.random.default_rng(seed)
    reports = []
    for curvature in (Curvature.COMPACT, Curvature.NONCOMPACT):
        for n in range(2, max_dimension + 1):
            for p in range(1, n):
                model = spaceform(n, p, curvature).model()
                low, high = _radius_range(model)
                r = np.sort(rng.uniform(low, high, samples))
                domain = BaseDomain.flat(1.0, samples)
                zeros = np.zeros(samples)
                rho = mean_curvature(model, domain, r, zeros, zeros)
                expected = spaceform_tube_oracle(n, p, curvature, r)
                reports.append(_report(
                    f'constant tube [{model.name}]', np.abs(rho - expected),
                    IDENTITY_TOLERANCE, seed,
                ))
    return reports


# ─────────────────────────────────────────────
# Flat limit against the embedded surface of revolution
# ─────────────────────────────────────────────

FLAT_LIMIT_PROFILES = (
    ('cosine', CosineProfile(0.5, 0.1)),
    ('cosine-m2', CosineProfile(0.5, 0.05, m=2)),
    ('clamped', ClampedProfile(0.5, 0.1)),
)


def flat_limit_tolerance(h):
    return 1e-4 + 5.0 * h * h


def flat_limit_suite(n=FLAT_LIMIT_NODES, length=FLAT_LIMIT_LENGTH, b=FLAT_LIMIT_B):
    model = spaceform(2, 1, Curvature.COMPACT).model(b=b)
    domain = BaseDomain.flat(length, n)
    tolerance = flat_limit_tolerance(domain.h)

    reports = [_report(
        'revolution oracle on a cylinder',
        np.abs(embedded_revolution_oracle(cylinder_profile(0.5), domain.s) - 2.0),
        1e-6,
    )]
    for label, profile in FLAT_LIMIT_PROFILES:
        field = profile.field(domain, model)
        rho = sample(model, domain, field).rho
        oracle = embedded_revolution_oracle(field.values, domain.s)
        reports.append(_report(f'flat limit [{label}]', np.abs(rho - oracle), tolerance))
    return reports


def check_models(preset=None):
    if preset is not None:
        return [get_preset(preset).model()]
    return [candidate.model() for candidate in preset_catalogue() if candidate.is_complete]


def run_all(seed, preset=None, samples=DEFAULT_SAMPLES):
    """
    Everything `tubeflow check` runs. Raises ModelError for an unknown preset
    and PresetIncomplete for a table preset without multiplicities.
    """
    models = check_models(preset)
    logger.info('[Check] seed=%d, %d model(s), %d samples each', seed, len(models), samples)
    reports = []
    for model in models:
        reports.extend(identity_suite(model, samples=samples, seed=seed))
    reports.extend(spaceform_suite(seed=seed))
    reports.extend(flat_limit_suite())
    failed = [report for report in reports if not report.passed]
    logger.info('[Check] %d of %d checks passed', len(reports) - len(failed), len(reports))
    return reports
