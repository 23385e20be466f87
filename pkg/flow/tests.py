import math

import numpy as np
from django.test import SimpleTestCase, TestCase
from hypothesis import given, settings, strategies as st

from domain.grid import BaseDomain, RadiusField
from domain.profiles import ClampedProfile, CosineProfile
from geometry.volume import enclosed_volume
from kernels.errors import ModelError
from kernels.presets import spaceform

from .lagrangian import Particle, lagrangian_step, track_particle
from .models import FlowRun, SeriesRow, archive_report
from .rhs import (
    diffusion_coefficient, eulerian_rhs, evaluate, laplacian_identity, radius_speed,
    radius_speed_without_laplacian,
)
from .runner import choose_dt, conserve_project, initial_state, run, step, stiffness
from .schemes import SCHEMES, _mirror_laplacian_bands
from .state import RunConfig, RunConfigError, Scheme, Termination

CLIFFORD = spaceform(2, 1, 'compact').model()
SPHERE_TUBE = spaceform(3, 1, 'compact').model()
HYPERBOLIC = spaceform(2, 1, 'noncompact').model(r_max=6.0)
LENGTH = 2.0 * math.pi


def _config(n=129, amplitude=0.02, model=CLIFFORD, mean=0.6, **options):
    domain = BaseDomain.flat(LENGTH, n)
    initial = RadiusField(domain, model, mean + amplitude * np.cos(np.pi * domain.s / LENGTH))
    return RunConfig(model=model, domain=domain, initial=initial, **options)


class RunConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = _config()
        self.assertIs(config.scheme, Scheme.RK4)
        self.assertEqual(config.cfl, 0.9)
        self.assertAlmostEqual(config.ceiling, math.pi / 2 * (1 - 1e-3), places=14)

    def test_rejects_dt_and_cfl_together(self):
        with self.assertRaises(RunConfigError):
            _config(dt=1e-3, cfl=0.5)

    def test_rejects_bad_values(self):
        for options in ({'cfl': 1.5}, {'t_end': -1.0}, {'u_floor': 1.0}, {'record_every': 0}, {'dt': 0.0},
                        {'phi_constant': 0.0}, {'phi_constant': math.inf}):
            with self.subTest(options=options), self.assertRaises(RunConfigError):
                _config(**options)

    def test_scheme_from_string(self):
        self.assertIs(_config(scheme='imex').scheme, Scheme.IMEX)

    def test_noncompact_needs_r_max(self):
        model = spaceform(2, 1, 'noncompact').model()
        domain = BaseDomain.flat(1.0, 16)
        with self.assertRaises(ModelError):
            RunConfig(model=model, domain=domain, initial=RadiusField(domain, model, np.ones(16)))


class RhsTests(SimpleTestCase):

    def test_constant_field_is_fixed_point(self):
        for model in (CLIFFORD, SPHERE_TUBE, HYPERBOLIC):
            config = _config(model=model, amplitude=0.0, n=33)
            rhs = eulerian_rhs(model, config.domain, config.initial)
            self.assertLessEqual(np.max(np.abs(rhs)), 1e-13)

    def test_rhs_accepts_state(self):
        config = _config(n=33)
        state = initial_state(config)
        np.testing.assert_array_equal(eulerian_rhs(CLIFFORD, config.domain, state), state.rhs)

    def test_long_waves_grow_around_a_great_circle(self):
        # the fat end gains radius: its constant-radius curvature is below the average
        config = _config(n=65, amplitude=0.05)
        rhs, _ = evaluate(CLIFFORD, config.domain, config.initial)
        self.assertGreater(rhs[0], 0.0)
        self.assertLess(rhs[-1], 0.0)

    def test_diffusion_coefficient(self):
        self.assertAlmostEqual(diffusion_coefficient(CLIFFORD, 0.5, 0.0), 1.0 / math.cos(0.5) ** 2, places=13)
        self.assertAlmostEqual(diffusion_coefficient(HYPERBOLIC, 0.5, 2.0), 1.0 / (math.cosh(0.5) ** 2 + 4.0), places=14)

    @settings(max_examples=300, deadline=None)
    @given(
        st.floats(min_value=0.05, max_value=1.4),
        st.floats(min_value=-20.0, max_value=20.0),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=-5.0, max_value=5.0),
    )
    def test_split_identity(self, r, g, hbar, rho):
        total = radius_speed(SPHERE_TUBE, r, g, hbar, rho)
        split = radius_speed_without_laplacian(SPHERE_TUBE, r, g, hbar, rho) + laplacian_identity(SPHERE_TUBE, r, g)
        scale = max(1.0, abs(hbar) + abs(rho) + abs(laplacian_identity(SPHERE_TUBE, r, g)))
        self.assertLessEqual(abs(total - split), 1e-12 * scale)

    def test_laplacian_identity_vanishes_on_flat_gradient(self):
        self.assertEqual(laplacian_identity(CLIFFORD, 0.7, 0.0), 0.0)


class SchemeTests(SimpleTestCase):

    def test_mirror_bands_keep_constants(self):
        weight = np.linspace(0.5, 3.0, 9)
        ab = _mirror_laplacian_bands(9, weight)
        # banded product of the matrix with a constant vector
        ones = np.ones(9)
        product = ab[1] * ones
        product[:-1] += ab[0, 1:] * ones[1:]
        product[1:] += ab[2, :-1] * ones[:-1]
        np.testing.assert_allclose(product, ones, atol=1e-15)

    def test_every_scheme_keeps_constants(self):
        config = _config(amplitude=0.0, n=33)
        for scheme, integrator in SCHEMES.items():
            with self.subTest(scheme=scheme):
                values = integrator(CLIFFORD, config.domain, config.initial, 1e-3)
                np.testing.assert_allclose(values, config.initial.values, rtol=0, atol=1e-14)

    def test_schemes_agree_for_small_steps(self):
        config = _config(n=33, amplitude=0.05)
        dt = 1e-5
        results = {
            scheme: integrator(CLIFFORD, config.domain, config.initial, dt)
            for scheme, integrator in SCHEMES.items()
        }
        np.testing.assert_allclose(results[Scheme.EXPLICIT_EULER], results[Scheme.RK4], atol=1e-8)
        np.testing.assert_allclose(results[Scheme.IMEX], results[Scheme.RK4], atol=1e-8)


class StepControlTests(SimpleTestCase):

    def test_stiffness(self):
        self.assertAlmostEqual(stiffness(CLIFFORD, np.array([0.2, 0.6])), 1.0 / math.cos(0.6) ** 2, places=13)
        self.assertEqual(stiffness(HYPERBOLIC, np.array([0.5, 3.0])), 1.0)

    def test_cfl_step(self):
        config = _config(amplitude=0.0, n=65)
        state = initial_state(config)
        h = config.domain.h
        expected = 0.9 * h * h * math.cos(0.6) ** 2 / 2.0
        self.assertAlmostEqual(choose_dt(CLIFFORD, config.domain, state, config), expected, places=15)

    def test_fixed_step(self):
        config = _config(dt=1e-4)
        self.assertEqual(choose_dt(CLIFFORD, config.domain, initial_state(config), config), 1e-4)

    def test_last_step_lands_on_t_end(self):
        config = _config(n=33, dt=0.015, t_end=0.025)
        state = initial_state(config)
        first = step(CLIFFORD, config.domain, state, config)
        self.assertAlmostEqual(first.dt, 0.0125, places=15)
        second = step(CLIFFORD, config.domain, first, config)
        self.assertEqual(second.t, 0.025)


class RunTests(SimpleTestCase):

    def test_equilibrium_is_steady(self):
        report = run(_config(amplitude=0.0, n=65))
        self.assertIs(report.termination, Termination.STEADY_STATE)
        self.assertLessEqual(report.final.sup_rhs, 1e-13)
        self.assertEqual(report.steps, 0)
        self.assertTrue(report.succeeded)

    def test_zero_t_end(self):
        report = run(_config(n=33, t_end=0.0))
        self.assertIs(report.termination, Termination.REACHED_T_END)
        self.assertEqual(len(report.rows), 1)
        self.assertEqual(len(report.snapshots), 1)

    def test_phi_constant_reaches_the_series(self):
        config = _config(n=33, t_end=0.0, phi_constant=2.0)
        row = run(config).initial
        geometry = initial_state(config).sample
        self.assertEqual(row.max_v, geometry.max_v)
        self.assertEqual(row.max_phi, geometry.max_phi(2.0))
        self.assertGreaterEqual(row.max_phi, math.exp(2.0 * row.max_r))

    def test_standard_run(self):
        config = _config(t_end=0.5)
        self.assertIs(config.scheme, Scheme.RK4)
        report = run(config)
        self.assertIs(report.termination, Termination.REACHED_T_END, report.message)
        self.assertEqual(report.final.t, 0.5)

        times = [row.t for row in report.rows]
        self.assertTrue(all(b > a for a, b in zip(times, times[1:])))

        self.assertLessEqual(report.volume_drift(), 1e-6)
        self.assertEqual(report.area_increases(1e-10), [])

        h = config.domain.h
        bound = min(report.initial.bound, config.ceiling)
        self.assertTrue(report.bound_is_ceiling)
        for row in report.rows:
            self.assertLessEqual(row.max_r, bound + 10 * h * h)
            self.assertGreaterEqual(row.min_u, 0.5 * report.initial.min_u)
            self.assertLessEqual(row.max_v, 2.0 * report.initial.max_v)
            self.assertGreaterEqual(row.max_phi, row.max_v)

        low, high = report.curvature_range
        self.assertLessEqual(low, report.initial.hbar)
        self.assertGreaterEqual(high, report.initial.hbar)

    def test_explicit_euler_volume_drift_is_first_order(self):
        drifts = [
            run(_config(n=65, amplitude=0.1, scheme='explicit-euler', dt=dt, t_end=0.05)).volume_drift()
            for dt in (2e-4, 1e-4)
        ]
        self.assertGreaterEqual(drifts[0] / drifts[1], 1.8)

    def test_rk4_volume_drift(self):
        coarse = run(_config(n=65, amplitude=0.1, dt=2e-4, t_end=0.05)).volume_drift()
        fine = run(_config(n=65, amplitude=0.1, dt=1e-4, t_end=0.05)).volume_drift()
        self.assertLessEqual(coarse, 1e-6)
        self.assertLessEqual(fine, max(coarse / 8.0, 1e-13))

    def test_imex_beyond_the_explicit_limit(self):
        config = _config(n=129, scheme='imex', dt=5e-3, t_end=0.2)
        explicit = _config(n=129)
        explicit_limit = choose_dt(CLIFFORD, explicit.domain, initial_state(explicit), explicit)
        self.assertGreater(config.dt, 4 * explicit_limit)
        report = run(config)
        self.assertTrue(report.succeeded, report.message)
        self.assertLessEqual(report.volume_drift(), 1e-4)

    def test_unstable_explicit_step_fails_cleanly(self):
        report = run(_config(n=129, scheme='explicit-euler', dt=0.05, t_end=1.0))
        self.assertFalse(report.succeeded)
        self.assertIn(report.termination, (
            Termination.NON_POSITIVE_RADIUS, Termination.RADIUS_OVERFLOW, Termination.TUBE_LOST,
            Termination.STEP_SIZE_UNDERFLOW,
        ))
        self.assertTrue(report.message)

    def test_step_limit(self):
        report = run(_config(n=33, max_steps=3))
        self.assertIs(report.termination, Termination.STEP_LIMIT)
        self.assertEqual(report.steps, 3)
        self.assertEqual(len(report.rows), 4)

    def test_cadence(self):
        report = run(_config(n=33, dt=1e-3, t_end=0.02, record_every=5, snapshot_every=10))
        self.assertEqual([round(row.t, 12) for row in report.rows], [0.0, 0.005, 0.01, 0.015, 0.02])
        self.assertEqual([round(snap.t, 12) for snap in report.snapshots], [0.0, 0.01, 0.02])
        self.assertEqual(report.snapshots[-1].r.shape, (33,))

    def test_noncompact_run(self):
        config = _config(model=HYPERBOLIC, mean=1.0, amplitude=0.05, n=65, t_end=0.1)
        report = run(config)
        self.assertTrue(report.succeeded, report.message)
        self.assertLessEqual(report.volume_drift(), 1e-6)

        self.assertFalse(report.bound_is_ceiling)
        self.assertLess(report.initial.bound, config.ceiling)
        h = config.domain.h
        for row in report.rows:
            self.assertLessEqual(row.max_r, row.bound + 10 * h * h)

    def test_perturbation_suite(self):
        domain = BaseDomain.flat(LENGTH, 129)
        for profile_class in (CosineProfile, ClampedProfile):
            for fraction in (0.01, 0.03, 0.05):
                profile = profile_class(0.6, fraction * 0.6)
                with self.subTest(profile=profile.kind, amplitude=fraction):
                    initial = profile.field(domain, CLIFFORD)
                    report = run(RunConfig(model=CLIFFORD, domain=domain, initial=initial, t_end=0.5))
                    self.assertIsNot(report.termination, Termination.TUBE_LOST)
                    self.assertTrue(report.succeeded, report.message)
                    floor = 0.5 * report.initial.min_u
                    self.assertTrue(all(row.min_u >= floor for row in report.rows))

    def test_deviation_history(self):
        report = run(_config(n=65, amplitude=0.05, t_end=0.2, record_every=10))
        history = report.deviation_history()
        self.assertEqual(len(history), len(report.rows))
        self.assertAlmostEqual(history[0][1], 0.05, places=12)
        self.assertGreater(report.deviation_decay(), 0.0)


class ConserveProjectTests(SimpleTestCase):

    def test_recovers_target_volume(self):
        config = _config(n=65, amplitude=0.05)
        target = enclosed_volume(CLIFFORD, config.domain, config.initial)
        inflated = config.initial.with_values(config.initial.values * 1.01)
        projected = conserve_project(CLIFFORD, config.domain, inflated, target)
        self.assertAlmostEqual(enclosed_volume(CLIFFORD, config.domain, projected) / target, 1.0, places=14)
        ratio = projected.values / config.initial.values
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-14)
        self.assertAlmostEqual(ratio[0], 1.0, places=12)

    def test_projected_euler_run_conserves(self):
        report = run(_config(n=65, amplitude=0.1, scheme='explicit-euler', dt=2e-4, t_end=0.05,
                             conserve_project=True))
        self.assertLessEqual(report.volume_drift(), 1e-13)


class LagrangianTests(SimpleTestCase):

    def test_particle_follows_the_profile(self):
        config = _config(n=257, dt=1e-4, t_end=0.1)
        trace = track_particle(config, LENGTH / 3.0, 0.1)
        self.assertTrue(trace.completed, trace.reason)
        self.assertAlmostEqual(trace.points[-1].t, 0.1, places=12)
        self.assertLessEqual(trace.max_error, 1e-3)

    def test_particle_error_is_first_order_in_dt(self):
        errors = []
        for dt in (2e-4, 1e-4, 5e-5):
            trace = track_particle(_config(n=257, dt=dt, t_end=0.1), LENGTH / 3.0, 0.1)
            self.assertTrue(trace.completed, trace.reason)
            errors.append(trace.max_error)
        for coarse, fine in zip(errors, errors[1:]):
            self.assertGreaterEqual(coarse / fine, 1.7)
            self.assertLessEqual(coarse / fine, 2.3)

    def test_trace_stops_before_the_run_end(self):
        config = _config(n=33, dt=1e-3, t_end=0.1)
        trace = track_particle(config, LENGTH / 3.0, 0.0105)
        self.assertTrue(trace.completed, trace.reason)
        self.assertEqual(trace.points[-1].t, 0.0105)
        self.assertTrue(all(point.t <= 0.0105 for point in trace.points))
        self.assertEqual(config.t_end, 0.1)

    def test_particle_at_rest_on_a_constant_tube(self):
        config = _config(n=33, amplitude=0.0)
        state = initial_state(config)
        particle = lagrangian_step(CLIFFORD, config.domain, state, Particle(x=1.0, r_hat=0.6), 1e-2)
        self.assertAlmostEqual(particle.x, 1.0, places=14)
        self.assertAlmostEqual(particle.r_hat, 0.6, places=13)

    def test_particle_outside_the_base_is_reported(self):
        config = _config(n=33)
        state = initial_state(config)
        particle = lagrangian_step(CLIFFORD, config.domain, state, Particle(x=LENGTH + 1e-3, r_hat=0.58), 1e-4)
        self.assertFalse(particle.active)
        self.assertIn('left the base', particle.reason)
        # inactive particles stay put
        self.assertEqual(lagrangian_step(CLIFFORD, config.domain, state, particle, 1e-4), particle)


class ArchiveTests(TestCase):

    def test_archive_report(self):
        report = run(_config(n=33, dt=1e-3, t_end=0.01, label='archive-test'))
        stored = archive_report(report, config_text='[model]\npreset = spaceform-2-1-compact\n')
        self.assertIsNotNone(stored)
        self.assertEqual(FlowRun.objects.count(), 1)
        self.assertEqual(stored.termination, 'ReachedTEnd')
        self.assertEqual(stored.label, 'archive-test')
        self.assertEqual(SeriesRow.objects.filter(run=stored).count(), len(report.rows))
        self.assertLessEqual(stored.volume_drift, 1e-6)
        self.assertIn('ReachedTEnd', str(stored))

        self.assertAlmostEqual(stored.max_v, max(row.max_v for row in report.rows), places=14)
        self.assertGreaterEqual(stored.max_phi, stored.max_v)
        last = SeriesRow.objects.filter(run=stored).last()
        self.assertAlmostEqual(last.max_v, report.final.max_v, places=14)
        self.assertAlmostEqual(last.max_phi, report.final.max_phi, places=14)

    def test_archive_failure_is_logged(self):
        report = run(_config(n=33, t_end=0.0))
        report.termination = None
        with self.assertLogs('flow.models', level='ERROR'):
            self.assertIsNone(archive_report(report))
        self.assertEqual(FlowRun.objects.count(), 0)
