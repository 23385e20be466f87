import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from domain.grid import BaseDomain, RadiusField
from geometry.curvature import grad_norm_relation, mean_curvature, sample
from kernels.errors import DomainError, ModelError, PresetIncomplete
from kernels.presets import spaceform
from kernels.spaces import SpaceModel

from .identities import (
    OracleReport, flat_limit_suite, flat_limit_tolerance, identity_suite, run_all, spaceform_suite,
)
from .oracles import cylinder_profile, embedded_revolution_oracle, sphere_cap_profile, spaceform_tube_oracle


class SpaceformOracleTests(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(spaceform_tube_oracle(2, 1, 'compact', math.pi / 4), 0.0, places=14)
        r = 1e-4
        self.assertAlmostEqual(spaceform_tube_oracle(3, 1, 'compact', r) * r, 2.0, places=7)
        self.assertAlmostEqual(spaceform_tube_oracle(2, 1, 'noncompact', 30.0), 2.0, places=12)

    def test_rejects_bad_dimensions(self):
        with self.assertRaises(ModelError):
            spaceform_tube_oracle(2, 2, 'compact', 0.5)
        with self.assertRaises(ModelError):
            spaceform_tube_oracle(3, 0, 'compact', 0.5)


class RevolutionOracleTests(SimpleTestCase):

    def test_cylinder(self):
        s = np.linspace(0.0, 2.0, 41)
        np.testing.assert_allclose(embedded_revolution_oracle(cylinder_profile(0.8), s), 1.25, rtol=1e-6)

    def test_sphere_cap(self):
        s = np.linspace(-0.3, 0.3, 201)
        np.testing.assert_allclose(embedded_revolution_oracle(sphere_cap_profile(1.0), s), 2.0, atol=1e-4)

    def test_accepts_node_values(self):
        s = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(
            embedded_revolution_oracle(np.full(21, 2.0), s), embedded_revolution_oracle(cylinder_profile(2.0), s)
        )

    def test_degenerate_metric(self):
        s = np.linspace(-1.0, 1.0, 21)
        with self.assertRaises(DomainError):
            embedded_revolution_oracle(lambda x: x, s)

    def test_needs_uniform_grid(self):
        with self.assertRaises(DomainError):
            embedded_revolution_oracle(cylinder_profile(1.0), np.array([0.0, 0.1, 0.3, 0.6, 1.0]))

    def test_meridian_curvature_sign(self):
        # H = 1/r - r'' where r' = 0: a neck loses curvature, a bulge gains it
        s = np.linspace(0.0, 2.0 * math.pi, 401)
        neck = embedded_revolution_oracle(lambda x: 1.0 - 0.5 * np.cos(x - math.pi), s)
        bulge = embedded_revolution_oracle(lambda x: 1.0 + 0.5 * np.cos(x - math.pi), s)
        self.assertAlmostEqual(neck[200], 2.0 - 0.5, delta=1e-4)
        self.assertAlmostEqual(bulge[200], 1.0 / 1.5 + 0.5, delta=1e-4)


class ReportTests(SimpleTestCase):

    def test_pass_iff_within_tolerance(self):
        self.assertTrue(OracleReport('a', 1e-13, 1e-12, 10).passed)
        self.assertTrue(OracleReport('a', 1e-12, 1e-12, 10).passed)
        self.assertFalse(OracleReport('a', 2e-12, 1e-12, 10).passed)
        self.assertFalse(OracleReport('a', math.nan, 1e-12, 10).passed)

    def test_row(self):
        row = OracleReport('kernels', 0.0, 1e-12, 5, seed=7).as_row()
        self.assertEqual(row, ('kernels', 0.0, 1e-12, 'pass', 5, 7))


class IdentitySuiteTests(SimpleTestCase):

    def test_space_forms(self):
        for model in (spaceform(2, 1, 'compact').model(), spaceform(4, 2, 'noncompact').model(),
                      spaceform(6, 5, 'noncompact').model()):
            for report in identity_suite(model, samples=10_000, seed=11):
                self.assertTrue(report.passed, str(report))
                self.assertEqual(report.seed, 11)

    def test_rank_two_model(self):
        model = SpaceModel('compact', 1.0, (1, 2), {0: 1, 1: 2, 2: 1}, {0: 1, 1: 2, 2: 1}, 2)
        for report in identity_suite(model, samples=2_000, seed=3):
            self.assertTrue(report.passed, str(report))

    def test_errors_are_absolute(self):
        class Skewed:
            forward = staticmethod(grad_norm_relation.forward)

            @staticmethod
            def inverse(model, r, big_g):
                return grad_norm_relation.inverse(model, r, big_g) * (1.0 + 2e-13)

        model = spaceform(2, 1, 'compact').model()
        with mock.patch('verify.identities.grad_norm_relation', Skewed()):
            roundtrip = identity_suite(model, samples=1_000, seed=4)[0]
        # 2e-13 relative on |g| up to 10
        self.assertFalse(roundtrip.passed)
        self.assertGreater(roundtrip.max_error, 1.5e-12)

    def test_noncompact_radii_keep_kernels_moderate(self):
        model = SpaceModel('noncompact', 1.0, (1, 2), {0: 1, 1: 2, 2: 1}, {0: 1, 1: 2, 2: 1}, 2, r_max=6.0)
        for report in identity_suite(model, samples=2_000, seed=8):
            self.assertTrue(report.passed, str(report))

    def test_reproducible(self):
        model = spaceform(3, 1, 'compact').model()
        first = identity_suite(model, samples=500, seed=5)
        second = identity_suite(model, samples=500, seed=5)
        self.assertEqual([r.max_error for r in first], [r.max_error for r in second])


class SpaceformSuiteTests(SimpleTestCase):

    def test_all_dimensions(self):
        reports = spaceform_suite(samples=100, seed=2)
        # 15 (n, p) pairs per curvature sign
        self.assertEqual(len(reports), 30)
        for report in reports:
            self.assertTrue(report.passed, str(report))

    def test_perturbed_curvature_is_caught(self):
        model = spaceform(2, 1, 'compact').model()
        r = np.linspace(0.1, 1.4, 50)
        domain = BaseDomain.flat(1.0, 50)
        rho = mean_curvature(model, domain, r, np.zeros(50), np.zeros(50))
        expected = spaceform_tube_oracle(2, 1, 'compact', r)
        self.assertLessEqual(np.max(np.abs(rho - expected)), 1e-12)
        self.assertGreater(np.max(np.abs(rho * (1 + 1e-9) - expected)), 1e-12)


class FlatLimitTests(SimpleTestCase):

    def test_suite_passes(self):
        reports = flat_limit_suite()
        self.assertEqual(len(reports), 4)
        for report in reports:
            self.assertTrue(report.passed, str(report))

    def test_tolerance(self):
        self.assertAlmostEqual(flat_limit_tolerance(0.02), 1e-4 + 2e-3, places=15)

    def test_sphere_cap_flat_limit(self):
        model = spaceform(2, 1, 'compact').model(b=1e-6)
        domain = BaseDomain.flat(0.4, 81, origin=-0.2)
        field = RadiusField(domain, model, sphere_cap_profile(1.0)(domain.s))
        rho = sample(model, domain, field).rho
        # away from the ends, where the mirror boundary does not hold for a cap
        np.testing.assert_allclose(rho[5:-5], 2.0, atol=1e-4)


class RunAllTests(SimpleTestCase):

    def test_single_preset(self):
        reports = run_all(seed=1, preset='spaceform-2-1-compact', samples=500)
        self.assertTrue(all(report.passed for report in reports))
        self.assertEqual(len(reports), 4 + 30 + 4)

    def test_unknown_preset(self):
        with self.assertRaises(ModelError):
            run_all(seed=1, preset='no-such-preset')

    def test_table_stub_needs_multiplicities(self):
        with self.assertRaises(PresetIncomplete):
            run_all(seed=1, preset='rank1-compact-1', samples=10)
