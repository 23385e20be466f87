import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from kernels.errors import DomainError
from kernels.presets import spaceform

from .grid import BaseDomain, RadiusField, derivatives, enforce_boundary, quadrature
from .profiles import ClampedProfile, ConstantProfile, CosineProfile, TableProfile

MODEL = spaceform(2, 1, 'compact').model()


def _field(domain, values):
    return RadiusField(domain, MODEL, values)


class BaseDomainTests(SimpleTestCase):

    def test_flat_grid(self):
        domain = BaseDomain.flat(2.0, 11)
        self.assertAlmostEqual(domain.h, 0.2)
        self.assertEqual(domain.s[0], 0.0)
        self.assertAlmostEqual(domain.s[-1], 2.0)
        self.assertAlmostEqual(domain.vol_B, 2.0, places=12)
        self.assertTrue(np.all(domain.connection(1) == 0.0))

    def test_omega_is_read_only(self):
        domain = BaseDomain.flat(1.0, 9)
        with self.assertRaises(ValueError):
            domain.omega[0] = 2.0

    def test_invalid_domains(self):
        with self.assertRaises(DomainError):
            BaseDomain.flat(1.0, 7)
        with self.assertRaises(DomainError):
            BaseDomain.flat(0.0, 16)
        with self.assertRaises(DomainError):
            BaseDomain.spherical(1.0, 16, transverse=2, origin=0.0)
        with self.assertRaises(DomainError):
            BaseDomain.spherical(3.5, 16, transverse=1, origin=0.1)

    def test_spherical_profile(self):
        domain = BaseDomain.spherical(1.0, 33, transverse=2, origin=0.2)
        s = domain.s
        np.testing.assert_allclose(domain.omega, np.sin(s) ** 2, rtol=1e-14)
        np.testing.assert_allclose(domain.connection(1), 1.0 / np.tan(s), rtol=1e-14)
        np.testing.assert_allclose(domain.connection(0), 1.0 / np.tan(s), rtol=1e-14)

    def test_hyperbolic_without_transverse_is_flat(self):
        domain = BaseDomain.hyperbolic(2.0, 17, transverse=0, origin=0.0)
        self.assertTrue(np.all(domain.omega == 1.0))
        self.assertTrue(np.all(domain.connection(1) == 0.0))

    def test_from_table(self):
        s = np.linspace(0.5, 1.5, 21)
        domain = BaseDomain.from_table(s, omega=s, gamma={1: 1.0 / s})
        self.assertAlmostEqual(domain.origin, 0.5)
        self.assertAlmostEqual(domain.vol_B, 1.0, places=12)
        np.testing.assert_allclose(domain.connection(1), 1.0 / s)
        self.assertTrue(np.all(domain.connection(2) == 0.0))
        with self.assertRaises(DomainError):
            BaseDomain.from_table(np.r_[0.0, np.cumsum(np.arange(1, 12))], omega=1.0)


class RadiusFieldTests(SimpleTestCase):

    def test_field_is_immutable(self):
        domain = BaseDomain.flat(1.0, 9)
        field = _field(domain, np.full(9, 0.5))
        with self.assertRaises(ValueError):
            field.values[0] = 0.4
        other = field.with_values(np.full(9, 0.6))
        self.assertEqual(field.values[0], 0.5)
        self.assertEqual(other.values[0], 0.6)

    def test_validation(self):
        domain = BaseDomain.flat(1.0, 9)
        with self.assertRaises(DomainError):
            _field(domain, np.full(8, 0.5))
        with self.assertRaises(DomainError):
            _field(domain, np.r_[np.full(8, 0.5), 0.0])
        with self.assertRaises(DomainError):
            _field(domain, np.full(9, math.pi / 2))
        with self.assertRaises(DomainError):
            _field(domain, np.r_[np.full(8, 0.5), np.nan])


class DerivativeTests(SimpleTestCase):

    def test_constant_field(self):
        domain = BaseDomain.flat(1.0, 17)
        first, second = derivatives(domain, _field(domain, np.full(17, 0.5)))
        self.assertTrue(np.all(first == 0.0))
        self.assertTrue(np.all(second == 0.0))
        self.assertEqual(enforce_boundary(_field(domain, np.full(17, 0.5))).boundary_hessian_residual, (0.0, 0.0))

    def test_quadratic_is_exact_in_interior(self):
        domain = BaseDomain.flat(1.0, 21)
        s = domain.s
        _, second = derivatives(domain, _field(domain, 0.3 + 0.4 * s ** 2))
        np.testing.assert_allclose(second[1:-1], 0.8, rtol=1e-9)

    def test_endpoint_slope_is_exactly_zero(self):
        domain = BaseDomain.flat(1.0, 21)
        first, _ = derivatives(domain, _field(domain, 0.3 + 0.4 * domain.s ** 2))
        self.assertEqual(first[0], 0.0)
        self.assertEqual(first[-1], 0.0)

    def test_boundary_residual(self):
        domain = BaseDomain.flat(1.0, 11)
        values = np.full(11, 0.5)
        values[0] = 0.49
        ghosted = enforce_boundary(_field(domain, values))
        left, right = ghosted.boundary_hessian_residual
        self.assertAlmostEqual(left, 2.0 * 0.01 / domain.h ** 2, places=9)
        self.assertEqual(right, 0.0)
        self.assertEqual(ghosted.padded[0], values[1])
        self.assertEqual(ghosted.padded.size, 13)

    def test_second_order_convergence(self):
        errors = []
        for n in (33, 65, 129):
            domain = BaseDomain.flat(2.0, n)
            w = math.pi / domain.length
            field = _field(domain, 0.6 + 0.1 * np.cos(w * domain.s))
            first, second = derivatives(domain, field)
            errors.append((
                np.max(np.abs(first + 0.1 * w * np.sin(w * domain.s))),
                np.max(np.abs(second + 0.1 * w * w * np.cos(w * domain.s))),
            ))
        for coarse, fine in zip(errors, errors[1:]):
            self.assertGreaterEqual(coarse[0] / fine[0], 3.5)
            self.assertGreaterEqual(coarse[1] / fine[1], 3.5)


class QuadratureTests(SimpleTestCase):

    def test_constant_integrand(self):
        domain = BaseDomain.spherical(1.0, 41, transverse=1, origin=0.3)
        self.assertAlmostEqual(quadrature(domain, 1.0), domain.vol_B, places=14)
        self.assertAlmostEqual(quadrature(domain, np.full(41, 2.5)), 2.5 * domain.vol_B, places=13)

    def test_linear_integrand(self):
        domain = BaseDomain.flat(1.0, 101)
        self.assertAlmostEqual(quadrature(domain, domain.s), 0.5, places=12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=-10, max_value=10), min_size=16, max_size=16),
           st.lists(st.floats(min_value=0, max_value=5), min_size=16, max_size=16))
    def test_monotone(self, base, bump):
        domain = BaseDomain.flat(3.0, 16)
        lower = np.array(base)
        upper = lower + np.array(bump)
        self.assertLessEqual(quadrature(domain, lower), quadrature(domain, upper) + 1e-12)


class ProfileTests(SimpleTestCase):

    def test_constant(self):
        domain = BaseDomain.flat(1.0, 9)
        profile = ConstantProfile(0.4)
        self.assertTrue(np.all(profile.values(domain) == 0.4))
        self.assertEqual(profile.endpoint_derivatives(domain).max_second, 0.0)

    def test_cosine_leaves_hessian_residual(self):
        domain = BaseDomain.flat(2.0 * math.pi, 65)
        ends = CosineProfile(0.6, 0.02).endpoint_derivatives(domain)
        self.assertLess(ends.max_first, 1e-15)
        self.assertAlmostEqual(ends.max_second, 0.02 / 4.0, places=14)

    def test_clamped_satisfies_both_conditions(self):
        domain = BaseDomain.flat(2.0 * math.pi, 65)
        profile = ClampedProfile(0.6, 0.02, m=2)
        ends = profile.endpoint_derivatives(domain)
        self.assertLess(ends.max_first, 1e-15)
        self.assertLess(ends.max_second, 1e-15)
        values = profile.values(domain)
        self.assertAlmostEqual(values[0], 0.62, places=14)
        ghosted = enforce_boundary(profile.field(domain, MODEL))
        self.assertLess(max(abs(v) for v in ghosted.boundary_hessian_residual), 1e-3)

    def test_table_resampling(self):
        domain = BaseDomain.flat(1.0, 33)
        s = np.linspace(0.0, 1.0, 201)
        profile = TableProfile(s, 0.5 + 0.01 * np.cos(math.pi * s))
        np.testing.assert_allclose(profile.values(domain), 0.5 + 0.01 * np.cos(math.pi * domain.s), atol=1e-9)
        with self.assertRaises(DomainError):
            TableProfile(s[:50], s[:50]).values(domain)
