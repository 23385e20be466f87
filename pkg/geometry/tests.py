import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from domain.grid import BaseDomain, RadiusField, derivatives
from kernels.errors import RangeError
from kernels.presets import spaceform
from kernels.spaces import SpaceModel

from .curvature import (
    ambient_density, average_mean_curvature, constant_radius_curvature, curvature_bound,
    grad_norm_relation, mean_curvature, monitor_phi, monitor_u, monitor_v, sample, tube_area, tube_density,
    unit_sphere_volume,
)
from .volume import (
    delta, delta_inverse, delta_reference, delta_table, enclosed_volume, equilibrium_radius,
    radius_upper_bound,
)

CLIFFORD = spaceform(2, 1, 'compact').model()
HYPERBOLIC = spaceform(2, 1, 'noncompact').model(r_max=6.0)
RANK_TWO = SpaceModel('compact', 1.0, (1, 2), {0: 1, 1: 2, 2: 1}, {0: 1, 1: 2, 2: 1}, 2)
K0_ONE = SpaceModel('compact', 1.0, (1, 2), {0: 1, 1: 2, 2: 1}, {0: 1, 1: 2, 2: 1}, 1)
GRADIENT_IN_ZERO_BLOCK = SpaceModel('compact', 1.0, (1,), {1: 1}, {0: 1, 1: 1}, 0)


def _constant(model, domain, c):
    return RadiusField(domain, model, np.full(domain.n, c))


class UnitSphereTests(SimpleTestCase):

    def test_low_dimensions(self):
        self.assertAlmostEqual(unit_sphere_volume(0), 2.0, places=14)
        self.assertAlmostEqual(unit_sphere_volume(1), 2.0 * math.pi, places=14)
        self.assertAlmostEqual(unit_sphere_volume(2), 4.0 * math.pi, places=13)
        self.assertAlmostEqual(unit_sphere_volume(3), 2.0 * math.pi ** 2, places=13)

    def test_beyond_table(self):
        # v_m = 2 pi / (m - 1) * v_(m-2)
        self.assertAlmostEqual(unit_sphere_volume(18), 2.0 * math.pi / 17.0 * unit_sphere_volume(16), places=12)


class DensityTests(SimpleTestCase):

    def test_ambient_density_values(self):
        self.assertAlmostEqual(ambient_density(CLIFFORD, math.pi / 4), 2.0 / math.pi, places=14)
        self.assertAlmostEqual(ambient_density(RANK_TWO, 1e-9), 1.0, places=12)

    def test_tube_density_reduces_to_ambient(self):
        r = np.linspace(0.05, 0.7, 40)
        for model in (CLIFFORD, HYPERBOLIC, RANK_TWO, GRADIENT_IN_ZERO_BLOCK):
            np.testing.assert_allclose(tube_density(model, r, 0.0), ambient_density(model, r), rtol=1e-14)

    def test_clifford_density(self):
        r = 0.4
        self.assertAlmostEqual(tube_density(CLIFFORD, r, 0.0), math.sin(r) / r * math.cos(r), places=15)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.01, max_value=0.7), st.floats(min_value=0.0, max_value=10.0))
    def test_tube_density_dominates(self, r, g):
        for model in (CLIFFORD, RANK_TWO, GRADIENT_IN_ZERO_BLOCK):
            self.assertGreaterEqual(tube_density(model, r, g), ambient_density(model, r) * (1 - 1e-15))


class MonitorTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(monitor_u(CLIFFORD, 0.3, 0.0), 1.0)
        self.assertAlmostEqual(monitor_u(CLIFFORD, math.pi / 3, 0.5), 1.0 / math.sqrt(2.0), places=14)

    def test_strictly_decreasing_in_gradient(self):
        g = np.linspace(0.0, 5.0, 200)
        u = monitor_u(HYPERBOLIC, 1.2, g)
        self.assertTrue(np.all(np.diff(u) < 0))
        self.assertTrue(np.all((u > 0) & (u <= 1)))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.01, max_value=1.5), st.floats(min_value=-20.0, max_value=20.0))
    def test_v_is_reciprocal_of_u(self, r, g):
        for model in (CLIFFORD, HYPERBOLIC):
            u, v = monitor_u(model, r, g), monitor_v(model, r, g)
            self.assertAlmostEqual(u * v, 1.0, delta=1e-14)
            self.assertGreaterEqual(v, 1.0)
            self.assertGreaterEqual(monitor_phi(model, r, g, 0.5), v)

    def test_phi_values(self):
        self.assertEqual(monitor_v(CLIFFORD, 0.3, 0.0), 1.0)
        self.assertAlmostEqual(monitor_phi(CLIFFORD, 0.3, 0.0, 2.0), math.exp(0.6), places=14)
        self.assertAlmostEqual(monitor_phi(CLIFFORD, math.pi / 3, 0.5, 1.0), math.exp(math.pi / 3) * math.sqrt(2.0),
                               places=13)

    def test_sample_carries_v(self):
        domain = BaseDomain.flat(2 * math.pi, 65)
        field = RadiusField(domain, RANK_TWO, 0.4 + 0.1 * np.cos(domain.s / 2.0))
        result = sample(RANK_TWO, domain, field)
        np.testing.assert_allclose(result.u * result.v, 1.0, rtol=0, atol=1e-14)
        self.assertAlmostEqual(result.max_v, 1.0 / result.min_u, places=13)
        phi = monitor_phi(RANK_TWO, result.r, result.first, 1.5)
        self.assertAlmostEqual(result.max_phi(1.5), float(np.max(phi)), places=13)

    def test_grad_norm_examples(self):
        self.assertEqual(grad_norm_relation.forward(CLIFFORD, 0.5, 0.0), 0.0)
        self.assertEqual(grad_norm_relation.inverse(CLIFFORD, 0.5, 0.0), 0.0)
        self.assertAlmostEqual(grad_norm_relation.forward(GRADIENT_IN_ZERO_BLOCK, 0.5, 1.0), 2.0, places=15)
        self.assertAlmostEqual(grad_norm_relation.inverse(GRADIENT_IN_ZERO_BLOCK, 0.5, 2.0), 1.0, places=15)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=0.01, max_value=1.5), st.floats(min_value=0.0, max_value=20.0))
    def test_grad_norm_roundtrip(self, r, g):
        big_g = grad_norm_relation.forward(CLIFFORD, r, g)
        back = grad_norm_relation.inverse(CLIFFORD, r, big_g)
        self.assertLessEqual(abs(back - g), 1e-12 * max(1.0, g))
        c = math.cos(r)
        self.assertAlmostEqual(monitor_u(CLIFFORD, r, back), c / math.sqrt(c * c + g * g), delta=1e-12)


class MeanCurvatureTests(SimpleTestCase):

    def test_clifford_tube_is_minimal(self):
        domain = BaseDomain.flat(2 * math.pi, 33)
        field = _constant(CLIFFORD, domain, math.pi / 4)
        first, second = derivatives(domain, field)
        rho = mean_curvature(CLIFFORD, domain, field, first, second)
        self.assertLess(np.max(np.abs(rho)), 1e-12)

    def test_constant_radius_spaceforms(self):
        radii = np.linspace(0.05, 1.5, 100)
        domain = BaseDomain.flat(1.0, radii.size)
        for n in range(2, 7):
            for p in range(1, n):
                compact = spaceform(n, p, 'compact').model()
                field = RadiusField(domain, compact, radii)
                rho = mean_curvature(compact, domain, field, np.zeros_like(radii), np.zeros_like(radii))
                expected = (n - p) / np.tan(radii) - p * np.tan(radii)
                np.testing.assert_allclose(rho, expected, rtol=0, atol=1e-12 * np.max(np.abs(expected)))

                noncompact = spaceform(n, p, 'noncompact').model(r_max=3.0)
                field = RadiusField(domain, noncompact, radii)
                rho = mean_curvature(noncompact, domain, field, np.zeros_like(radii), np.zeros_like(radii))
                expected = (n - p) / np.tanh(radii) + p * np.tanh(radii)
                np.testing.assert_allclose(rho, expected, rtol=0, atol=1e-12 * np.max(np.abs(expected)))

    def test_constant_radius_helper_matches(self):
        radii = np.linspace(0.05, 0.7, 30)
        domain = BaseDomain.flat(1.0, radii.size)
        field = RadiusField(domain, RANK_TWO, radii)
        rho = mean_curvature(RANK_TWO, domain, field, np.zeros(30), np.zeros(30))
        np.testing.assert_allclose(rho, constant_radius_curvature(RANK_TWO, radii), rtol=1e-13, atol=1e-12)

    def test_flat_limit_of_surface_of_revolution(self):
        model = SpaceModel('compact', 1e-6, (1,), {1: 1}, {1: 1}, 1)
        domain = BaseDomain.flat(2.0, 201)
        s = domain.s
        r = 1.0 + 0.2 * np.cos(math.pi * s / 2.0)
        g = -0.2 * math.pi / 2.0 * np.sin(math.pi * s / 2.0)
        gg = -0.2 * (math.pi / 2.0) ** 2 * np.cos(math.pi * s / 2.0)
        field = RadiusField(domain, model, r)
        rho = mean_curvature(model, domain, field, g, gg)
        q = np.sqrt(1.0 + g * g)
        expected = 1.0 / (r * q) - gg / q ** 3
        np.testing.assert_allclose(rho, expected, atol=1e-9)

    def test_transverse_term_uses_connection(self):
        model = spaceform(4, 3, 'compact').model()
        domain = BaseDomain.spherical(1.0, 17, transverse=2, origin=0.3)
        field = RadiusField(domain, model, np.full(17, 0.5))
        g = np.full(17, 0.1)
        plain = mean_curvature(model, BaseDomain.flat(1.0, 17, origin=0.3), field, g, np.zeros(17))
        warped = mean_curvature(model, domain, field, g, np.zeros(17))
        c = math.cos(0.5)
        expected = (c / math.sqrt(c * c + 0.01)) * 2.0 / np.tan(domain.s) * 0.1 / (c * c)
        np.testing.assert_allclose(plain - warped, expected, rtol=1e-12)


def _trapezoid_weights(domain):
    weights = np.full(domain.n, domain.h)
    weights[[0, -1]] *= 0.5
    return weights * domain.omega


def _area_terms(model, domain, values):
    field = RadiusField(domain, model, values)
    first, _ = derivatives(domain, field)
    return values ** model.m_vertical * tube_density(model, values, first)


def _area_gradient(model, domain, values, step=1e-7):
    """
    Central differences of the area in each r_i. Node i only reaches the terms
    at i-1, i and i+1, so every third node is moved at once and the change is
    summed over those three terms.
    """
    weights = _trapezoid_weights(domain)
    gradient = np.zeros(domain.n)
    for offset in range(3):
        bump = np.zeros(domain.n)
        bump[offset::3] = step
        change = weights * (_area_terms(model, domain, values + bump) - _area_terms(model, domain, values - bump))
        padded = np.concatenate(([0.0], change, [0.0]))
        local = padded[:-2] + padded[1:-1] + padded[2:]
        gradient[offset::3] = local[offset::3] / (2.0 * step)
    return unit_sphere_volume(model.m_vertical) * gradient


class FirstVariationTests(SimpleTestCase):
    """dA/dr_i = vol(S^mV) * rho_i * u_i * r_i^mV * psi_i * omega_i * w_i."""

    cases = {
        'multi-block': (RANK_TWO, lambda n: BaseDomain.flat(2 * math.pi, n), 0.4, 0.1),
        'k0=1': (K0_ONE, lambda n: BaseDomain.flat(2 * math.pi, n), 0.4, 0.05),
        'noncompact': (HYPERBOLIC, lambda n: BaseDomain.flat(2.0, n), 1.0, 0.1),
        'spherical base': (
            spaceform(4, 3, 'compact').model(),
            lambda n: BaseDomain.spherical(1.0, n, transverse=2, origin=0.3),
            0.5, 0.05,
        ),
    }

    def _relative_error(self, model, domain, mean, amplitude):
        values = mean + amplitude * np.cos(math.pi * (domain.s - domain.origin) / domain.length)
        field = RadiusField(domain, model, values)
        result = sample(model, domain, field)
        fibre = unit_sphere_volume(model.m_vertical)
        weights = _trapezoid_weights(domain)
        self.assertAlmostEqual(
            fibre * np.sum(weights * result.area_integrand), tube_area(model, domain, field), places=11
        )
        expected = fibre * weights * result.rho * result.u * result.area_integrand
        measured = _area_gradient(model, domain, values)
        return float(np.max(np.abs(measured - expected)[2:-2]) / np.max(np.abs(expected)))

    def test_area_gradient(self):
        for name, (model, make_domain, mean, amplitude) in self.cases.items():
            with self.subTest(name):
                self.assertLess(self._relative_error(model, make_domain(201), mean, amplitude), 1e-3)

    def test_area_gradient_is_second_order(self):
        for name, (model, make_domain, mean, amplitude) in self.cases.items():
            with self.subTest(name):
                coarse = self._relative_error(model, make_domain(201), mean, amplitude)
                fine = self._relative_error(model, make_domain(401), mean, amplitude)
                self.assertGreater(coarse / fine, 3.0)


class IntegratedQuantityTests(SimpleTestCase):

    def test_clifford_area(self):
        domain = BaseDomain.flat(2 * math.pi, 65)
        field = _constant(CLIFFORD, domain, math.pi / 4)
        self.assertAlmostEqual(tube_area(CLIFFORD, domain, field), 2 * math.pi ** 2, places=12)
        self.assertAlmostEqual(average_mean_curvature(CLIFFORD, domain, field), 0.0, places=12)

    def test_area_scales_with_omega(self):
        single = BaseDomain.flat(1.0, 33)
        double = BaseDomain(length=1.0, n=33, omega=2.0)
        values = 0.5 + 0.05 * np.cos(math.pi * single.s)
        a1 = tube_area(CLIFFORD, single, RadiusField(single, CLIFFORD, values))
        a2 = tube_area(CLIFFORD, double, RadiusField(double, CLIFFORD, values))
        self.assertAlmostEqual(a2, 2.0 * a1, places=13)

    def test_average_between_extremes(self):
        domain = BaseDomain.flat(2 * math.pi, 129)
        field = RadiusField(domain, RANK_TWO, 0.4 + 0.1 * np.cos(domain.s / 2.0))
        result = sample(RANK_TWO, domain, field)
        self.assertLessEqual(result.rho.min(), result.hbar)
        self.assertLessEqual(result.hbar, result.rho.max())
        self.assertAlmostEqual(result.area, tube_area(RANK_TWO, domain, field), places=12)
        self.assertEqual(result.u[0], 1.0)
        self.assertTrue(np.all(result.u <= 1.0))

    def test_constant_field_average(self):
        domain = BaseDomain.flat(1.0, 17)
        field = _constant(HYPERBOLIC, domain, 0.8)
        expected = 1.0 / math.tanh(0.8) + math.tanh(0.8)
        self.assertAlmostEqual(average_mean_curvature(HYPERBOLIC, domain, field), expected, places=12)

    def test_curvature_bound(self):
        low, high = curvature_bound(CLIFFORD, 0.3, 0.9)
        self.assertAlmostEqual(low, 1 / math.tan(0.9) - math.tan(0.9), places=12)
        self.assertAlmostEqual(high, 1 / math.tan(0.3) - math.tan(0.3), places=12)


class DeltaTests(SimpleTestCase):

    def test_closed_form(self):
        # spaceform(2, 1): delta(y) = sin(y)^2 / 2, resp. sinh(y)^2 / 2
        y = np.linspace(0.0, 1.5, 31)
        np.testing.assert_allclose(delta(CLIFFORD, y), np.sin(y) ** 2 / 2, rtol=1e-13, atol=1e-16)
        y = np.linspace(0.0, 5.5, 31)
        np.testing.assert_allclose(delta(HYPERBOLIC, y), np.sinh(y) ** 2 / 2, rtol=1e-13, atol=1e-16)
        self.assertEqual(delta(CLIFFORD, 0.0), 0.0)

    def test_against_reference(self):
        for y in (0.01, 0.2, 0.55, 0.74):
            self.assertAlmostEqual(delta(RANK_TWO, y), delta_reference(RANK_TWO, y), delta=1e-10 * delta(RANK_TWO, y))

    def test_flat_limit(self):
        model = SpaceModel('compact', 1e-6, (1,), {1: 1}, {1: 1}, 1, r_cut=10.0)
        for y in (0.5, 1.0, 3.0):
            self.assertAlmostEqual(delta(model, y), y * y / 2.0, places=9)

    def test_inverse_examples(self):
        self.assertEqual(delta_inverse(CLIFFORD, 0.0), 0.0)
        table = delta_table(CLIFFORD)
        self.assertEqual(delta_inverse(CLIFFORD, table.y_max), table.top)
        with self.assertRaises(RangeError):
            delta_inverse(CLIFFORD, 0.6)
        with self.assertRaises(RangeError):
            delta_inverse(CLIFFORD, -1e-3)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1.5))
    def test_inverse_roundtrip(self, x):
        self.assertAlmostEqual(delta_inverse(CLIFFORD, delta(CLIFFORD, x)), x, delta=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=1e-2, max_value=5.9))
    def test_inverse_roundtrip_noncompact(self, x):
        self.assertAlmostEqual(delta_inverse(HYPERBOLIC, delta(HYPERBOLIC, x)), x, delta=1e-10)


class VolumeTests(SimpleTestCase):

    def test_constant_field(self):
        domain = BaseDomain.flat(2.0, 21)
        field = _constant(CLIFFORD, domain, 0.5)
        expected = 2 * math.pi * 2.0 * math.sin(0.5) ** 2 / 2
        self.assertAlmostEqual(enclosed_volume(CLIFFORD, domain, field), expected, places=12)
        self.assertAlmostEqual(equilibrium_radius(CLIFFORD, domain, expected), 0.5, places=11)

    def test_monotone_in_radius(self):
        domain = BaseDomain.flat(2.0, 21)
        base = 0.4 + 0.05 * np.cos(math.pi * domain.s / 2.0)
        lower = enclosed_volume(CLIFFORD, domain, RadiusField(domain, CLIFFORD, base))
        upper = enclosed_volume(CLIFFORD, domain, RadiusField(domain, CLIFFORD, base + 0.01))
        self.assertLess(lower, upper)

    def test_solid_of_revolution_limit(self):
        model = SpaceModel('compact', 1e-6, (1,), {1: 1}, {1: 1}, 1, r_cut=10.0)
        domain = BaseDomain.flat(2.0, 401)
        r = 1.0 + 0.3 * np.cos(math.pi * domain.s / 2.0)
        volume = enclosed_volume(model, domain, RadiusField(domain, model, r))
        # pi * int r^2 ds = pi * (2 + 0.09)
        self.assertAlmostEqual(volume, math.pi * 2.09, delta=1e-4)


class RadiusBoundTests(SimpleTestCase):

    def test_zero_area_is_equilibrium_radius(self):
        domain = BaseDomain.flat(1.0, 17)
        vol = enclosed_volume(CLIFFORD, domain, _constant(CLIFFORD, domain, 0.5))
        self.assertAlmostEqual(radius_upper_bound(CLIFFORD, domain, 0.0, vol), 0.5, places=11)

    def test_bound_covers_initial_radius(self):
        domain = BaseDomain.flat(1.0, 17)
        field = _constant(CLIFFORD, domain, 0.5)
        bound = radius_upper_bound(
            CLIFFORD, domain, tube_area(CLIFFORD, domain, field), enclosed_volume(CLIFFORD, domain, field),
        )
        self.assertGreaterEqual(bound, 0.5)

    def test_monotone_in_both_arguments(self):
        domain = BaseDomain.flat(1.0, 17)
        base = radius_upper_bound(HYPERBOLIC, domain, 1.0, 1.0)
        self.assertLess(base, radius_upper_bound(HYPERBOLIC, domain, 2.0, 1.0))
        self.assertLess(base, radius_upper_bound(HYPERBOLIC, domain, 1.0, 2.0))

    def test_bound_beyond_cut_radius(self):
        domain = BaseDomain.flat(2 * math.pi, 33)
        field = _constant(CLIFFORD, domain, 0.5)
        with self.assertRaises(RangeError):
            radius_upper_bound(
                CLIFFORD, domain, tube_area(CLIFFORD, domain, field), enclosed_volume(CLIFFORD, domain, field),
            )
