import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .errors import KernelDomainError, ModelError, PoleError, PresetIncomplete
from .presets import Provenance, get_preset, preset_catalogue, spaceform
from .roots import kernel_co, kernel_cot, kernel_double_sin, kernel_sinc, kernel_tan
from .spaces import Curvature, SpaceModel


def _model(curvature, b=1.0, ratios=(1,), k0=1, r_max=None):
    return SpaceModel(
        epsilon=curvature,
        b=b,
        ratios=ratios,
        mult_vertical={1: 1},
        mult_horizontal={k: 1 for k in ratios},
        k0=k0,
        r_max=r_max,
    )


COMPACT = _model('compact')
NONCOMPACT = _model('noncompact', r_max=50.0)


class KernelValueTests(SimpleTestCase):

    def test_co(self):
        self.assertAlmostEqual(kernel_co(COMPACT, 1, math.pi / 3), 0.5, places=15)
        self.assertEqual(kernel_co(COMPACT, 0, 0.7), 1.0)
        self.assertAlmostEqual(kernel_co(NONCOMPACT, 1, 1e-12), 1.0, places=15)

    def test_cot(self):
        self.assertEqual(kernel_cot(COMPACT, 0, 1.0), 1.0)
        self.assertEqual(kernel_cot(NONCOMPACT, 0, 2.0), 0.5)
        self.assertAlmostEqual(kernel_cot(COMPACT, 1, math.pi / 4), 1.0, places=14)
        self.assertAlmostEqual(kernel_cot(NONCOMPACT, 1, math.log(3.0)), 1.25, places=14)

    def test_tan(self):
        self.assertAlmostEqual(kernel_tan(COMPACT, 1, math.pi / 4), 1.0, places=14)
        self.assertEqual(kernel_tan(COMPACT, 0, 0.3), 0.0)
        self.assertAlmostEqual(kernel_tan(NONCOMPACT, 1, 1e-12), 0.0, places=15)
        self.assertLess(kernel_tan(NONCOMPACT, 1, 1.0), 0.0)

    def test_sinc(self):
        wide = _model('noncompact', r_max=10.0)
        self.assertEqual(kernel_sinc(wide, 0, 5.0), 1.0)
        self.assertAlmostEqual(kernel_sinc(wide, 1, 1.0), math.sinh(1.0), places=14)
        half = _model('compact', b=0.5)
        self.assertAlmostEqual(kernel_sinc(half, 1, math.pi / 2), 2.0 * math.sqrt(2.0) / math.pi, places=14)
        # k*b*r = pi
        self.assertAlmostEqual(kernel_sinc(half, 4, math.pi / 2), 0.0, places=14)

    def test_double_sin(self):
        self.assertAlmostEqual(kernel_double_sin(COMPACT, 1, math.pi / 4), 1.0, places=14)
        self.assertEqual(kernel_double_sin(COMPACT, 0, 0.4), 0.0)
        self.assertAlmostEqual(kernel_double_sin(NONCOMPACT, 1, 0.5), -math.sinh(1.0), places=14)

    def test_arrays_keep_shape(self):
        r = np.linspace(0.1, 1.2, 7)
        for kernel in (kernel_co, kernel_cot, kernel_tan, kernel_sinc, kernel_double_sin):
            values = kernel(COMPACT, 1, r)
            self.assertEqual(values.shape, r.shape)
        self.assertIsInstance(kernel_co(COMPACT, 1, 0.3), float)

    def test_series_matches_closed_form_near_threshold(self):
        for model in (COMPACT, NONCOMPACT):
            below = kernel_cot(model, 1, 0.99e-4) * 0.99e-4
            above = kernel_cot(model, 1, 1.01e-4) * 1.01e-4
            self.assertAlmostEqual(below, above, places=8)
            self.assertAlmostEqual(kernel_sinc(model, 1, 0.99e-4), kernel_sinc(model, 1, 1.01e-4), places=8)


class KernelErrorTests(SimpleTestCase):

    def test_radius_outside_domain(self):
        for r in (0.0, -0.1, math.pi / 2, 2.0):
            with self.assertRaises(KernelDomainError):
                kernel_co(COMPACT, 1, r)
        with self.assertRaises(KernelDomainError):
            kernel_sinc(NONCOMPACT, 1, np.array([0.5, -1.0]))

    def test_domain_error_is_value_error(self):
        with self.assertRaises(ValueError):
            kernel_tan(COMPACT, 1, 0.0)

    def test_tan_pole(self):
        # k = 2 puts the tangent pole at pi/4, inside the k = 1 model's domain
        with self.assertRaises(PoleError):
            kernel_tan(COMPACT, 2, math.pi / 4)


class KernelIdentityTests(SimpleTestCase):

    def test_cot_continuous_in_k(self):
        for r in (0.05, 0.3, 1.0, 1.4):
            self.assertLessEqual(abs(kernel_cot(COMPACT, 1e-8, r) - 1.0 / r), 1e-6)
            self.assertLessEqual(abs(kernel_cot(NONCOMPACT, 1e-8, r) - 1.0 / r), 1e-6)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=1e-6, max_value=5.0))
    def test_hyperbolic_branch(self, r):
        co = kernel_co(NONCOMPACT, 1, r)
        sinh = r * kernel_sinc(NONCOMPACT, 1, r)
        self.assertLessEqual(abs(co * co - sinh * sinh - 1.0), 1e-12 * co * co)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1.5), st.sampled_from([0.5, 1.0]))
    def test_tan_times_cot_compact(self, r, k):
        product = kernel_tan(COMPACT, k, r) * kernel_cot(COMPACT, k, r)
        self.assertAlmostEqual(product, k * k, delta=1e-12 * max(1.0, k * k))

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=5.0), st.sampled_from([1.0, 2.0]))
    def test_tan_times_cot_noncompact(self, r, k):
        product = kernel_tan(NONCOMPACT, k, r) * kernel_cot(NONCOMPACT, k, r)
        self.assertAlmostEqual(product, -k * k, delta=1e-12 * k * k)


class SpaceModelTests(SimpleTestCase):

    def test_default_cut_radius(self):
        self.assertAlmostEqual(COMPACT.r_cut, math.pi / 2)
        self.assertEqual(NONCOMPACT.r_cut, math.inf)
        two = _model('compact', b=2.0, ratios=(1, 2), k0=2)
        self.assertAlmostEqual(two.r_cut, math.pi / 8)

    def test_invalid_models(self):
        with self.assertRaises(ModelError):
            _model('compact', b=0.0)
        with self.assertRaises(ModelError):
            SpaceModel('compact', 1.0, (1,), {1: 0}, {1: 1}, 1)
        with self.assertRaises(ModelError):
            SpaceModel('compact', 1.0, (1,), {1: 1}, {1: 1}, 2)
        with self.assertRaises(ModelError):
            SpaceModel('compact', 1.0, (1,), {1: 1}, {0: 1}, 1)
        with self.assertRaises(ModelError):
            SpaceModel('compact', 1.0, (1,), {1: 1}, {1: 1}, 1, r_cut=2.0)
        with self.assertRaises(ModelError):
            SpaceModel('compact', 1.0, (1,), {3: 1}, {1: 1}, 1)

    def test_ceiling(self):
        self.assertAlmostEqual(COMPACT.ceiling(), math.pi / 2 * (1 - 1e-3))
        self.assertEqual(NONCOMPACT.ceiling(), 50.0)
        with self.assertRaises(ModelError):
            _model('noncompact').ceiling()

    def test_replace_rescales_default_cut(self):
        wider = COMPACT.replace(b=0.5)
        self.assertAlmostEqual(wider.r_cut, math.pi)
        self.assertEqual(wider.m_vertical, 1)

    def test_reduced_horizontal(self):
        model = SpaceModel('compact', 1.0, (1, 2), {1: 2}, {1: 1, 2: 3, 0: 1}, 2)
        self.assertEqual(model.reduced_horizontal(2), 2)
        self.assertEqual(model.reduced_horizontal(1), 1)
        self.assertEqual(model.m_horizontal, 5)
        self.assertEqual(model.k_max, 2.0)

    def test_curvature_parse(self):
        self.assertIs(Curvature.parse('Non-Compact'), Curvature.NONCOMPACT)
        self.assertIs(Curvature.parse(1), Curvature.COMPACT)
        with self.assertRaises(ModelError):
            Curvature.parse('flat')


class PresetTests(SimpleTestCase):

    def test_spaceform_multiplicities(self):
        model = spaceform(2, 1, 'compact').model()
        self.assertEqual(model.mult_vertical, ((1.0, 1),))
        self.assertEqual(model.mult_horizontal, ((1.0, 1),))
        self.assertEqual(model.ratios, (1.0,))
        self.assertAlmostEqual(model.r_cut, math.pi / 2)

        hyperbolic = spaceform(5, 2, 'noncompact').model(r_max=4.0)
        self.assertIs(hyperbolic.epsilon, Curvature.NONCOMPACT)
        self.assertEqual(hyperbolic.vertical(1), 3)
        self.assertEqual(hyperbolic.horizontal(1), 2)
        self.assertEqual(hyperbolic.r_cut, math.inf)

    def test_rank_two_stub(self):
        preset = get_preset('rank2-compact-1')
        self.assertIs(preset.provenance, Provenance.TABLE)
        self.assertIs(preset.epsilon, Curvature.COMPACT)
        self.assertEqual(preset.k0, 2.0)
        self.assertEqual(preset.ratios, (1.0, 2.0))
        self.assertFalse(preset.is_complete)
        self.assertIn('SU(3)/SO(3)', preset.description)
        with self.assertRaises(PresetIncomplete):
            preset.model()

    def test_stub_with_multiplicities(self):
        model = get_preset('rank2-noncompact-5-k0-0').model(
            mult_vertical={1: 2}, mult_horizontal={0: 1, 1: 2}, r_max=3.0,
        )
        self.assertEqual(model.k0, 0.0)
        self.assertEqual(model.m_horizontal, 3)

    def test_catalogue(self):
        names = [preset.name for preset in preset_catalogue()]
        self.assertEqual(len(names), len(set(names)))
        self.assertIn('spaceform-6-5-noncompact', names)
        self.assertIn('rank1-compact-8', names)
        self.assertIn('rank2-compact-5-k0-1', names)
        complete = [p for p in preset_catalogue() if p.provenance is Provenance.SPACE_FORM]
        self.assertTrue(all(p.is_complete for p in complete))

    def test_unknown_preset(self):
        with self.assertRaises(ModelError):
            get_preset('rank3-compact-1')
        with self.assertRaises(ModelError):
            get_preset('spaceform-2-2-compact')
