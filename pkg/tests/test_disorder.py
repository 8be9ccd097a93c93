# This file is part of wegnerlab.
#
# wegnerlab is free software: you can redistribute it and/or modify it under the terms of the GNU General
# Public License as published by the Free Software Foundation, either version 3 of the License, or (at your
# option) any later version.
#
# wegnerlab is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the
# implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License
# for more details.
#
# You should have received a copy of the GNU General Public License along with wegnerlab. If not, see
# <http://www.gnu.org/licenses/>.

import doctest
import unittest

import numpy as np
from scipy import stats

from wegnerlab.base import ConfigurationError
from wegnerlab.base import IndexMismatchError
from wegnerlab.base import NotApplicableError
from wegnerlab.conv_toeplitz import ConvolutionVector
from wegnerlab.conv_toeplitz import box_sites
from wegnerlab.conv_toeplitz import build_truncation
from wegnerlab.conv_toeplitz import extended_sites
from wegnerlab.conv_toeplitz import invert_truncation
from wegnerlab.disorder import DisorderSample
from wegnerlab.disorder import PiecewiseLinearDensity
from wegnerlab.disorder import UniformDensity
from wegnerlab.disorder import density_from_json
from wegnerlab.disorder import sample_omega
from wegnerlab.disorder import site_uniforms
from wegnerlab.disorder import transform
from wegnerlab.disorder import transformed_density_value
from wegnerlab.disorder import trapezoid_density
from wegnerlab.disorder import triangle_density
from wegnerlab.hamiltonian import BoxGeometry
from wegnerlab.hamiltonian import alloy_potential

from .test_conv_toeplitz import random_alpha
from .utils import CompatDoctestChecker


class PiecewiseLinearDensityTestCase(unittest.TestCase):
    def test_triangle(self):
        density = triangle_density()
        self.assertEqual(density.support(), (0.0, 1.0))
        self.assertEqual(density.sup_norm(), 2.0)
        self.assertEqual(density.f_prime_l1(), 4.0)
        self.assertAlmostEqual(density.mean(), 0.5)
        self.assertAlmostEqual(float(density.pdf(0.25)), 1.0)
        self.assertEqual(float(density.pdf(1.5)), 0.0)
        self.assertAlmostEqual(float(density.cdf(0.5)), 0.5)
        self.assertAlmostEqual(float(density.cdf(0.25)), 0.125)
        self.assertEqual(float(density.cdf(-1)), 0.0)
        self.assertEqual(float(density.cdf(2)), 1.0)
        self.assertAlmostEqual(float(density.ppf(0.5)), 0.5)
        self.assertAlmostEqual(float(density.ppf(0.125)), 0.25)
        self.assertAlmostEqual(float(density.ppf(0.875)), 0.75)
        np.testing.assert_array_equal(density.breakpoints(), [0.0, 0.5, 1.0])

    def test_ppf_inverts_cdf(self):
        density = trapezoid_density(-1.0, 2.0, 0.5)
        u = np.linspace(0.001, 0.999, 50)
        np.testing.assert_allclose(density.cdf(density.ppf(u)), u, atol=1e-12)

    def test_trapezoid(self):
        density = trapezoid_density(0.0, 3.0, 0.5)
        self.assertAlmostEqual(density.sup_norm(), 0.4)
        self.assertAlmostEqual(density.f_prime_l1(), 0.8)
        self.assertAlmostEqual(density.mean(), 1.5)
        with self.assertRaises(ConfigurationError):
            trapezoid_density(0.0, 1.0, 0.6)

    def test_invalid(self):
        with self.assertRaisesRegex(ConfigurationError, 'at least two'):
            PiecewiseLinearDensity([[0, 0]])
        with self.assertRaisesRegex(ConfigurationError, 'strictly increasing'):
            PiecewiseLinearDensity([[0, 0], [0, 1], [1, 0]])
        with self.assertRaisesRegex(ConfigurationError, 'nonnegative'):
            PiecewiseLinearDensity([[0, 0], [0.5, -1], [1, 0]])
        with self.assertRaisesRegex(ConfigurationError, 'vanish'):
            PiecewiseLinearDensity([[0, 1], [1, 1]])
        with self.assertRaisesRegex(ConfigurationError, 'integrates to'):
            PiecewiseLinearDensity([[0, 0], [0.5, 1], [1, 0]])

    def test_scaled(self):
        density = triangle_density().scaled(2)
        self.assertEqual(density.support(), (0.0, 2.0))
        self.assertAlmostEqual(density.sup_norm(), 1.0)
        self.assertAlmostEqual(density.f_prime_l1(), 2.0)

        mirrored = triangle_density(0, 2).scaled(-1)
        self.assertEqual(mirrored.support(), (-2.0, 0.0))
        self.assertAlmostEqual(mirrored.mean(), -1.0)

        with self.assertRaises(ConfigurationError):
            triangle_density().scaled(0)

    def test_eq(self):
        self.assertEqual(triangle_density(), density_from_json(triangle_density().to_json()))
        self.assertNotEqual(triangle_density(), triangle_density(0, 2))
        self.assertEqual(len({triangle_density(), triangle_density()}), 1)


class UniformDensityTestCase(unittest.TestCase):
    def test_uniform(self):
        density = UniformDensity(2.0)
        self.assertEqual(density.support(), (0.0, 2.0))
        self.assertEqual(density.sup_norm(), 0.5)
        self.assertEqual(density.mean(), 1.0)
        self.assertEqual(density.support_length() * density.sup_norm(), 1.0)
        self.assertEqual(float(density.cdf(1.0)), 0.5)
        self.assertEqual(float(density.ppf(0.25)), 0.5)
        with self.assertRaises(NotApplicableError):
            density.f_prime_l1()

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            UniformDensity(0)
        with self.assertRaises(ConfigurationError):
            UniformDensity(1).scaled(-1)
        self.assertEqual(UniformDensity(1).scaled(3), UniformDensity(3))


class DensityFromJSONTestCase(unittest.TestCase):
    def test_kinds(self):
        self.assertEqual(density_from_json({'kind': 'uniform', 'omega_plus': 2}), UniformDensity(2))
        density = density_from_json({'kind': 'piecewise_linear', 'points': [[0, 0], [0.5, 2], [1, 0]]})
        self.assertEqual(density, triangle_density())

    def test_superposition(self):
        with self.assertRaisesRegex(ConfigurationError, 'superpositions'):
            density_from_json([{'kind': 'uniform', 'omega_plus': 1}, triangle_density().to_json()])
        with self.assertRaisesRegex(ConfigurationError, 'superpositions'):
            density_from_json({'kind': 'uniform', 'omega_plus': 1, 'points': [[0, 0], [1, 0]]})

    def test_errors(self):
        with self.assertRaisesRegex(ConfigurationError, r'^model\.density: unknown density kind'):
            density_from_json({'kind': 'gauss'})
        with self.assertRaisesRegex(ConfigurationError, r'^x: missing key'):
            density_from_json({'kind': 'uniform'}, path='x')
        with self.assertRaisesRegex(ConfigurationError, r'^model\.density: Density integrates'):
            density_from_json({'kind': 'piecewise_linear', 'points': [[0, 0], [1, 1], [3, 0]]})


class SamplingTestCase(unittest.TestCase):
    def test_site_uniforms(self):
        coords = box_sites(2, 5).coords
        first = site_uniforms(7, 3, coords)
        np.testing.assert_array_equal(first, site_uniforms(7, 3, coords))
        self.assertTrue(np.all((first > 0) & (first < 1)))
        self.assertFalse(np.array_equal(first, site_uniforms(7, 4, coords)))
        self.assertFalse(np.array_equal(first, site_uniforms(8, 3, coords)))

    def test_shared_sites(self):
        # a site gets the same coupling in every box that contains it
        density = triangle_density()
        small = sample_omega(density, box_sites(1, 4), 11, 0)
        large = sample_omega(density, extended_sites(box_sites(1, 8), [0, 1, 2]), 11, 0)
        np.testing.assert_array_equal(large.restrict(box_sites(1, 4)), small.omega)

    def test_distribution(self):
        density = triangle_density()
        sample = sample_omega(density, box_sites(1, 2000), 2024, 0)
        result = stats.kstest(sample.omega, density.cdf)
        self.assertGreater(result.pvalue, 1e-3)

        density = UniformDensity(3.0)
        sample = sample_omega(density, box_sites(2, 40), 2024, 1)
        self.assertGreater(stats.kstest(sample.omega, density.cdf).pvalue, 1e-3)

    def test_sample(self):
        sites = box_sites(1, 3)
        sample = DisorderSample(sites, [0.1, 0.2, 0.3], seed=1, sample_id=2)
        self.assertEqual(sample.provenance, {'seed': 1, 'sample_id': 2})
        self.assertFalse(sample.omega.flags.writeable)
        with self.assertRaises(IndexMismatchError):
            DisorderSample(sites, [0.1, 0.2])


class TransformTestCase(unittest.TestCase):
    def test_potential_is_restricted_transform(self):
        rng = np.random.default_rng(4)
        for i in range(1000):
            d = 1 + i % 2
            alpha = random_alpha(rng, d, star=float(rng.uniform(0, 2)))
            box = BoxGeometry(d, int(rng.integers(1, 6)))
            truncation = build_truncation(alpha, box)
            sample = DisorderSample(truncation.site_index, rng.random(truncation.size))

            eta = transform(truncation, sample)
            restricted = eta[truncation.site_index.positions(box.sites.coords)]
            np.testing.assert_allclose(alloy_potential(alpha, sample, box), restricted, rtol=0, atol=1e-12)

    def test_index_mismatch(self):
        alpha = ConvolutionVector({0: 1.0, 1: -0.4})
        truncation = build_truncation(alpha, box_sites(1, 3))
        sample = DisorderSample(box_sites(1, 4), np.zeros(4))
        with self.assertRaises(IndexMismatchError):
            transform(truncation, sample)

    def test_linear(self):
        rng = np.random.default_rng(5)
        for i in range(200):
            d = 1 + i % 2
            alpha = random_alpha(rng, d, star=float(rng.uniform(0, 2)))
            truncation = build_truncation(alpha, BoxGeometry(d, int(rng.integers(1, 6))))
            first = DisorderSample(truncation.site_index, rng.random(truncation.size))
            second = DisorderSample(truncation.site_index, rng.normal(size=truncation.size))
            a, b = rng.uniform(-3, 3, size=2)

            combined = DisorderSample(truncation.site_index, a * first.omega + b * second.omega)
            expected = a * transform(truncation, first) + b * transform(truncation, second)
            np.testing.assert_allclose(transform(truncation, combined), expected, rtol=1e-12, atol=1e-12)

    def test_scaled_sup_norm(self):
        # the law of c * omega has density f(x / c) / c
        rng = np.random.default_rng(6)
        densities = [UniformDensity(2.0), triangle_density(), trapezoid_density(-1.0, 2.0, 0.5)]
        for factor in rng.uniform(0.01, 100, size=50):
            for density in densities:
                scaled = density.scaled(float(factor))
                self.assertAlmostEqual(scaled.sup_norm() * factor / density.sup_norm(), 1.0, places=12)


    def test_transformed_density(self):
        density = triangle_density()
        identity = np.eye(3)
        eta = np.array([0.25, 0.5, 0.75])
        self.assertAlmostEqual(transformed_density_value(density, identity, eta), 1.0 * 2.0 * 1.0)
        self.assertEqual(transformed_density_value(density, identity, [0.25, 0.5, 1.5]), 0.0)

        alpha = ConvolutionVector({0: 2.0})
        inverse = invert_truncation(build_truncation(alpha, box_sites(1, 3)))
        value = transformed_density_value(density, inverse, 2 * eta)
        self.assertAlmostEqual(value, 2.0 / 8)


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite('wegnerlab.disorder', checker=CompatDoctestChecker()))
    return tests
