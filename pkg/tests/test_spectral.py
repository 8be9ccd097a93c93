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
import io
import unittest

import numpy as np

from wegnerlab.base import QuadratureError
from wegnerlab.base import SolverError
from wegnerlab.base import TheoremViolation
from wegnerlab.constants import BC_DIRICHLET
from wegnerlab.disorder import UniformDensity
from wegnerlab.disorder import trapezoid_density
from wegnerlab.disorder import triangle_density
from wegnerlab.hamiltonian import BoxGeometry
from wegnerlab.hamiltonian import HamiltonianMatrix
from wegnerlab.hamiltonian import assemble
from wegnerlab.hamiltonian import discrete_laplacian
from wegnerlab.reference import ReferenceSolver
from wegnerlab.spectral import SpectrumResult
from wegnerlab.spectral import counting_function
from wegnerlab.spectral import crossing_couplings
from wegnerlab.spectral import eigenvalues
from wegnerlab.spectral import ground_state_energy
from wegnerlab.spectral import site_diagonal_projection
from wegnerlab.spectral import spectral_averaging_check
from wegnerlab.spectral import trace_projection
from wegnerlab.spectral import weyl_shift_bound
from wegnerlab.spectral import write_spectra

from .utils import CompatDoctestChecker


class BrokenSolver(ReferenceSolver):
    def eigh(self, matrix, eigenvectors=False):
        raise SolverError('broken')


class NaNSolver(ReferenceSolver):
    def eigh(self, matrix, eigenvectors=False):
        return np.array([np.nan, 1.0]), None


class EigenvaluesTestCase(unittest.TestCase):
    def test_eigenvalues(self):
        hamiltonian = discrete_laplacian(BoxGeometry(1, 6))
        spectrum = eigenvalues(hamiltonian, provenance={'seed': 1, 'sample_id': 4})
        self.assertEqual(len(spectrum), 6)
        self.assertEqual(spectrum.sample_id, 4)
        self.assertTrue(np.all(np.diff(spectrum.eigenvalues) >= 0))
        np.testing.assert_allclose(spectrum.eigenvalues, [0, 1, 1, 3, 3, 4], atol=1e-12)

        reference = eigenvalues(hamiltonian, solver='reference', check=False)
        np.testing.assert_allclose(reference.eigenvalues, spectrum.eigenvalues, atol=1e-12)

    def test_solver_error(self):
        hamiltonian = discrete_laplacian(BoxGeometry(1, 3))
        with self.assertRaisesRegex(SolverError, r'^broken \(sample_id=2, seed=1\)$'):
            eigenvalues(hamiltonian, BrokenSolver(), provenance={'seed': 1, 'sample_id': 2})

    def test_non_finite(self):
        matrix = np.eye(2)
        with self.assertRaisesRegex(SolverError, 'non-finite'):
            eigenvalues(HamiltonianMatrix(BoxGeometry(1, 2), matrix), NaNSolver(), check=False)

    def test_ground_state(self):
        box = BoxGeometry(2, 70, BC_DIRICHLET)
        hamiltonian = assemble(box, None, np.zeros(box.volume))
        self.assertTrue(hamiltonian.is_sparse)
        expected = 2 * (2 - 2 * np.cos(np.pi / 71))
        self.assertAlmostEqual(ground_state_energy(hamiltonian), expected, places=9)

        small = discrete_laplacian(BoxGeometry(1, 5))
        self.assertAlmostEqual(ground_state_energy(small, 'reference'), 0.0, places=12)


class CountingTestCase(unittest.TestCase):
    def test_counting_function(self):
        spectrum = SpectrumResult([0.0, 1.0, 1.0, 3.0])
        self.assertEqual(counting_function(spectrum, 1.0), 0.25)
        self.assertEqual(counting_function(spectrum, 1.5), 0.75)
        self.assertEqual(counting_function(spectrum, -1.0), 0.0)
        self.assertEqual(counting_function(spectrum, 10.0), 1.0)

    def test_trace_projection(self):
        spectrum = SpectrumResult([0.0, 1.0, 1.0, 3.0])
        self.assertEqual(trace_projection(spectrum, (1.0, 1.0)), 2)
        self.assertEqual(trace_projection(spectrum, (0.0, 3.0)), 4)
        self.assertEqual(trace_projection(spectrum, (1.5, 2.5)), 0)
        self.assertEqual(trace_projection(spectrum, (3.0, 1.0)), 0)

    def test_write_spectra(self):
        stream = io.StringIO()
        spectra = [SpectrumResult([0.5, 1.0], {'sample_id': 0}), SpectrumResult([0.25], {'sample_id': 1})]
        self.assertEqual(write_spectra(stream, spectra, 'abc'), 3)
        self.assertEqual(stream.getvalue(), 'sample_id,index,eigenvalue,config_hash\n'
                                            '0,0,0.5,abc\n0,1,1.0,abc\n1,0,0.25,abc\n')


class RankOneTestCase(unittest.TestCase):
    def test_site_projection(self):
        hamiltonian = discrete_laplacian(BoxGeometry(1, 5))
        # the constant vector is the only eigenvector at 0
        self.assertAlmostEqual(site_diagonal_projection(hamiltonian, (-0.5, 0.5), 2), 0.2)
        self.assertAlmostEqual(site_diagonal_projection(hamiltonian, (-1, 5), 2), 1.0)

    def test_weyl(self):
        rng = np.random.default_rng(1)
        box = BoxGeometry(2, 4)
        hamiltonian = assemble(box, None, rng.uniform(0, 1, box.volume))
        for t in (-2.0, 0.3, 5.0):
            self.assertLessEqual(weyl_shift_bound(hamiltonian, 5, t), abs(t) + 1e-12)

    def test_crossing(self):
        hamiltonian = HamiltonianMatrix(BoxGeometry(1, 1), np.array([[0.5]]))
        np.testing.assert_allclose(crossing_couplings(hamiltonian, 0, [1.0, 2.0]), [0.5, 1.5])
        self.assertEqual(crossing_couplings(hamiltonian, 0, [0.5]), [0.0])

        rng = np.random.default_rng(2)
        box = BoxGeometry(1, 6)
        hamiltonian = assemble(box, None, rng.uniform(0, 1, box.volume))
        for t in crossing_couplings(hamiltonian, 3, [0.7, 2.2]):
            values = np.linalg.eigvalsh(hamiltonian.with_site_shift(3, t).toarray())
            self.assertTrue(np.min(np.abs(values - 0.7)) < 1e-9 or np.min(np.abs(values - 2.2)) < 1e-9)


class SpectralAveragingTestCase(unittest.TestCase):
    def test_single_site(self):
        # a 1x1 matrix makes the integral the probability that t lands in the interval
        hamiltonian = HamiltonianMatrix(BoxGeometry(1, 1), np.array([[0.0]]))
        lhs, bound = spectral_averaging_check(hamiltonian, 0, (0.25, 0.5), triangle_density())
        self.assertAlmostEqual(lhs, 0.375, places=9)
        self.assertEqual(bound, 0.5)

        lhs, bound = spectral_averaging_check(hamiltonian, 0, (0.2, 0.7), UniformDensity(1.0))
        self.assertAlmostEqual(lhs, 0.5, places=9)
        self.assertAlmostEqual(bound, 0.5)

    def test_random_systems(self):
        rng = np.random.default_rng(7)
        densities = [triangle_density(), trapezoid_density(-1, 1, 0.5), UniformDensity(2.0)]
        for i in range(30):
            box = BoxGeometry(1 + i % 2, 2 + i % 3, BC_DIRICHLET)
            hamiltonian = assemble(box, None, rng.uniform(-1, 1, box.volume))
            lower = float(rng.uniform(-1, 5))
            interval = (lower, lower + float(rng.uniform(0.01, 0.5)))
            density = densities[i % len(densities)]
            j = int(rng.integers(box.volume))
            lhs, bound = spectral_averaging_check(hamiltonian, j, interval, density)
            self.assertGreaterEqual(lhs, 0.0)
            self.assertLessEqual(lhs, bound + 1e-6)

    def test_violation(self):
        hamiltonian = HamiltonianMatrix(BoxGeometry(1, 1), np.array([[0.0]]))
        with self.assertRaisesRegex(TheoremViolation, 'exceeds'):
            spectral_averaging_check(hamiltonian, 0, (0.25, 0.5), triangle_density(), tolerance=-0.2)

    def test_no_convergence(self):
        hamiltonian = HamiltonianMatrix(BoxGeometry(1, 1), np.array([[0.0]]))
        with self.assertRaises(QuadratureError):
            spectral_averaging_check(hamiltonian, 0, (0.25, 0.5), triangle_density(), quadrature_points=2,
                                     cap=2)


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite('wegnerlab.spectral', checker=CompatDoctestChecker()))
    return tests
