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

import logging

import numpy as np
from scipy import sparse

from .base import NotSupportedError
from .base import SolverBase
from .base import SolverError
from .constants import DENSE_LIMIT

log = logging.getLogger(__name__)


def gershgorin_interval(matrix):
    """Return an interval ``(lower, upper)`` containing the spectrum of a symmetric matrix."""

    matrix = sparse.csr_matrix(matrix)
    diagonal = matrix.diagonal()
    radius = np.asarray(abs(matrix).sum(axis=1)).ravel() - np.abs(diagonal)
    return float(np.min(diagonal - radius)), float(np.max(diagonal + radius))


class SparseSolver(SolverBase):
    """This solver uses ARPACK through :py:func:`scipy.sparse.linalg.eigsh`.

    The ground state is computed in shift-invert mode about a point strictly below the Gershgorin interval of
    the matrix, so the eigenvalue closest to the shift is the smallest one.

    .. NOTE:: Full spectra are only computed for matrices with at most ``DENSE_LIMIT`` rows, by converting
       them to dense arrays.

    :param     tol: Relative accuracy passed to ARPACK.
    :param maxiter: Maximum number of Arnoldi update iterations.
    :param residual: Accepted residual ``|Hv - lambda v|`` relative to the Gershgorin norm bound.
    """

    library = 'scipy.sparse.linalg'

    def __init__(self, tol=1e-12, maxiter=5000, residual=1e-8):
        super(SparseSolver, self).__init__()
        self.tol = tol
        self.maxiter = maxiter
        self.residual = residual

    def eigh(self, matrix, eigenvectors=False):
        if matrix.shape[0] > DENSE_LIMIT:
            raise NotSupportedError('Full spectrum of a %sx%s matrix is not supported.' % matrix.shape)

        dense = self.as_dense(matrix)
        if eigenvectors:
            return np.linalg.eigh(dense)
        return np.linalg.eigvalsh(dense), None

    def eigvalsh(self, matrix):
        return self.eigh(matrix)[0]

    def ground_state(self, matrix):
        matrix = sparse.csr_matrix(matrix, dtype=float)
        size = matrix.shape[0]
        if size < 3:  # ARPACK needs k < n - 1
            values, vectors = np.linalg.eigh(matrix.toarray())
            return float(values[0]), vectors[:, 0]

        lower, upper = gershgorin_interval(matrix)
        norm = max(abs(lower), abs(upper), 1.0)
        sigma = lower - 1.0

        # deterministic start vector, so repeated solves are bitwise reproducible
        v0 = 1.0 + 0.01 * np.cos(np.arange(size))
        try:
            values, vectors = self.module.eigsh(matrix.tocsc(), k=1, sigma=sigma, which='LM', v0=v0,
                                                tol=self.tol, maxiter=self.maxiter)
        except self.module.ArpackNoConvergence as e:
            raise SolverError('ARPACK did not converge: %s' % e)
        except (self.module.ArpackError, RuntimeError) as e:
            raise SolverError('ARPACK failed: %s' % e)

        value = float(values[0])
        vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
        residual = np.linalg.norm(matrix.dot(vector) - value * vector)
        if residual > self.residual * norm:
            raise SolverError('Ground state residual %g exceeds %g.' % (residual, self.residual * norm))

        log.debug('Sparse ground state of %s sites: %r (residual %g)', size, value, residual)
        return value, vector
