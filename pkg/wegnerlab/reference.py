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

from .base import SolverBase
from .base import SolverError

log = logging.getLogger(__name__)


class ReferenceSolver(SolverBase):
    """A solver using :py:mod:`numpy.linalg` only.

    This solver shares no code path with :py:class:`~wegnerlab.dense.DenseSolver` and is used as an
    independent oracle when cross-checking Monte Carlo results.
    """

    library = 'numpy.linalg'

    def eigh(self, matrix, eigenvectors=False):
        dense = self.as_dense(matrix)
        try:
            if eigenvectors:
                values, vectors = self.module.eigh(dense)
                return values, vectors
            return self.module.eigvalsh(dense), None
        except self.module.LinAlgError as e:
            raise SolverError('numpy eigh failed: %s' % e)

    def eigvalsh(self, matrix):
        return self.eigh(matrix)[0]

    def ground_state(self, matrix):
        values, vectors = self.eigh(matrix, eigenvectors=True)
        return float(values[0]), vectors[:, 0]
