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

from .base import SolverBase
from .base import SolverError

log = logging.getLogger(__name__)


class DenseSolver(SolverBase):
    """This solver uses the LAPACK drivers exposed by :py:mod:`scipy.linalg`.

    This is the default solver. Sparse inputs are converted to dense arrays first, so it should only be used
    for matrices that comfortably fit into memory.

    :param driver: Optional LAPACK driver passed to :py:func:`scipy.linalg.eigh`, e.g. ``"evr"``. The default
                   lets scipy choose.
    """

    library = 'scipy.linalg'

    def __init__(self, driver=None):
        super(DenseSolver, self).__init__()
        self.driver = driver

    def eigh(self, matrix, eigenvectors=False):
        dense = self.as_dense(matrix)
        try:
            if eigenvectors:
                values, vectors = self.module.eigh(dense, driver=self.driver)
                return values, vectors
            values = self.module.eigh(dense, eigvals_only=True, driver=self.driver)
        except (self.module.LinAlgError, ValueError) as e:
            raise SolverError('LAPACK eigh failed: %s' % e)
        return values, None

    def eigvalsh(self, matrix):
        values, _vectors = self.eigh(matrix)
        return values

    def ground_state(self, matrix):
        dense = self.as_dense(matrix)
        try:
            values, vectors = self.module.eigh(dense, subset_by_index=[0, 0])
        except (self.module.LinAlgError, ValueError) as e:
            raise SolverError('LAPACK eigh failed: %s' % e)

        vector = vectors[:, 0]
        return float(values[0]), vector / np.linalg.norm(vector)
