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

"""Finite volume lattice Hamiltonians ``-Delta + V_0 + V_omega`` on cubes."""

import functools
import logging

import numpy as np
from scipy import sparse

from .base import ConfigurationError
from .constants import BC_NEUMANN
from .constants import BC_PERIODIC
from .constants import BOUNDARY_CONDITIONS
from .constants import DENSE_LIMIT
from .conv_toeplitz import box_sites

log = logging.getLogger(__name__)


class BoxGeometry(object):
    """The cube ``{0, ..., l-1}^d`` with a boundary condition for the kinetic term.

    :param  d: The dimension, one of 1, 2 or 3.
    :param  l: The side length.
    :param bc: One of ``"periodic"``, ``"dirichlet"`` or ``"neumann"``.
    """

    def __init__(self, d, l, bc=BC_PERIODIC):
        if d not in (1, 2, 3):
            raise ConfigurationError('Dimension must be 1, 2 or 3, got %r.' % (d, ))
        if int(l) != l or l < 1:
            raise ConfigurationError('Side length must be a positive integer, got %r.' % (l, ))
        if bc not in BOUNDARY_CONDITIONS:
            raise ConfigurationError('Unknown boundary condition %r.' % (bc, ))

        self.d = int(d)
        self.l = int(l)
        self.bc = bc
        self._sites = None

    @property
    def sites(self):
        """The :py:class:`~wegnerlab.conv_toeplitz.SiteIndex` of the box in lexicographic order."""
        if self._sites is None:
            self._sites = box_sites(self.d, self.l)
        return self._sites

    @property
    def volume(self):
        return self.l ** self.d

    def with_bc(self, bc):
        return BoxGeometry(self.d, self.l, bc)

    def __eq__(self, other):
        return isinstance(other, BoxGeometry) and (self.d, self.l, self.bc) == (other.d, other.l, other.bc)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.d, self.l, self.bc))

    def __repr__(self):
        return '<BoxGeometry: d=%s, l=%s, %s>' % (self.d, self.l, self.bc)


class PeriodicPotential(object):
    """A ``Z^d``-periodic background potential given by its values on one unit cell.

    :param values: Array of shape ``(p, ) * d``.
    """

    def __init__(self, values):
        values = np.array(values, dtype=float)
        if values.ndim == 0 or len(set(values.shape)) != 1 or values.shape[0] < 1:
            raise ConfigurationError('Periodic potential values must be a nonempty cube array.')
        if not np.all(np.isfinite(values)):
            raise ConfigurationError('Periodic potential values must be finite.')
        values.setflags(write=False)
        self.values = values

    @classmethod
    def zero(cls, d):
        return cls(np.zeros((1, ) * d))

    @classmethod
    def constant(cls, value, d):
        return cls(np.full((1, ) * d, float(value)))

    @classmethod
    def from_json(cls, data, d, path='model.v0'):
        if data is None:
            return cls.zero(d)
        try:
            potential = cls(data['values'])
        except (KeyError, TypeError):
            raise ConfigurationError('must be an object with "values".', path=path)
        except (ConfigurationError, ValueError) as e:
            raise ConfigurationError(str(e), path=path)
        if potential.d != d:
            raise ConfigurationError('has dimension %s, model has %s.' % (potential.d, d), path=path)
        return potential

    def to_json(self):
        return {'values': self.values.tolist()}

    @property
    def d(self):
        return self.values.ndim

    @property
    def period(self):
        return self.values.shape[0]

    @property
    def is_symmetric(self):
        """``True`` if the values are invariant under reflections along every coordinate axis."""
        return all(np.array_equal(self.values, np.flip(self.values, axis=a)) for a in range(self.d))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def extend(self, box):
        """The periodic extension to the sites of ``box``, in site order."""
        if box.d != self.d:
            raise ConfigurationError('Potential has dimension %s, box has %s.' % (self.d, box.d))
        if box.l % self.period:
            raise ConfigurationError('Period %s does not divide the side %s.' % (self.period, box.l))
        return self.values[tuple((box.sites.coords % self.period).T)]


class HamiltonianMatrix(object):
    """A real symmetric operator on the sites of a box.

    Matrices with up to ``DENSE_LIMIT`` rows are stored as :py:class:`numpy.ndarray`, larger ones in CSR
    format.
    """

    def __init__(self, geometry, matrix):
        if matrix.shape[0] > DENSE_LIMIT:
            matrix = sparse.csr_matrix(matrix)
        elif sparse.issparse(matrix):
            matrix = matrix.toarray()
        if not sparse.issparse(matrix):
            matrix.setflags(write=False)
        self.geometry = geometry
        self.matrix = matrix

    @property
    def is_sparse(self):
        return sparse.issparse(self.matrix)

    @property
    def shape(self):
        return self.matrix.shape

    def __repr__(self):
        return '<HamiltonianMatrix: %sx%s on %r>' % (self.shape[0], self.shape[1], self.geometry)

    def toarray(self):
        if self.is_sparse:
            return self.matrix.toarray()
        return np.array(self.matrix)

    def tocsr(self):
        return sparse.csr_matrix(self.matrix)

    def diagonal(self):
        return np.array(self.matrix.diagonal())

    def with_site_shift(self, j, t):
        """The operator ``H + t |delta_j><delta_j|``.

        :param j: Position of the site in the box enumeration.
        """
        if self.is_sparse:
            shift = sparse.csr_matrix(([float(t)], ([j], [j])), shape=self.shape)
            return HamiltonianMatrix(self.geometry, self.matrix + shift)

        matrix = np.array(self.matrix)
        matrix[j, j] += t
        return HamiltonianMatrix(self.geometry, matrix)

    def norm_bound(self):
        """Gershgorin bound on the operator norm (the maximal absolute row sum)."""
        return float(np.max(np.asarray(abs(self.tocsr()).sum(axis=1))))

    def dump(self, stream):
        """Write all nonzero entries as ``row col value`` lines."""
        coo = sparse.coo_matrix(self.matrix)
        order = np.lexsort((coo.col, coo.row))
        for i in order:
            stream.write('%d %d %r\n' % (coo.row[i], coo.col[i], float(coo.data[i])))


@functools.lru_cache(maxsize=32)
def _laplacian(box):
    sites = box.sites.coords
    n = len(sites)
    shape = (box.l, ) * box.d
    positions = np.arange(n)

    rows, cols, data = [], [], []
    diagonal = np.zeros(n)
    for axis in range(box.d):
        for step in (-1, 1):
            neighbours = sites.copy()
            neighbours[:, axis] += step
            if box.bc == BC_PERIODIC:
                neighbours[:, axis] %= box.l
                inside = np.ones(n, dtype=bool)
            else:
                inside = (neighbours[:, axis] >= 0) & (neighbours[:, axis] < box.l)

            targets = np.ravel_multi_index(tuple(neighbours[inside].T), shape)
            rows.append(positions[inside])
            cols.append(targets)
            data.append(-np.ones(len(targets)))

            if box.bc == BC_NEUMANN:
                diagonal[inside] += 1
            else:
                diagonal += 1

    rows.append(positions)
    cols.append(positions)
    data.append(diagonal)
    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    matrix = matrix.tocsr()  # sums duplicates, e.g. both neighbours coincide for periodic l = 2
    matrix.eliminate_zeros()
    return matrix


def discrete_laplacian(box):
    """The discrete Laplacian ``-Delta`` of the box with its boundary condition.

    Periodic boundary conditions wrap around. Dirichlet conditions keep the diagonal ``2d`` and drop couplings
    leaving the box. Neumann conditions give the graph Laplacian of the box, whose diagonal is the number of
    neighbours inside the box.

    :rtype: :py:class:`HamiltonianMatrix`
    """
    return HamiltonianMatrix(box, _laplacian(box).copy())


def alloy_potential(alpha, sample, box):
    """The random potential ``V(i) = sum_k omega_k alpha_(i-k)`` on the sites of the box.

    Coupling constants outside the box contribute through the offsets of ``alpha``. The potential never wraps
    around, whatever the boundary condition.

    :param  alpha: The :py:class:`~wegnerlab.conv_toeplitz.ConvolutionVector` (or any site potential).
    :param sample: A :py:class:`~wegnerlab.disorder.DisorderSample` containing every site of ``box - Gamma``.
    :raises SiteNotFound: If a needed coupling constant is missing from the sample.
    """
    coords = box.sites.coords
    potential = np.zeros(len(coords))
    for offset, value in alpha.items():
        positions = sample.site_index.positions(coords - np.array(offset))
        potential += value * sample.omega[positions]
    return potential


def assemble(box, v0, v_omega):
    """Assemble ``-Delta + V_0 + V_omega``.

    :param      v0: A :py:class:`PeriodicPotential` or ``None``.
    :param v_omega: The random potential in site order.
    :rtype: :py:class:`HamiltonianMatrix`
    """
    v_omega = np.asarray(v_omega, dtype=float)
    if v_omega.shape != (box.volume, ):
        raise ConfigurationError('Potential has shape %s, box has %s sites.' % (v_omega.shape, box.volume))

    diagonal = v_omega if v0 is None else v0.extend(box) + v_omega
    laplacian = _laplacian(box)
    if box.volume > DENSE_LIMIT:
        return HamiltonianMatrix(box, laplacian + sparse.diags(diagonal, format='csr'))

    matrix = laplacian.toarray()
    matrix[np.diag_indices_from(matrix)] += diagonal
    return HamiltonianMatrix(box, matrix)


def neumann_blocks(box, side):
    """Split the box into subcubes of side ``side`` along Neumann surfaces.

    Along every axis the last block is shorter if ``side`` does not divide ``l``.

    :return: A list of arrays of site positions, one per block.
    """
    if box.bc != BC_NEUMANN:
        raise ConfigurationError('Only Neumann boxes can be split into Neumann blocks.')
    if side < 1:
        raise ConfigurationError('Block side must be positive.')

    labels = box.sites.coords // side
    _unique, inverse = np.unique(labels, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    return [np.flatnonzero(inverse == b) for b in range(inverse.max() + 1)]


def decouple(hamiltonian, blocks):
    """Remove all couplings between blocks, keeping the graph Laplacian form inside every block.

    Each removed off-diagonal entry ``h_(i,n)`` is added to ``h_(i,i)``, so the kinetic term of every block is
    its own Neumann Laplacian.

    :rtype: :py:class:`HamiltonianMatrix`
    """
    n = hamiltonian.shape[0]
    labels = np.empty(n, dtype=np.int64)
    for b, positions in enumerate(blocks):
        labels[positions] = b

    coo = sparse.coo_matrix(hamiltonian.matrix)
    cross = (labels[coo.row] != labels[coo.col]) & (coo.row != coo.col)
    removed = np.bincount(coo.row[cross], weights=coo.data[cross], minlength=n)
    keep = ~cross
    matrix = sparse.coo_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=(n, n)).tocsr()
    matrix = matrix + sparse.diags(removed, format='csr')
    return HamiltonianMatrix(hamiltonian.geometry, matrix)
