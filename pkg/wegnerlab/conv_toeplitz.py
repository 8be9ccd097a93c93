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

"""Convolution vectors, truncated Toeplitz matrices and their inverses.

A single site potential on the lattice is given by a finitely supported vector of coefficients ``alpha_k``.
Restricted to a finite box, the map from coupling constants to the potential is a truncated Toeplitz matrix
``A`` with entries ``alpha_(j-k)``, indexed by the extended site set ``Lambda+ = box - Gamma``.

>>> alpha = ConvolutionVector({(0, ): 1.0, (1, ): -0.4})
>>> alpha_star(alpha)
0.4
>>> neumann_inverse_bound(alpha)
1.6666666666666667
"""

import logging
import math
import warnings

import numpy as np
from scipy import linalg

from .base import ConfigurationError
from .base import IndexMismatchError
from .base import NotCertifiableError
from .base import SingularTruncationError
from .base import SiteNotFound
from .base import TheoremViolation

log = logging.getLogger(__name__)


def _as_offset(key, d=None):
    if isinstance(key, (int, np.integer)):
        key = (key, )
    try:
        offset = tuple(int(c) for c in key)
        if any(int(c) != c for c in key):
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigurationError('Offsets must be integer coordinates, got %r.' % (key, ))
    if d is not None and len(offset) != d:
        raise ConfigurationError('Offset %r does not have dimension %s.' % (offset, d))
    return offset


class SitePotential(object):
    """A finitely supported real function on the lattice ``Z^d``.

    Entries that are explicitly zero are kept in the support.

    :param entries: A dict mapping offsets (tuples of ints, or ints for ``d = 1``) to coefficients, or an
                    iterable of ``(offset, coefficient)`` pairs.
    :param       d: The dimension. Inferred from the offsets if not given.
    """

    def __init__(self, entries, d=None):
        if isinstance(entries, dict):
            entries = entries.items()

        coefficients = {}
        for key, value in entries:
            offset = _as_offset(key, d)
            if d is None:
                d = len(offset)
            if offset in coefficients:
                raise ConfigurationError('Duplicate offset %r.' % (offset, ))

            value = float(value)
            if not math.isfinite(value):
                raise ConfigurationError('Coefficient at %r is not finite.' % (offset, ))
            coefficients[offset] = value

        if not coefficients:
            raise ConfigurationError('A site potential needs at least one entry.')
        if d < 1:
            raise ConfigurationError('Dimension must be positive.')

        self.d = d
        self._entries = tuple(sorted(coefficients.items()))
        self._coefficients = coefficients

    @property
    def support(self):
        """The support ``Gamma`` as a tuple of offsets in lexicographic order."""
        return tuple(k for k, _v in self._entries)

    @property
    def offsets(self):
        """The support as an integer array of shape ``(|Gamma|, d)``."""
        return np.array(self.support, dtype=np.int64).reshape(-1, self.d)

    @property
    def coefficients(self):
        return np.array([v for _k, v in self._entries])

    def items(self):
        return iter(self._entries)

    def __getitem__(self, offset):
        return self._coefficients.get(_as_offset(offset, self.d), 0.0)

    def __contains__(self, offset):
        return _as_offset(offset, self.d) in self._coefficients

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return type(self) is type(other) and self.d == other.d and self._entries == other._entries

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.d, self._entries))

    def __repr__(self):
        entries = ', '.join('%s: %r' % (k, v) for k, v in self._entries)
        return '<%s: {%s}>' % (self.__class__.__name__, entries)

    def total(self):
        """Sum of all coefficients."""
        return math.fsum(v for _k, v in self._entries)

    def max_coefficient(self):
        return max(v for _k, v in self._entries)

    def is_nonnegative(self):
        return all(v >= 0 for _k, v in self._entries)

    def scaled(self, factor):
        """A copy with every coefficient multiplied by ``factor``."""
        return self.__class__([(k, v * factor) for k, v in self._entries], d=self.d)

    def to_json(self):
        return {
            'd': self.d,
            'entries': [{'k': list(k), 'alpha': v} for k, v in self._entries],
        }

    @classmethod
    def from_json(cls, data, path='alpha'):
        """Load an instance from its JSON representation.

        :param data: The parsed JSON, ``{"d": int, "entries": [{"k": [ints], "alpha": float}]}``.
        :param path: Dotted path of ``data`` in the enclosing document, used in error messages.
        """
        if not isinstance(data, dict):
            raise ConfigurationError('must be an object with "d" and "entries".', path=path)
        try:
            d = int(data['d'])
            entries = [(entry['k'], entry['alpha']) for entry in data['entries']]
        except KeyError as e:
            raise ConfigurationError('missing key %s.' % e, path=path)
        except (TypeError, ValueError) as e:
            raise ConfigurationError('malformed entries: %s' % e, path=path)

        try:
            return cls(entries, d=d)
        except ConfigurationError as e:
            raise ConfigurationError(e.message, path=path)


class ConvolutionVector(SitePotential):
    """A convolution vector ``alpha``: a site potential whose coefficient ``alpha_0`` is present and nonzero.

    >>> ConvolutionVector({0: 2.0, 1: -1.0})
    <ConvolutionVector: {(0,): 2.0, (1,): -1.0}>
    """

    def __init__(self, entries, d=None):
        super(ConvolutionVector, self).__init__(entries, d=d)
        if self[(0, ) * self.d] == 0:
            raise ConfigurationError('alpha_0 must be present and nonzero.')

    @property
    def alpha0(self):
        return self[(0, ) * self.d]


def step_vector(d=1):
    """The convolution vector ``delta_0 - delta_e`` with ``e`` the first unit vector."""
    e = (1, ) + (0, ) * (d - 1)
    return ConvolutionVector({(0, ) * d: 1.0, e: -1.0}, d=d)


def quadrupole_vector(d=2):
    """The convolution vector ``delta_(0,0) + delta_(1,1) - delta_(1,0) - delta_(0,1)``, padded to ``d``."""
    if d < 2:
        raise ConfigurationError('The quadrupole vector needs d >= 2.')
    pad = (0, ) * (d - 2)
    return ConvolutionVector({
        (0, 0) + pad: 1.0,
        (1, 1) + pad: 1.0,
        (1, 0) + pad: -1.0,
        (0, 1) + pad: -1.0,
    }, d=d)


def alpha_star(alpha):
    """Sum of the absolute values of all coefficients off the origin."""
    origin = (0, ) * alpha.d
    return math.fsum(abs(v) for k, v in alpha.items() if k != origin)


def normalize(alpha):
    """Rescale ``alpha`` so that ``alpha_0 = 1``.

    >>> normalize(ConvolutionVector({0: -0.5, 1: 0.25}))
    (<ConvolutionVector: {(0,): 1.0, (1,): -0.5}>, -0.5)

    :return: The normalized vector and the scale ``alpha_0``.
    """
    scale = alpha[(0, ) * alpha.d]
    if scale == 0:
        raise ConfigurationError('Cannot normalize a vector with alpha_0 = 0.')
    return ConvolutionVector([(k, v / scale) for k, v in alpha.items()], d=alpha.d), scale


def diameter(gamma):
    """The sup-norm diameter ``g`` of an offset set (or of the support of a site potential)."""
    offsets = gamma.offsets if isinstance(gamma, SitePotential) else np.array(gamma, dtype=np.int64)
    if offsets.size == 0:
        return 0
    offsets = offsets.reshape(len(offsets), -1)
    return int(np.max(offsets.max(axis=0) - offsets.min(axis=0)))


class SiteIndex(object):
    """An immutable, lexicographically ordered enumeration of lattice sites.

    :param coords: Integer array of shape ``(n, d)``. Duplicates are removed.
    """

    def __init__(self, coords):
        coords = np.asarray(coords, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise ConfigurationError('A site index needs a nonempty (n, d) coordinate array.')

        coords = np.unique(coords, axis=0)
        coords.setflags(write=False)
        self.coords = coords
        self.d = coords.shape[1]

        # dense lookup table over the bounding box
        self._origin = coords.min(axis=0)
        self._shape = tuple(coords.max(axis=0) - self._origin + 1)
        table = np.full(self._shape, -1, dtype=np.int64)
        table[tuple((coords - self._origin).T)] = np.arange(len(coords))
        self._table = table

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return (tuple(int(c) for c in row) for row in self.coords)

    def __eq__(self, other):
        return isinstance(other, SiteIndex) and np.array_equal(self.coords, other.coords)

    def __ne__(self, other):
        return not self == other

    def __contains__(self, site):
        return self.lookup(np.array([site]))[0] >= 0

    def __repr__(self):
        return '<SiteIndex: %s sites in d=%s>' % (len(self), self.d)

    def is_product(self):
        """``True`` if the sites form a product of integer intervals."""
        return len(self) == int(np.prod(self._shape))

    def lookup(self, coords):
        """Positions of many sites at once, ``-1`` for sites not in the index.

        :param coords: Integer array of shape ``(m, d)``.
        """
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.d)
        shifted = coords - self._origin
        inside = np.all((shifted >= 0) & (shifted < np.array(self._shape)), axis=1)
        positions = np.full(len(coords), -1, dtype=np.int64)
        positions[inside] = self._table[tuple(shifted[inside].T)]
        return positions

    def position(self, site):
        """Position of ``site`` in the enumeration.

        :raises SiteNotFound: If the site is not part of the index.
        """
        site = _as_offset(site, self.d)
        position = self.lookup(np.array([site]))[0]
        if position < 0:
            raise SiteNotFound(site)
        return int(position)

    def positions(self, coords):
        """Like :py:meth:`position`, but for an array of sites."""
        positions = self.lookup(coords)
        missing = np.flatnonzero(positions < 0)
        if len(missing):
            raise SiteNotFound(np.asarray(coords).reshape(-1, self.d)[missing[0]])
        return positions


def box_sites(d, l):
    """The sites ``{0, ..., l-1}^d`` in lexicographic order."""
    grid = np.indices((l, ) * d).reshape(d, -1).T
    return SiteIndex(grid)


def extended_sites(box, gamma):
    """The extended site set ``Lambda+ = {lambda - gamma}`` of a box.

    :param   box: A :py:class:`~wegnerlab.hamiltonian.BoxGeometry` or a :py:class:`SiteIndex`.
    :param gamma: A :py:class:`SitePotential` or an iterable of offsets.
    :rtype: :py:class:`SiteIndex`
    """
    sites = box if isinstance(box, SiteIndex) else box.sites
    offsets = gamma.offsets if isinstance(gamma, SitePotential) else np.array(gamma, dtype=np.int64)
    offsets = offsets.reshape(-1, sites.d)
    coords = sites.coords[:, np.newaxis, :] - offsets[np.newaxis, :, :]
    return SiteIndex(coords.reshape(-1, sites.d))


class TruncatedToeplitz(object):
    """The matrix ``{alpha_(j-k)}`` indexed by an extended site set.

    :param      alpha: The convolution vector.
    :param site_index: The :py:class:`SiteIndex` of ``Lambda+``.
    :param     matrix: The dense matrix.
    """

    def __init__(self, alpha, site_index, matrix):
        self.alpha = alpha
        self.site_index = site_index
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def size(self):
        return len(self.site_index)

    def __repr__(self):
        return '<TruncatedToeplitz: %sx%s>' % (self.size, self.size)


def truncation_from_sites(alpha, sites, dtype=float):
    """Build the truncated Toeplitz matrix of ``alpha`` on an explicit site set.

    :param dtype: Matrix dtype. Pass an integer dtype for exact arithmetic with integer coefficients.
    """
    if alpha.d != sites.d:
        raise IndexMismatchError('alpha has dimension %s but sites have dimension %s.' % (alpha.d, sites.d))

    n = len(sites)
    matrix = np.zeros((n, n), dtype=dtype)
    columns = np.arange(n)
    for offset, value in alpha.items():
        if np.issubdtype(matrix.dtype, np.integer) and value != int(value):
            raise ConfigurationError('Coefficient %r at %s is not an integer.' % (value, offset))

        rows = sites.lookup(sites.coords + np.array(offset))
        inside = rows >= 0
        matrix[rows[inside], columns[inside]] = value
    return TruncatedToeplitz(alpha, sites, matrix)


def build_truncation(alpha, box, dtype=float):
    """Build ``A_Lambda`` for a box, indexed by ``extended_sites(box, alpha)``."""
    return truncation_from_sites(alpha, extended_sites(box, alpha), dtype=dtype)


def row_sum_norm(matrix):
    """The maximum over rows of the sum of absolute values of the entries."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def neumann_inverse_bound(alpha):
    """Upper bound ``1 / (|alpha_0| - alpha*)`` on the row-sum norm of every truncated inverse.

    For normalized vectors this is ``1 / (1 - alpha*)``.

    :raises NotCertifiableError: If ``alpha* >= |alpha_0|``.
    """
    a0 = abs(alpha[(0, ) * alpha.d])
    star = alpha_star(alpha)
    if star >= a0:
        raise NotCertifiableError('alpha* = %r is not below |alpha_0| = %r.' % (star, a0))
    return 1.0 / (a0 - star)


def _lu(truncation):
    with warnings.catch_warnings():
        warnings.simplefilter('error', linalg.LinAlgWarning)
        try:
            return linalg.lu_factor(np.asarray(truncation.matrix, dtype=float))
        except (linalg.LinAlgWarning, linalg.LinAlgError, ValueError) as e:
            raise SingularTruncationError('Truncation of size %s is singular: %s' % (truncation.size, e))


def invert_truncation(truncation):
    """Invert a truncated Toeplitz matrix by LU factorization with partial pivoting.

    :raises SingularTruncationError: If the matrix is singular or the inverse fails the residual check.
    :raises        TheoremViolation: If a certified inverse exceeds the Neumann series bound.
    :rtype: :py:class:`numpy.ndarray`
    """
    n = truncation.size
    lu = _lu(truncation)
    identity = np.eye(n)
    inverse = linalg.lu_solve(lu, identity)

    residual = np.max(np.abs(truncation.matrix.dot(inverse) - identity)) if n else 0.0
    if not np.isfinite(residual) or residual > 1e-10 * n:
        raise SingularTruncationError('Inverse residual %g exceeds %g.' % (residual, 1e-10 * n))

    try:
        bound = neumann_inverse_bound(truncation.alpha)
    except NotCertifiableError:
        pass
    else:
        norm = row_sum_norm(inverse)
        if norm > bound * (1 + 1e-8):
            raise TheoremViolation('Inverse norm %r exceeds the Neumann series bound %r.' % (norm, bound))
    return inverse


def truncation_determinant(truncation):
    """``det A_Lambda`` from the product of the LU pivots."""
    lu, piv = _lu(truncation)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    diagonal = np.diag(lu)
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(diagonal))


def closed_form_step_inverse(box):
    """The exact inverse of the truncation of ``delta_0 - delta_e``.

    Entry ``(j, k)`` is one if ``k_1 <= j_1`` and ``k_i = j_i`` for all other coordinates, zero otherwise.

    :param box: A :py:class:`~wegnerlab.hamiltonian.BoxGeometry` (the extended sites of the step vector are
                used) or a :py:class:`SiteIndex` giving ``Lambda+`` directly.
    :rtype: integer :py:class:`numpy.ndarray`
    """
    if isinstance(box, SiteIndex):
        sites = box
    else:
        sites = extended_sites(box, step_vector(box.d))

    if not sites.is_product():
        raise ConfigurationError('Extended sites do not form a product of intervals.')

    coords = sites.coords
    same_rest = np.all(coords[:, np.newaxis, 1:] == coords[np.newaxis, :, 1:], axis=2)
    lower = coords[np.newaxis, :, 0] <= coords[:, np.newaxis, 0]
    return (same_rest & lower).astype(np.int64)


def column_abs_sum(matrix, j, sites=None):
    """Sum of absolute values in the column of site ``j``.

    :param    j: A column position, or a site if ``sites`` is given.
    :param sites: The :py:class:`SiteIndex` of the columns.
    """
    if sites is not None:
        j = sites.position(j)
    matrix = np.asarray(matrix)
    if not 0 <= j < matrix.shape[1]:
        raise SiteNotFound((j, ))
    return float(np.sum(np.abs(matrix[:, j])))


def column_sum_profile(matrix, sites, box):
    """Column sums ``sum_k |b_(k,j)|`` for every site ``j`` of the box, in box order.

    :param  sites: The :py:class:`SiteIndex` of the columns of ``matrix``.
    :param    box: The :py:class:`SiteIndex` of the box, a subset of ``sites``.
    """
    positions = sites.positions(box.coords)
    return np.sum(np.abs(np.asarray(matrix)), axis=0)[positions]


class GrowthTable(object):
    """Result of :py:func:`norm_growth_probe`.

    :param        rows: List of ``(l, |Lambda+|, norm)`` tuples.
    :param  slope_size: Least squares slope of ``log norm`` against ``log |Lambda+|``.
    :param  slope_side: Least squares slope of ``log norm`` against ``log l``.
    """

    def __init__(self, rows, slope_size, slope_side):
        self.rows = rows
        self.slope_size = slope_size
        self.slope_side = slope_side

    def __iter__(self):
        return iter(self.rows)


def _slope(x, y):
    if len(set(x)) < 2:
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def norm_growth_probe(alpha, sides, d=None):
    """Tabulate the row-sum norm of truncated inverses for boxes of increasing side.

    The fitted exponents are purely diagnostic.

    :param sides: An iterable of side lengths.
    :param     d: The box dimension, defaults to the dimension of ``alpha``.
    :rtype: :py:class:`GrowthTable`
    """
    d = alpha.d if d is None else d
    rows = []
    for side in sides:
        truncation = build_truncation(alpha, box_sites(d, side))
        norm = row_sum_norm(invert_truncation(truncation))
        log.debug('side %s: |Lambda+| = %s, |B| = %r', side, truncation.size, norm)
        rows.append((side, truncation.size, norm))

    slope_size = _slope([r[1] for r in rows], [r[2] for r in rows])
    slope_side = _slope([r[0] for r in rows], [r[2] for r in rows])
    return GrowthTable(rows, slope_size, slope_side)
