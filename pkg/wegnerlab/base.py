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

"""Common code for eigensolver backends and the exceptions used throughout wegnerlab."""

import logging
from importlib import import_module

import numpy as np

log = logging.getLogger(__name__)


class WegnerLabError(Exception):
    """All wegnerlab exceptions are a subclass of this exception."""
    pass


class ConfigurationError(WegnerLabError):
    """Raised when an input or a configuration file violates an invariant.

    :param message: What is wrong.
    :param    path: The dotted JSON path of the offending value, if known.
    """

    def __init__(self, message, path=None):
        super(ConfigurationError, self).__init__(message)
        self.message = message
        self.path = path

    def __str__(self):
        if self.path:
            return '%s: %s' % (self.path, self.message)
        return self.message


class InvalidSolverError(WegnerLabError):
    """Raised when a solver alias is unknown or its class cannot be imported."""
    pass


class NotSupportedError(WegnerLabError):
    """Raised when a solver backend does not support a specific operation.

    This may only happen for some inputs, e.g. full spectra of matrices that are too large for the backend.
    """
    pass


class NotApplicableError(WegnerLabError):
    """Raised when an operation has no meaning for the given input."""
    pass


class NotCertifiableError(WegnerLabError):
    """Raised when the Neumann series certificate for a Toeplitz inverse cannot be given."""
    pass


class SingularTruncationError(WegnerLabError):
    """Raised when a truncated Toeplitz matrix is singular or too ill-conditioned to invert."""
    pass


class IndexMismatchError(WegnerLabError):
    """Raised when two objects are indexed by different site enumerations."""
    pass


class QuadratureError(WegnerLabError):
    """Raised when adaptive quadrature does not converge within its refinement cap."""
    pass


class NonPositiveMeanError(WegnerLabError):
    """Raised when the ground-state weighted mean of the single site potential is not positive."""
    pass


class TheoremViolation(WegnerLabError):
    """Raised when a proven bound is violated beyond the statistical allowance."""
    pass


class SiteNotFound(WegnerLabError):
    """Raised when a lattice site is not part of a site enumeration."""

    def __init__(self, site):
        self.site = tuple(int(c) for c in site)

    def __str__(self):
        return '(%s)' % ', '.join(str(c) for c in self.site)


class SolverError(WegnerLabError):
    """Raised when an eigensolver fails.

    :param    message: What went wrong.
    :param provenance: A dict identifying the instance, e.g. ``{'seed': 1, 'sample_id': 3}``.
    """

    def __init__(self, message, provenance=None):
        super(SolverError, self).__init__(message)
        self.message = message
        self.provenance = provenance or {}

    def __str__(self):
        if not self.provenance:
            return self.message
        details = ', '.join('%s=%s' % (k, self.provenance[k]) for k in sorted(self.provenance))
        return '%s (%s)' % (self.message, details)


class DecayUnresolvedError(WegnerLabError):
    """Raised when tail probabilities decay too fast to be resolved by the sample count.

    :param floor: The detection floor ``1/M`` of the experiment.
    """

    def __init__(self, message, floor):
        super(DecayUnresolvedError, self).__init__(message)
        self.message = message
        self.floor = floor

    def __str__(self):
        return '%s (detection floor %g)' % (self.message, self.floor)


class SolverBase(object):
    """Base class for all eigensolver backends.

    Every backend works on real symmetric matrices given either as a :py:class:`numpy.ndarray` or as a
    :py:mod:`scipy.sparse` matrix and returns eigenvalues in ascending order.
    """

    library = None
    """Import path of the numerical library used by the backend.

    Set this attribute to an import path and you will be able to access the module as ``self.module``. This
    way the library is only imported when a backend actually solves something.
    """
    _module = None

    @property
    def module(self):
        """The module specified by the ``library`` attribute."""

        if self._module is None:
            if self.library is None:
                raise ValueError("Solver '%s' doesn't specify a library attribute" % self.__class__)

            try:
                if '.' in self.library:
                    mod_path, attr = self.library.rsplit('.', 1)
                    try:
                        self._module = import_module(self.library)
                    except ImportError:
                        self._module = getattr(import_module(mod_path), attr)
                else:
                    self._module = import_module(self.library)
            except (AttributeError, ImportError):
                raise ValueError("Couldn't load %s solver library" % self.library)

        return self._module

    def as_dense(self, matrix):
        """Helper function returning ``matrix`` as a dense float array."""

        if hasattr(matrix, 'toarray'):
            return matrix.toarray()
        return np.asarray(matrix, dtype=float)

    def eigh(self, matrix, eigenvectors=False):
        """Compute the full spectrum of a symmetric matrix.

        :param       matrix: The matrix to diagonalize.
        :param eigenvectors: Also return orthonormal eigenvectors (as columns).
        :return: A tuple of the ascending eigenvalues and the eigenvectors (or ``None``).
        :rtype: tuple
        """
        raise NotImplementedError

    def eigvalsh(self, matrix):
        """Compute all eigenvalues of a symmetric matrix in ascending order.

        :param matrix: The matrix to diagonalize.
        :rtype: :py:class:`numpy.ndarray`
        """
        raise NotImplementedError

    def ground_state(self, matrix):
        """Compute the smallest eigenvalue and a normalized eigenvector.

        :param matrix: The matrix of interest.
        :return: A tuple ``(lambda_1, vector)``.
        :rtype: tuple
        """
        raise NotImplementedError
