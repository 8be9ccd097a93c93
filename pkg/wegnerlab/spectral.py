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

"""Spectra, counting functions and spectral projections of finite volume Hamiltonians."""

import logging

import numpy as np

from .base import QuadratureError
from .base import SolverBase
from .base import SolverError
from .base import TheoremViolation
from .reporting import write_csv
from .solvers import get_solver

log = logging.getLogger(__name__)

SPOT_CHECKS = 10
RESIDUAL_TOLERANCE = 1e-8
AVERAGING_TOLERANCE = 1e-4


def _solver(solver, hamiltonian=None):
    if isinstance(solver, SolverBase):
        return solver
    if solver is None:
        solver = 'sparse' if hamiltonian is not None and hamiltonian.is_sparse else 'default'
    return get_solver(solver)


class SpectrumResult(object):
    """The eigenvalues of one Hamiltonian in nondecreasing order, counted with multiplicity.

    :param eigenvalues: The sorted eigenvalues.
    :param  provenance: A dict identifying the instance, e.g. ``{'seed': 1, 'sample_id': 3}``.
    """

    def __init__(self, eigenvalues, provenance=None):
        eigenvalues = np.array(eigenvalues, dtype=float)
        eigenvalues.setflags(write=False)
        self.eigenvalues = eigenvalues
        self.provenance = provenance or {}

    def __len__(self):
        return len(self.eigenvalues)

    def __repr__(self):
        return '<SpectrumResult: %s eigenvalues in [%r, %r]>' % (
            len(self), self.eigenvalues[0], self.eigenvalues[-1])

    @property
    def sample_id(self):
        return self.provenance.get('sample_id')


def eigenvalues(hamiltonian, solver=None, provenance=None, check=True):
    """Compute the full spectrum of a Hamiltonian.

    :param     solver: A solver alias or instance. The default solver is used if not given.
    :param provenance: Attached to the result and to any :py:class:`~wegnerlab.base.SolverError`.
    :param      check: Verify ``|Hv - lambda v| <= 1e-8 |H|`` for ten eigenpairs spread over the spectrum.
    :rtype: :py:class:`SpectrumResult`
    """
    solver = _solver(solver or 'default')
    try:
        values, vectors = solver.eigh(hamiltonian.matrix, eigenvectors=check)
    except SolverError as e:
        raise SolverError(e.message, provenance)

    if not np.all(np.isfinite(values)):
        raise SolverError('Solver returned non-finite eigenvalues.', provenance)

    if check:
        norm = hamiltonian.norm_bound()
        picks = np.unique(np.linspace(0, len(values) - 1, SPOT_CHECKS).astype(int))
        for i in picks:
            vector = vectors[:, i]
            residual = np.linalg.norm(hamiltonian.matrix.dot(vector) - values[i] * vector)
            if residual > RESIDUAL_TOLERANCE * norm:
                raise SolverError('Residual %g of eigenpair %s exceeds %g.' % (
                    residual, i, RESIDUAL_TOLERANCE * norm), provenance)

    return SpectrumResult(np.sort(values), provenance)


def counting_function(spectrum, energy):
    """The normalized counting function ``#{i : lambda_i < E} / l^d``.

    >>> counting_function(SpectrumResult([0.0, 2.0, 2.0, 4.0]), 3.0)
    0.75
    """
    count = np.searchsorted(spectrum.eigenvalues, energy, side='left')
    return float(count) / len(spectrum)


def trace_projection(spectrum, interval):
    """Number of eigenvalues in the closed interval, counted with multiplicity.

    :param interval: A tuple ``(lower, upper)``, e.g. ``(E - eps, E)``.
    """
    lower, upper = interval
    if upper < lower:
        return 0
    values = spectrum.eigenvalues
    return int(np.searchsorted(values, upper, side='right') - np.searchsorted(values, lower, side='left'))


def eigenpairs(hamiltonian, solver=None):
    """All eigenvalues and orthonormal eigenvectors (as columns)."""
    return _solver(solver or 'default').eigh(hamiltonian.matrix, eigenvectors=True)


def site_diagonal_projection(hamiltonian, interval, j, pairs=None):
    """The diagonal element ``<delta_j, P(I) delta_j>`` of the spectral projection.

    :param    j: Position of the site in the box enumeration.
    :param pairs: Precomputed result of :py:func:`eigenpairs`, to reuse it for many sites.
    """
    values, vectors = eigenpairs(hamiltonian) if pairs is None else pairs
    lower, upper = interval
    inside = (values >= lower) & (values <= upper)
    return float(np.sum(vectors[j, inside] ** 2))


def ground_state_energy(hamiltonian, solver=None, provenance=None):
    """The smallest eigenvalue.

    Sparse Hamiltonians are handled by the ``sparse`` solver unless ``solver`` says otherwise.
    """
    try:
        value, _vector = _solver(solver, hamiltonian).ground_state(hamiltonian.matrix)
    except SolverError as e:
        raise SolverError(e.message, provenance)
    return value


def weyl_shift_bound(hamiltonian, j, t, solver=None):
    """The largest eigenvalue displacement caused by adding ``t`` to the diagonal at site ``j``.

    It never exceeds ``|t|``.
    """
    solver = _solver(solver or 'default')
    before = solver.eigvalsh(hamiltonian.matrix)
    after = solver.eigvalsh(hamiltonian.with_site_shift(j, t).matrix)
    return float(np.max(np.abs(after - before)))


def crossing_couplings(hamiltonian, j, energies, pairs=None):
    """Couplings ``t`` at which an energy becomes an eigenvalue of ``H + t |delta_j><delta_j|``.

    For each energy ``e`` outside the spectrum of ``H`` this is ``-1 / G_jj(e)`` with ``G = (H - e)^-1``. An
    energy that already is an eigenvalue with an eigenvector not vanishing at ``j`` is crossed at ``t = 0``.
    Energies that are never crossed are skipped.
    """
    values, vectors = eigenpairs(hamiltonian) if pairs is None else pairs
    weights = vectors[j, :] ** 2
    scale = max(1.0, float(np.max(np.abs(values))))

    couplings = []
    for energy in energies:
        distance = values - energy
        resonant = np.abs(distance) <= 1e-13 * scale
        if np.any(resonant & (weights > 1e-24)):
            couplings.append(0.0)
            continue

        green = np.sum(weights[~resonant] / distance[~resonant])
        if green != 0:
            couplings.append(-1.0 / green)
    return couplings


def _gauss_panel(func, lower, upper, points, cap):
    previous = None
    while points <= cap:
        nodes, weights = np.polynomial.legendre.leggauss(points)
        half = (upper - lower) / 2
        middle = (upper + lower) / 2
        value = half * sum(w * func(middle + half * x) for x, w in zip(nodes, weights))
        if previous is not None and abs(value - previous) <= 1e-10 * max(1.0, abs(value)):
            return value
        previous = value
        points *= 2
    raise QuadratureError('No convergence on [%r, %r] with %s points.' % (lower, upper, cap))


def spectral_averaging_check(hamiltonian, j, interval, density, quadrature_points=8, cap=1024,
                             tolerance=AVERAGING_TOLERANCE):
    """Check the spectral averaging bound for the rank one family ``H(t) = H_0 + t |delta_j><delta_j|``.

    The left hand side ``int f(t) <delta_j, P_H(t)(I) delta_j> dt`` is integrated panel by panel between the
    couplings where an endpoint of ``I`` is crossed and the breakpoints of ``f``, with Gauss-Legendre rules
    refined until two successive estimates agree.

    :param quadrature_points: Initial number of nodes per panel.
    :param               cap: Maximum number of nodes per panel.
    :return: The tuple ``(lhs, bound)`` with ``bound = |I| |f|_inf``.
    :raises QuadratureError: If a panel does not converge within ``cap`` nodes.
    :raises TheoremViolation: If ``lhs > bound + tolerance``.
    """
    lower, upper = interval
    support_lower, support_upper = density.support()

    cuts = set(float(b) for b in density.breakpoints())
    for t in crossing_couplings(hamiltonian, j, interval):
        if support_lower < t < support_upper:
            cuts.add(t)
    cuts = sorted(cuts)

    dense = hamiltonian.toarray()

    def integrand(t):
        matrix = dense.copy()
        matrix[j, j] += t
        values, vectors = np.linalg.eigh(matrix)
        inside = (values >= lower) & (values <= upper)
        return float(density.pdf(t)) * float(np.sum(vectors[j, inside] ** 2))

    lhs = 0.0
    for left, right in zip(cuts[:-1], cuts[1:]):
        if right > left:
            lhs += _gauss_panel(integrand, left, right, quadrature_points, cap)

    bound = (upper - lower) * density.sup_norm()
    log.debug('spectral averaging at site %s: lhs=%r, bound=%r', j, lhs, bound)
    if lhs > bound + tolerance:
        raise TheoremViolation('Spectral averaging integral %r exceeds %r.' % (lhs, bound))
    return lhs, bound


def write_spectra(stream, spectra, config_hash=None):
    """Export spectra as CSV with the columns ``sample_id, index, eigenvalue, config_hash``."""
    rows = ((s.sample_id, i, value, config_hash) for s in spectra for i, value in enumerate(s.eigenvalues))
    return write_csv(stream, ('sample_id', 'index', 'eigenvalue', 'config_hash'), rows)
