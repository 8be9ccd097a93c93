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

"""Monte Carlo verification of Wegner estimates and of the Lipschitz continuity of the IDS.

All experiments of a configuration share one set of disorder samples per box side: sample ``i`` of side ``l``
is determined by ``(seed, i)`` alone, and its spectrum is computed once and reused for every energy and
interval length.
"""

import logging
import math
import time

import numpy as np

from . import pool
from .base import ConfigurationError
from .base import NotApplicableError
from .config import config_hash
from .constants import BC_PERIODIC
from .constants import BOUNDARY_CONDITIONS
from .constants import CONSTANT_MODES
from .constants import DENSITY_UNIFORM
from .constants import MIN_GRID_SPACING
from .constants import MIN_SAMPLES
from .constants import MODE_CERTIFIED
from .constants import MODE_COLUMN_SUM
from .constants import MODE_UNIFORM_DENSITY
from .constants import MODE_VOLUME_FACTOR
from .constants import Z_UCL99
from .conv_toeplitz import ConvolutionVector
from .conv_toeplitz import alpha_star
from .conv_toeplitz import build_truncation
from .conv_toeplitz import column_sum_profile
from .conv_toeplitz import extended_sites
from .conv_toeplitz import invert_truncation
from .conv_toeplitz import neumann_inverse_bound
from .disorder import density_from_json
from .disorder import sample_omega
from .hamiltonian import BoxGeometry
from .hamiltonian import PeriodicPotential
from .hamiltonian import alloy_potential
from .hamiltonian import assemble
from .spectral import counting_function
from .spectral import eigenvalues
from .spectral import trace_projection

log = logging.getLogger(__name__)

# Placeholder for the heat kernel constant of the continuum reduction. It is only used to report the
# continuum form of the constant next to the discrete one, never to decide a verdict.
CONTINUUM_CV = 1.0


def _number_list(data, key, path, default=None, cast=float):
    value = data.get(key, default)
    if value is None:
        return None
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return [cast(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigurationError('must be a list of numbers.', path='%s.%s' % (path, key) if path else key)


class ModelSpec(object):
    """The random operator ``-Delta + V_0 + sum_k omega_k alpha(. - k)``.

    :param   alpha: The :py:class:`~wegnerlab.conv_toeplitz.ConvolutionVector`.
    :param density: The :py:class:`~wegnerlab.disorder.DensityModel` of the coupling constants.
    :param      v0: The :py:class:`~wegnerlab.hamiltonian.PeriodicPotential`, zero if not given.
    :param      bc: The boundary condition of the finite volume operators.
    """

    def __init__(self, alpha, density, v0=None, bc=BC_PERIODIC):
        self.alpha = alpha
        self.density = density
        self.v0 = PeriodicPotential.zero(alpha.d) if v0 is None else v0
        self.bc = bc

    @property
    def d(self):
        return self.alpha.d

    def box(self, side):
        return BoxGeometry(self.d, side, self.bc)

    def scaled(self, factor):
        """The same operators, with ``alpha`` scaled by ``factor`` and the couplings by ``1/factor``."""
        return ModelSpec(self.alpha.scaled(factor), self.density.scaled(1.0 / factor), self.v0, self.bc)

    @classmethod
    def from_dict(cls, data, path='model'):
        if not isinstance(data, dict):
            raise ConfigurationError('must be an object.', path=path)
        if 'alpha' not in data:
            raise ConfigurationError('missing key alpha.', path=path)
        if 'density' not in data:
            raise ConfigurationError('missing key density.', path=path)

        alpha = ConvolutionVector.from_json(data['alpha'], path='%s.alpha' % path)
        d = data.get('d', alpha.d)
        if d != alpha.d:
            raise ConfigurationError('d = %s but alpha has dimension %s.' % (d, alpha.d), path='%s.d' % path)
        if d not in (1, 2, 3):
            raise ConfigurationError('must be 1, 2 or 3.', path='%s.d' % path)

        bc = data.get('bc', BC_PERIODIC)
        if bc not in BOUNDARY_CONDITIONS:
            raise ConfigurationError('unknown boundary condition %r.' % (bc, ), path='%s.bc' % path)

        density = density_from_json(data['density'], path='%s.density' % path)
        v0 = PeriodicPotential.from_json(data.get('v0'), d, path='%s.v0' % path)
        return cls(alpha, density, v0=v0, bc=bc)


class WegnerConfig(object):
    """Configuration of the Wegner estimate experiments.

    :param       model: The :py:class:`ModelSpec`.
    :param    energies: The energies ``E`` (upper interval ends).
    :param   epsilons: Interval lengths.
    :param       sides: Box sides ``l``.
    :param     samples: Number ``M`` of disorder samples per side.
    :param        seed: The 64 bit seed.
    :param constant_mode: One of ``certified``, ``volume_factor``, ``uniform_density`` or ``column_sum``.
    :param         raw: The parsed configuration document, used for hashing.
    """

    def __init__(self, model, energies=None, epsilons=None, sides=None, samples=1000, seed=0,
                 constant_mode=MODE_CERTIFIED, ids=None, dos=None, h2=None, solver='default', raw=None):
        self.model = model
        self.energies = list(energies or [])
        self.epsilons = list(epsilons or [])
        self.sides = list(sides or [])
        self.samples = samples
        self.seed = seed
        self.constant_mode = constant_mode
        self.ids = ids or {}
        self.dos = dos or {}
        self.h2 = h2 or {}
        self.solver = solver
        self.raw = raw
        self.validate()

    def validate(self):
        """Check the invariants of the configuration.

        :raises ConfigurationError: Naming the violated invariant and its path.
        """
        if self.constant_mode not in CONSTANT_MODES:
            raise ConfigurationError('unknown mode %r (one of %s).' % (
                self.constant_mode, ', '.join(CONSTANT_MODES)), path='constant_mode')
        if self.constant_mode == MODE_CERTIFIED:
            star = alpha_star(self.model.alpha)
            if star >= abs(self.model.alpha.alpha0):
                raise ConfigurationError(
                    'certified mode requires alpha* < |alpha_0| (alpha* = %r, |alpha_0| = %r).' % (
                        star, abs(self.model.alpha.alpha0)), path='constant_mode')
        if self.constant_mode == MODE_UNIFORM_DENSITY and self.model.density.kind != DENSITY_UNIFORM:
            raise ConfigurationError('uniform_density mode requires a uniform density.', path='constant_mode')
        if self.constant_mode != MODE_UNIFORM_DENSITY and self.model.density.kind == DENSITY_UNIFORM:
            raise ConfigurationError('%s mode requires a W11 density.' % self.constant_mode,
                                     path='constant_mode')

        if int(self.samples) != self.samples or self.samples < MIN_SAMPLES:
            raise ConfigurationError('at least %s samples are required.' % MIN_SAMPLES, path='samples')
        if any(eps < 0 or not math.isfinite(eps) for eps in self.epsilons):
            raise ConfigurationError('interval lengths must be finite and nonnegative.', path='epsilons')
        if any(not math.isfinite(e) for e in self.energies):
            raise ConfigurationError('energies must be finite.', path='energies')
        if any(side < 1 for side in self.sides):
            raise ConfigurationError('box sides must be positive.', path='sides')
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError('seed must be an unsigned 64 bit integer.', path='seed')

    def require(self, *keys):
        for key in keys:
            if not getattr(self, key):
                raise ConfigurationError('is required for this experiment.', path=key)

    @property
    def config_hash(self):
        return config_hash(self.raw if self.raw is not None else {})

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigurationError('configuration must be an object.')
        model = ModelSpec.from_dict(data.get('model'), path='model')

        try:
            samples = int(data.get('samples', 1000))
            seed = int(data.get('seed', 0))
        except (TypeError, ValueError) as e:
            raise ConfigurationError('samples and seed must be integers: %s' % e)

        for section in ('ids', 'dos', 'h2'):
            if not isinstance(data.get(section, {}), dict):
                raise ConfigurationError('must be an object.', path=section)

        return cls(
            model,
            energies=_number_list(data, 'energies', None),
            epsilons=_number_list(data, 'epsilons', None),
            sides=_number_list(data, 'sides', None, cast=int),
            samples=samples,
            seed=seed,
            constant_mode=data.get('constant_mode', MODE_CERTIFIED),
            ids=data.get('ids'),
            dos=data.get('dos'),
            h2=data.get('h2'),
            solver=data.get('solver', 'default'),
            raw=data,
        )


class WegnerConstant(object):
    """The constant of the certified Wegner estimate.

    :param discrete: ``|f'|_L1 / (|alpha_0| - alpha*)``, the constant of the lattice model.
    """

    def __init__(self, discrete):
        self.discrete = discrete

    def continuum(self, energy):
        """The continuum form ``e^E C_V`` times the discrete constant, with ``C_V`` a placeholder of 1."""
        return math.exp(energy) * CONTINUUM_CV * self.discrete

    def __float__(self):
        return float(self.discrete)

    def __repr__(self):
        return '<WegnerConstant: %r>' % self.discrete


def theoretical_constant(config):
    """The certified constant ``C = |f'|_L1 / (1 - alpha*)`` for normalized ``alpha``.

    :raises NotCertifiableError: If ``alpha* >= |alpha_0|``.
    :rtype: :py:class:`WegnerConstant`
    """
    model = config.model if isinstance(config, WegnerConfig) else config
    return WegnerConstant(neumann_inverse_bound(model.alpha) * model.density.f_prime_l1())


class Experiment(object):
    """Disorder samples and spectra of a configuration, computed once per box side.

    :param workers: Number of worker threads. Results do not depend on it.
    """

    def __init__(self, config, workers=1):
        self.config = config
        self.workers = workers
        self._spectra = {}
        self._constants = {}
        self.hash = config.config_hash

    def box(self, side):
        return self.config.model.box(side)

    def _spectrum(self, side, sample_id):
        model = self.config.model
        box = self.box(side)
        sites = extended_sites(box, model.alpha)
        sample = sample_omega(model.density, sites, self.config.seed, sample_id)
        hamiltonian = assemble(box, model.v0, alloy_potential(model.alpha, sample, box))
        provenance = {'config_hash': self.hash, 'seed': self.config.seed, 'sample_id': sample_id, 'l': side}
        return eigenvalues(hamiltonian, solver=self.config.solver, provenance=provenance)

    def spectra(self, side):
        """The spectra of all samples of a side, ordered by sample id."""
        if side not in self._spectra:
            start = time.time()
            self._spectra[side] = pool.map_ordered(
                lambda i: self._spectrum(side, i), range(self.config.samples), self.workers)
            log.info('l=%s: %s spectra in %.2fs', side, self.config.samples, time.time() - start)
        return self._spectra[side]

    def bound(self, side, length):
        """The bound on ``E[Tr P(I)]`` of the configured mode for an interval of the given length.

        :return: A tuple ``(bound, constant, reference)``. ``constant`` is the factor in front of ``|I| l^d``
                 and ``reference`` is ``None`` except in volume factor mode. There ``bound`` is
                 ``|f'| |I| l^d |Lambda+|``, so ``constant`` is ``|f'| C_Gamma`` with
                 ``C_Gamma = |Lambda+| / l^d`` and the bound grows like ``l^(2d)``. ``reference`` is
                 ``|f'| |I| l^d``, the same bound with ``C_Gamma`` set to one.
        """
        model = self.config.model
        mode = self.config.constant_mode
        volume = model.box(side).volume

        if mode == MODE_CERTIFIED:
            constant = theoretical_constant(model).discrete
            return constant * length * volume, constant, None
        elif mode == MODE_UNIFORM_DENSITY:
            constant = model.density.sup_norm() / abs(model.alpha.alpha0)
            return constant * length * volume, constant, None

        column_sums = self._column_sums(side)
        f_prime = model.density.f_prime_l1()
        if mode == MODE_COLUMN_SUM:
            total = math.fsum(column_sums)
            return f_prime * length * total, f_prime * total / volume, None

        # volume factor: every column sum is estimated by |Lambda+|
        size = len(extended_sites(model.box(side), model.alpha))
        if np.max(column_sums) > size * (1 + 1e-12):
            log.warning('l=%s: column sums exceed |Lambda+| = %s, the volume factor bound does not apply.',
                        side, size)
        constant = f_prime * size / volume
        return f_prime * length * volume * size, constant, f_prime * length * volume

    def _column_sums(self, side):
        if side not in self._constants:
            box = self.box(side)
            truncation = build_truncation(self.config.model.alpha, box)
            inverse = invert_truncation(truncation)
            self._constants[side] = column_sum_profile(inverse, truncation.site_index, box.sites)
        return self._constants[side]


def _experiment(config, experiment):
    return experiment if experiment is not None else Experiment(config)


def mc_expected_trace(config, energy, eps, side, experiment=None):
    """Monte Carlo estimate of ``E[Tr P([E - eps, E])]``.

    :return: The tuple ``(mean, standard error)``.
    """
    spectra = _experiment(config, experiment).spectra(side)
    counts = np.array([trace_projection(s, (energy - eps, energy)) for s in spectra], dtype=float)
    if eps == 0 and np.any(counts):
        log.warning('l=%s, E=%r: %s samples have an eigenvalue exactly at E.', side, energy,
                    np.count_nonzero(counts))
    return _mean_se(counts)


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    mean = math.fsum(values) / len(values)
    if len(values) < 2:
        return mean, float('nan')
    return mean, float(np.std(values, ddof=1) / math.sqrt(len(values)))


class WegnerRow(object):
    """One cell ``(l, E, eps)`` of a :py:class:`WegnerReport`."""

    FIELDS = ('mode', 'd', 'l', 'bc', 'E', 'eps', 'M', 'mean_trace', 'se', 'ucl99', 'bound', 'constant',
              'pass')

    def __init__(self, **kwargs):
        for key in self.FIELDS:
            setattr(self, key, kwargs.pop(key))
        self.reference_bound = kwargs.pop('reference_bound', None)
        self.continuum_constant = kwargs.pop('continuum_constant', None)

    @property
    def passed(self):
        return getattr(self, 'pass')

    def values(self):
        return [getattr(self, key) for key in self.FIELDS]


class WegnerReport(object):
    """Results of :py:func:`verify_wegner`.

    :param    rows: A list of :py:class:`WegnerRow` instances.
    :param    seed: The seed of the run.
    :param    hash: The config hash.
    :param wall_time: Wall time in seconds.
    """

    def __init__(self, rows, seed, hash, wall_time):
        self.rows = rows
        self.seed = seed
        self.hash = hash
        self.wall_time = wall_time

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def violations(self):
        return [row for row in self.rows if not row.passed]


def verify_wegner(config, experiment=None):
    """Check ``E[Tr P([E - eps, E])] <= bound`` for every configured cell.

    A cell passes if the 99% upper confidence limit ``mean + 2.576 SE`` does not exceed the bound of the
    configured mode.

    :rtype: :py:class:`WegnerReport`
    """
    config.require('energies', 'epsilons', 'sides')
    experiment = _experiment(config, experiment)
    start = time.time()

    rows = []
    for side in config.sides:
        for energy in config.energies:
            for eps in config.epsilons:
                mean, se = mc_expected_trace(config, energy, eps, side, experiment)
                ucl = mean + Z_UCL99 * se
                bound, constant, reference = experiment.bound(side, eps)
                continuum = None
                if config.constant_mode == MODE_CERTIFIED:
                    continuum = theoretical_constant(config).continuum(energy)

                row = WegnerRow(mode=config.constant_mode, d=config.model.d, l=side, bc=config.model.bc,
                                E=energy, eps=eps, M=config.samples, mean_trace=mean, se=se, ucl99=ucl,
                                bound=bound, constant=constant, reference_bound=reference,
                                continuum_constant=continuum, **{'pass': bool(ucl <= bound)})
                if not row.passed:
                    log.error('l=%s, E=%r, eps=%r: upper limit %r exceeds the bound %r.', side, energy, eps,
                              ucl, bound)
                elif reference is not None and ucl > reference:
                    log.info('l=%s, E=%r, eps=%r: upper limit %r exceeds the l^d reference %r.', side, energy,
                             eps, ucl, reference)
                else:
                    log.info('l=%s, E=%r, eps=%r: mean %r +- %r <= %r', side, energy, eps, mean, se, bound)
                rows.append(row)

    return WegnerReport(rows, config.seed, experiment.hash, time.time() - start)


class IDSCurve(object):
    """Averaged normalized counting functions on an energy grid.

    :param energies: The sorted energy grid.
    :param   values: Array of shape ``(M, len(energies))`` with the counting function of every sample.
    :param     side: The box side.
    """

    def __init__(self, energies, values, side):
        self.energies = np.asarray(energies, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.side = side
        self.mean = self.values.mean(axis=0)
        self.se = self.values.std(axis=0, ddof=1) / math.sqrt(len(self.values))

    @property
    def lower(self):
        return self.mean - Z_UCL99 * self.se

    @property
    def upper(self):
        return self.mean + Z_UCL99 * self.se

    @property
    def spacing(self):
        """The grid spacing ``h``.

        :raises ConfigurationError: If the grid is not uniform.
        """
        steps = np.diff(self.energies)
        if len(steps) == 0:
            raise ConfigurationError('An energy grid needs at least two points.')
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
            raise ConfigurationError('The energy grid is not uniform.')
        return float(steps[0])

    def rows(self):
        return zip(self.energies, self.mean, self.se, self.lower, self.upper)


def energy_grid(lower, upper, spacing):
    """A uniform grid from ``lower`` to ``upper`` (inclusive where it fits)."""
    if spacing <= 0:
        raise ConfigurationError('Grid spacing must be positive.')
    count = int(math.floor((upper - lower) / spacing + 1e-9)) + 1
    return np.round(lower + spacing * np.arange(count), 12)


def ids_estimate(config, energies, side, experiment=None):
    """Averaged finite volume IDS on a sorted energy grid.

    :rtype: :py:class:`IDSCurve`
    """
    energies = np.asarray(energies, dtype=float)
    if np.any(np.diff(energies) < 0):
        raise ConfigurationError('The energy grid must be sorted.')

    spectra = _experiment(config, experiment).spectra(side)
    values = [[counting_function(s, e) for e in energies] for s in spectra]
    return IDSCurve(energies, values, side)


def lipschitz_check(curve, constant, mode=None):
    """Compare the difference quotients of an averaged IDS with a Lipschitz constant.

    Each quotient ``(N(E) - N(E - h)) / h`` may exceed ``constant`` by three standard errors of the paired
    per-sample differences, divided by ``h``.

    :param mode: The constant mode of the run. The check does not apply to ``volume_factor`` and
                 ``uniform_density`` runs, whose bounds grow faster than the volume.
    :return: The tuple ``(max difference quotient, passed)``.
    """
    if mode in (MODE_VOLUME_FACTOR, MODE_UNIFORM_DENSITY):
        raise NotApplicableError('The %s bound does not give Lipschitz continuity of the IDS.' % mode)

    spacing = curve.spacing
    if spacing < MIN_GRID_SPACING:
        raise ConfigurationError('Grid spacing %r is below the resolution floor %r.' % (
            spacing, MIN_GRID_SPACING))

    differences = np.diff(curve.values, axis=1)
    quotients = differences.mean(axis=0) / spacing
    if len(curve.values) > 1:
        allowance = 3 * differences.std(axis=0, ddof=1) / math.sqrt(len(curve.values)) / spacing
    else:
        allowance = np.zeros(len(quotients))

    passed = bool(np.all(quotients <= constant + allowance))
    if not passed:
        worst = int(np.argmax(quotients - allowance))
        log.error('IDS quotient %r at E=%r exceeds %r.', quotients[worst], curve.energies[worst + 1],
                  constant + allowance[worst])
    return float(np.max(quotients)), passed


def dos_estimate(curve):
    """Centered differences ``(N(E + h) - N(E - h)) / 2h`` at the interior grid points.

    :return: A list of ``(E, dos, error)`` tuples with the standard error of the paired differences.
    """
    spacing = curve.spacing
    differences = (curve.values[:, 2:] - curve.values[:, :-2]) / (2 * spacing)
    mean = differences.mean(axis=0)
    if len(curve.values) > 1:
        error = differences.std(axis=0, ddof=1) / math.sqrt(len(curve.values))
    else:
        error = np.zeros(len(mean))
    return [(float(e), float(m), float(s)) for e, m, s in zip(curve.energies[1:-1], mean, error)]


def free_lattice_dos(energy):
    """The density of states ``1 / (pi sqrt(E (4 - E)))`` of the one dimensional lattice Laplacian."""
    if not 0 < energy < 4:
        return 0.0
    return 1.0 / (math.pi * math.sqrt(energy * (4 - energy)))


class H2Result(object):
    def __init__(self, p_hat, se, bound, passed):
        self.p_hat = p_hat
        self.se = se
        self.bound = bound
        self.passed = passed

    def __iter__(self):
        return iter((self.p_hat, self.se, self.bound, self.passed))


def h2_probability_check(config, energy, eta, side, experiment=None):
    """Empirical ``P{dist(sigma(H), E) <= eta}`` against the Wegner bound for an interval of length ``2 eta``.

    :rtype: :py:class:`H2Result`
    """
    if eta <= 0:
        raise ConfigurationError('eta must be positive.')
    experiment = _experiment(config, experiment)
    spectra = experiment.spectra(side)
    hits = np.array([trace_projection(s, (energy - eta, energy + eta)) > 0 for s in spectra], dtype=float)
    p_hat = math.fsum(hits) / len(hits)
    se = math.sqrt(p_hat * (1 - p_hat) / len(hits))
    bound, _constant, _reference = experiment.bound(side, 2 * eta)
    passed = p_hat <= bound + 3 * se
    if not passed:
        log.error('l=%s, E=%r, eta=%r: P = %r exceeds %r.', side, energy, eta, p_hat, bound)
    return H2Result(p_hat, se, bound, passed)


def default_energy_range(config):
    """An energy window containing every attainable eigenvalue with a margin of one.

    The potential is bounded by ``|V_0|_inf + max|supp f| sum_k |alpha_k|`` and the Laplacian by ``4d``.
    """
    model = config.model if isinstance(config, WegnerConfig) else config
    lower, upper = model.density.support()
    potential = model.v0.sup_norm() + max(abs(lower), abs(upper)) * math.fsum(
        abs(v) for _k, v in model.alpha.items())
    return -potential - 1.0, 4.0 * model.d + potential + 1.0
