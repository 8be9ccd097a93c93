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

"""Ground state tail probabilities of Neumann boxes for sign indefinite single site potentials.

The single site potential is split as ``u = u_plus - eps_u u_minus`` with nonnegative parts. For small
``eps_u`` the mean ``m1 = sum_k u_k`` stays positive, and a ground state energy below ``E`` forces more than
half of the couplings in the box below ``4E / m1``. This makes small ground state energies exponentially
rare in the volume.
"""

import logging
import math
import time

import numpy as np
from scipy import stats

from . import pool
from .base import ConfigurationError
from .base import DecayUnresolvedError
from .base import NonPositiveMeanError
from .config import config_hash
from .constants import BC_NEUMANN
from .constants import BC_PERIODIC
from .constants import MIN_SAMPLES
from .conv_toeplitz import SitePotential
from .conv_toeplitz import extended_sites
from .disorder import density_from_json
from .disorder import sample_omega
from .hamiltonian import BoxGeometry
from .hamiltonian import alloy_potential
from .hamiltonian import assemble
from .hamiltonian import decouple
from .hamiltonian import neumann_blocks
from .spectral import ground_state_energy

log = logging.getLogger(__name__)

ENERGY_FIXED = 'fixed'
ENERGY_THRESHOLD = 'threshold'
MONITOR_MIN_SIDE = 16


class IndefiniteSiteSpec(object):
    """The decomposition ``u = u_plus - eps_u u_minus`` of a single site potential.

    :param  u_plus: A :py:class:`~wegnerlab.conv_toeplitz.SitePotential` with nonnegative coefficients.
    :param u_minus: A :py:class:`~wegnerlab.conv_toeplitz.SitePotential` with coefficients in ``[0, 1]``, or
                    ``None``.
    :param   eps_u: The weight of ``u_minus``, in ``[0, 1]``.
    """

    def __init__(self, u_plus, u_minus=None, eps_u=0.0):
        if not u_plus.is_nonnegative():
            raise ConfigurationError('u_plus must have nonnegative coefficients.', path='u_plus')
        if u_minus is not None:
            if u_minus.d != u_plus.d:
                raise ConfigurationError('u_minus has dimension %s, u_plus %s.' % (u_minus.d, u_plus.d),
                                         path='u_minus')
            if not u_minus.is_nonnegative() or u_minus.max_coefficient() > 1:
                raise ConfigurationError('u_minus must have coefficients in [0, 1].', path='u_minus')
        eps_u = float(eps_u)
        if not 0 <= eps_u <= 1:
            raise ConfigurationError('eps_u must be in [0, 1].', path='eps_u')

        self.u_plus = u_plus
        self.u_minus = u_minus
        self.eps_u = eps_u

    @property
    def d(self):
        return self.u_plus.d

    @property
    def n_overlap(self):
        """``N = |sum_k u_minus(. - k)|_inf``, the sum of all coefficients of ``u_minus`` on the lattice."""
        if self.u_minus is None:
            return 0.0
        return self.u_minus.total()

    def with_eps(self, eps_u):
        return IndefiniteSiteSpec(self.u_plus, self.u_minus, eps_u)

    def effective(self):
        """The effective single site potential ``u_plus - eps_u u_minus`` on the union of both supports."""
        offsets = set(self.u_plus.support)
        if self.u_minus is not None:
            offsets.update(self.u_minus.support)

        entries = []
        for offset in sorted(offsets):
            value = self.u_plus[offset]
            if self.u_minus is not None:
                value -= self.eps_u * self.u_minus[offset]
            entries.append((offset, value))
        return SitePotential(entries, d=self.d)

    @classmethod
    def from_dict(cls, data):
        if 'u_plus' not in data:
            raise ConfigurationError('is required.', path='u_plus')
        u_plus = SitePotential.from_json(data['u_plus'], path='u_plus')
        u_minus = None
        if data.get('u_minus') is not None:
            u_minus = SitePotential.from_json(data['u_minus'], path='u_minus')
        try:
            eps_u = float(data.get('eps_u', 0.0))
        except (TypeError, ValueError):
            raise ConfigurationError('must be a number.', path='eps_u')
        return cls(u_plus, u_minus, eps_u)


def m1(spec):
    """The ground state weighted mean ``m1 = sum_k u_k`` of the effective potential.

    The Neumann ground state of the free Laplacian is constant, so every coefficient has weight one.

    :raises NonPositiveMeanError: If ``m1 <= 0``.
    """
    value = spec.u_plus.total() - spec.eps_u * spec.n_overlap
    if value <= 0:
        raise NonPositiveMeanError('m1 = %r is not positive.' % value)
    return value


def _omega_plus(density):
    lower, upper = density.support()
    if lower != 0:
        raise ConfigurationError('The density must be supported on [0, omega_plus].', path='model.density')
    return upper


def eps_u_threshold(spec, energy, density):
    """The largest ``eps_u`` admitted by the rare configuration bound, ``E / (8 omega_plus N)``.

    It is infinite if ``u_minus`` vanishes.
    """
    n = spec.n_overlap
    if n == 0:
        return float('inf')
    return energy / (8 * _omega_plus(density) * n)


def tail_scale(energy, beta=1.0):
    """The side ``floor((beta E)^(-1/2))`` attached to an energy ``E`` in ``]0, 1[``."""
    if not 0 < energy < 1:
        raise ConfigurationError('energy must be in ]0, 1[, got %r.' % energy)
    return int(math.floor((beta * energy) ** -0.5))


def two_scale_eps_threshold(spec, omega_plus, beta, side):
    """The largest ``eps_u`` admitted at the threshold energy ``1 / (beta (l+1)^2)`` of side ``l``."""
    n = spec.n_overlap
    if n == 0:
        return float('inf')
    return 1.0 / (8 * omega_plus * n * beta * (side + 1) ** 2)


class InitialScaleGate(object):
    """Hypotheses of the rare configuration bound.

    The constants ``Q1`` and ``beta0`` exist but are not known, so checks against user supplied values are
    recorded as unverified.

    :param    q1: Assumed minimal side, or ``None``.
    :param beta0: Assumed minimal ``beta``, or ``None``.
    """

    def __init__(self, q1=None, beta0=None):
        self.q1 = q1
        self.beta0 = beta0

    def check(self, spec, energy, density, side, beta=None):
        """Evaluate all gates.

        :return: A dict mapping gate names to ``True``, ``False`` or ``None`` (not checkable).
        """
        try:
            positive = m1(spec) > 0
        except NonPositiveMeanError:
            positive = False

        return {
            'm1_positive': positive,
            'eps_u': spec.eps_u <= eps_u_threshold(spec, energy, density),
            'side': None if self.q1 is None else side >= self.q1,
            'beta': None if self.beta0 is None or beta is None else beta >= self.beta0,
        }

    def admissible(self, spec, energy, density, side, beta=None):
        """``True`` if no gate fails. Unknown gates do not fail."""
        return all(v is not False for v in self.check(spec, energy, density, side, beta).values())

    @property
    def verified(self):
        return False


class InitialScaleConfig(object):
    """Configuration of the tail and two scale experiments."""

    def __init__(self, spec, density, d=1, samples=10000, seed=0, energy=None, sides=None,
                 energy_scaling=ENERGY_FIXED, periodic=False, zeta=None, beta=1.0, L=None,
                 two_scale_samples=None, q1=None, beta0=None, solver='default', raw=None):
        self.spec = spec
        self.density = density
        self.d = d
        self.samples = samples
        self.seed = seed
        self.energy = energy
        self.sides = list(sides or [])
        self.energy_scaling = energy_scaling
        self.periodic = periodic
        self.zeta = zeta
        self.beta = beta
        self.L = L
        self.two_scale_samples = two_scale_samples or samples
        self.gate = InitialScaleGate(q1, beta0)
        self.solver = solver
        self.raw = raw
        self.validate()

    def validate(self):
        if self.spec.d != self.d:
            raise ConfigurationError('u_plus has dimension %s, model has %s.' % (self.spec.d, self.d),
                                     path='model.d')
        _omega_plus(self.density)
        m1(self.spec)
        if self.samples < MIN_SAMPLES:
            raise ConfigurationError('at least %s samples are required.' % MIN_SAMPLES, path='tails.samples')
        if self.energy_scaling not in (ENERGY_FIXED, ENERGY_THRESHOLD):
            raise ConfigurationError('must be fixed or threshold.', path='tails.energy_scaling')
        if self.beta is not None and self.beta <= 0:
            raise ConfigurationError('must be positive.', path='beta')
        if self.zeta is not None and not 0 < self.zeta < 1:
            raise ConfigurationError('must be in ]0, 1[.', path='zeta')
        if any(side < 1 for side in self.sides):
            raise ConfigurationError('box sides must be positive.', path='tails.sides')

    @property
    def config_hash(self):
        return config_hash(self.raw if self.raw is not None else {})

    def energy_for(self, side):
        if self.energy_scaling == ENERGY_THRESHOLD:
            return 1.0 / (self.beta * (side + 1) ** 2)
        return self.energy

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigurationError('configuration must be an object.')
        model = data.get('model') or {}
        if not isinstance(model, dict) or 'density' not in model:
            raise ConfigurationError('missing key density.', path='model')
        bc = model.get('bc', BC_NEUMANN)
        if bc != BC_NEUMANN:
            raise ConfigurationError('tail probabilities use Neumann boxes.', path='model.bc')
        if model.get('v0') is not None:
            raise ConfigurationError('tail probabilities assume V_0 = 0.', path='model.v0')

        spec = IndefiniteSiteSpec.from_dict(data)
        density = density_from_json(model['density'], path='model.density')
        tails = data.get('tails') or {}
        two_scale = data.get('two_scale') or {}
        for name, section in (('tails', tails), ('two_scale', two_scale)):
            if not isinstance(section, dict):
                raise ConfigurationError('must be an object.', path=name)

        try:
            samples = int(tails.get('samples', data.get('samples', 10000)))
            sides = [int(s) for s in tails.get('sides', data.get('sides', []))]
            energy = tails.get('energy')
            energy = None if energy is None else float(energy)
            L = data.get('L')
            zeta = data.get('zeta')
            return cls(
                spec, density,
                d=int(model.get('d', spec.d)),
                samples=samples,
                seed=int(data.get('seed', 0)),
                energy=energy,
                sides=sides,
                energy_scaling=tails.get('energy_scaling', ENERGY_FIXED),
                periodic=bool(tails.get('periodic', False)),
                zeta=None if zeta is None else float(zeta),
                beta=float(data.get('beta', 1.0)),
                L=None if L is None else int(L),
                two_scale_samples=two_scale.get('samples'),
                q1=tails.get('q1'),
                beta0=tails.get('beta0'),
                solver=data.get('solver', 'default'),
                raw=data,
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError('malformed tail configuration: %s' % e)


class GroundStateSamples(object):
    """Ground state energies and in-box couplings of ``M`` samples of one side.

    :param   energies: ``lambda_1`` per sample, Neumann boundary conditions.
    :param  couplings: Array of shape ``(M, l^d)`` with the coupling constants of the box sites.
    :param   periodic: ``lambda_1`` per sample with periodic boundary conditions, or ``None``.
    """

    def __init__(self, side, d, energies, couplings, periodic=None):
        self.side = side
        self.d = d
        self.energies = np.asarray(energies, dtype=float)
        self.couplings = np.asarray(couplings, dtype=float)
        self.periodic = None if periodic is None else np.asarray(periodic, dtype=float)

    def __len__(self):
        return len(self.energies)

    @property
    def volume(self):
        return self.side ** self.d

    def bracketing_violations(self):
        """Samples whose periodic ground state lies below the Neumann one."""
        if self.periodic is None:
            return None
        return int(np.count_nonzero(self.periodic < self.energies - 1e-10))


def _ground_state(spec, density, box, seed, sample_id, solver, periodic):
    alpha = spec.effective()
    sites = extended_sites(box, alpha)
    sample = sample_omega(density, sites, seed, sample_id)
    potential = alloy_potential(alpha, sample, box)
    provenance = {'seed': seed, 'sample_id': sample_id, 'l': box.l}
    neumann = ground_state_energy(assemble(box, None, potential), solver=solver, provenance=provenance)
    other = None
    if periodic:
        other = ground_state_energy(assemble(box.with_bc(BC_PERIODIC), None, potential), solver=solver,
                                    provenance=provenance)
    return neumann, sample.restrict(box.sites), other


def ground_state_samples(spec, density, side, samples, seed, solver=None, periodic=False, workers=1):
    """Sample ``lambda_1`` of Neumann boxes of the given side.

    :rtype: :py:class:`GroundStateSamples`
    """
    box = BoxGeometry(spec.d, side, BC_NEUMANN)
    results = pool.map_ordered(
        lambda i: _ground_state(spec, density, box, seed, i, solver, periodic), range(samples), workers)
    return GroundStateSamples(
        side, spec.d,
        [r[0] for r in results],
        [r[1] for r in results],
        [r[2] for r in results] if periodic else None,
    )


def wilson_interval(successes, trials, confidence=0.95):
    """The Wilson score interval of a binomial proportion.

    >>> lower, upper = wilson_interval(0, 100)
    >>> round(lower, 6), round(upper, 4)
    (0.0, 0.037)
    """
    if trials == 0:
        return 0.0, 1.0
    z = stats.norm.ppf(0.5 + confidence / 2)
    p = successes / trials
    denominator = 1 + z ** 2 / trials
    center = (p + z ** 2 / (2 * trials)) / denominator
    half = z / denominator * math.sqrt(p * (1 - p) / trials + z ** 2 / (4 * trials ** 2))
    return max(0.0, center - half), min(1.0, center + half)


class TailRow(object):
    """Tail probability ``P{lambda_1 < E}`` of one side."""

    FIELDS = ('l', 'E', 'eps_u', 'M', 'p_hat', 'wilson_lo', 'wilson_hi', 'violations', 'c_hat')

    def __init__(self, l, E, eps_u, M, p_hat, wilson_lo, wilson_hi, violations=None, c_hat=None,
                 samples=None):
        self.l = l
        self.E = E
        self.eps_u = eps_u
        self.M = M
        self.p_hat = p_hat
        self.wilson_lo = wilson_lo
        self.wilson_hi = wilson_hi
        self.violations = violations
        self.c_hat = c_hat
        self.samples = samples

    def values(self):
        return [getattr(self, key) for key in self.FIELDS]

    def __repr__(self):
        return '<TailRow: l=%s, E=%r, p=%r>' % (self.l, self.E, self.p_hat)


def tail_probability(spec, density, energy, side, samples, seed, solver=None, periodic=False, workers=1,
                     ground_states=None):
    """Estimate ``P{lambda_1(H^(l,N)) < E}`` with a 95% Wilson interval.

    :param ground_states: Precomputed :py:class:`GroundStateSamples` of this side.
    :rtype: :py:class:`TailRow`
    """
    _omega_plus(density)
    if ground_states is None:
        ground_states = ground_state_samples(spec, density, side, samples, seed, solver=solver,
                                             periodic=periodic, workers=workers)
    hits = int(np.count_nonzero(ground_states.energies < energy))
    lower, upper = wilson_interval(hits, len(ground_states))
    log.info('l=%s, E=%r: %s of %s samples below E', side, energy, hits, len(ground_states))
    return TailRow(side, energy, spec.eps_u, len(ground_states), hits / len(ground_states), lower, upper,
                   samples=ground_states)


def rare_config_monitor(samples, energy, m1_value):
    """Count samples with ``lambda_1 < E`` but at most ``l^d / 2`` couplings below ``4E / m1``.

    Couplings equal to the threshold do not count as small.
    """
    threshold = 4 * energy / m1_value
    small = np.count_nonzero(samples.couplings < threshold, axis=1)
    violations = (samples.energies < energy) & (small <= samples.volume / 2)
    return int(np.count_nonzero(violations))


class LargeDeviationFit(object):
    """Least squares fit of ``-log P = c l^d + b``."""

    def __init__(self, c_hat, intercept, residuals, monotone):
        self.c_hat = c_hat
        self.intercept = intercept
        self.residuals = residuals
        self.monotone = monotone

    def __repr__(self):
        return '<LargeDeviationFit: c=%r, monotone=%s>' % (self.c_hat, self.monotone)


def large_deviation_fit(rows, d=1):
    """Fit the exponential decay of tail probabilities in the volume.

    :param rows: :py:class:`TailRow` instances (or any objects with ``l``, ``p_hat`` and ``M``).
    :raises DecayUnresolvedError: If fewer than three sides have a nonzero probability.
    :rtype: :py:class:`LargeDeviationFit`
    """
    rows = sorted(rows, key=lambda r: r.l)
    usable = [r for r in rows if r.p_hat > 0]
    if len(usable) < 3:
        floor = 1.0 / max([r.M for r in rows] or [1])
        raise DecayUnresolvedError('Only %s sides with nonzero probability.' % len(usable), floor)

    volumes = np.array([r.l ** d for r in usable], dtype=float)
    logs = -np.log([r.p_hat for r in usable])
    slope, intercept = np.polyfit(volumes, logs, 1)
    residuals = logs - (slope * volumes + intercept)
    probabilities = [r.p_hat for r in rows]
    monotone = all(a > b for a, b in zip(probabilities[:-1], probabilities[1:]))
    return LargeDeviationFit(float(slope), float(intercept), residuals, monotone)


class TailReport(object):
    def __init__(self, rows, fit, gates, asserted, hash, wall_time):
        self.rows = rows
        self.fit = fit
        self.gates = gates
        self.asserted = asserted
        self.hash = hash
        self.wall_time = wall_time

    @property
    def violations(self):
        """Rare configuration violations in sides where the bound is asserted."""
        return sum(row.violations for row in self.rows if row.l in self.asserted)

    @property
    def bracketing_violations(self):
        return sum(row.samples.bracketing_violations() or 0 for row in self.rows)

    @property
    def passed(self):
        return self.violations == 0 and self.bracketing_violations == 0


def run_tails(config, workers=1):
    """Tail probabilities, rare configuration monitor and decay fit for every configured side.

    :rtype: :py:class:`TailReport`
    """
    if not config.sides:
        raise ConfigurationError('is required for this experiment.', path='tails.sides')
    if config.energy_scaling == ENERGY_FIXED and config.energy is None:
        raise ConfigurationError('is required for fixed energy scaling.', path='tails.energy')

    start = time.time()
    spec = config.spec
    mean = m1(spec)
    rows, gates, asserted = [], {}, set()
    for side in config.sides:
        energy = config.energy_for(side)
        row = tail_probability(spec, config.density, energy, side, config.samples, config.seed,
                               solver=config.solver, periodic=config.periodic, workers=workers)
        row.violations = rare_config_monitor(row.samples, energy, mean)

        gates[side] = config.gate.check(spec, energy, config.density, side, config.beta)
        if gates[side]['eps_u'] is False:
            log.warning('l=%s: eps_u = %r is above the rare configuration threshold %r.', side, spec.eps_u,
                        eps_u_threshold(spec, energy, config.density))
        if spec.eps_u == 0 and side >= MONITOR_MIN_SIDE:
            asserted.add(side)
            if row.violations:
                log.error('l=%s: %s samples violate the rare configuration bound.', side, row.violations)
        elif row.violations:
            log.warning('l=%s: %s samples outside the rare configuration bound (not asserted).', side,
                        row.violations)

        bracketing = row.samples.bracketing_violations()
        if bracketing:
            log.error('l=%s: %s samples violate Dirichlet-Neumann bracketing.', side, bracketing)
        rows.append(row)

    mean_coupling = config.density.mean()
    for side in config.sides:
        if mean_coupling <= 4 * config.energy_for(side) / mean:
            log.warning('l=%s: E(omega) = %r is not above 4E/m1, no large deviation decay is expected.', side,
                        mean_coupling)

    try:
        fit = large_deviation_fit(rows, config.d)
    except DecayUnresolvedError as e:
        log.warning('%s', e)
        fit = None
    else:
        for row in rows:
            row.c_hat = fit.c_hat
        if not fit.monotone:
            log.warning('Tail probabilities are not strictly decreasing in l.')

    return TailReport(rows, fit, gates, asserted, config.config_hash, time.time() - start)


class TwoScaleResult(object):
    """Outcome of :py:func:`two_scale_probe`."""

    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

    def __iter__(self):
        return iter((self.p_direct, self.union_bound, self.passed))


def two_scale_probe(spec, density, L, zeta, beta, samples, seed, solver=None, workers=1):
    """Compare ``P{lambda_1(H^(L,N)) < L^(zeta-2)}`` with the union bound over Neumann subcubes.

    The subcube side is ``l = floor(L^(1-zeta/2) beta^(-1/2) - 1)``, capped at ``L``. The union bound is
    ``(L/l)^d P{lambda_1(H^(l,N)) <= 1 / (beta (l+1)^2)}``. Every sample is also checked for
    ``lambda_1(H^L) >= min_j lambda_1(H_j)`` with the Neumann decoupled blocks ``H_j``.

    :rtype: :py:class:`TwoScaleResult`, iterable as ``(lhs, union bound, passed)``
    """
    if not 0 < zeta < 1:
        raise ConfigurationError('zeta must be in ]0, 1[.', path='zeta')
    if beta <= 0:
        raise ConfigurationError('beta must be positive.', path='beta')
    side = int(math.floor(L ** (1 - zeta / 2) * beta ** -0.5 - 1))
    side = min(side, L)
    if side < 2:
        raise ConfigurationError('subcube side %s is degenerate (L=%s, zeta=%r, beta=%r).' % (
            side, L, zeta, beta), path='L')

    d = spec.d
    big = BoxGeometry(d, L, BC_NEUMANN)
    small = BoxGeometry(d, side, BC_NEUMANN)
    blocks = neumann_blocks(big, side)
    alpha = spec.effective()
    threshold_big = float(L) ** (zeta - 2)
    threshold_small = 1.0 / (beta * (side + 1) ** 2)

    def run(sample_id):
        sites = extended_sites(big, alpha)
        sample = sample_omega(density, sites, seed, sample_id)
        hamiltonian = assemble(big, None, alloy_potential(alpha, sample, big))
        provenance = {'seed': seed, 'sample_id': sample_id, 'l': L}
        direct = ground_state_energy(hamiltonian, solver=solver, provenance=provenance)
        decoupled = ground_state_energy(decouple(hamiltonian, blocks), solver=solver, provenance=provenance)

        sub_sample = sample_omega(density, extended_sites(small, alpha), seed, sample_id)
        sub = ground_state_energy(assemble(small, None, alloy_potential(alpha, sub_sample, small)),
                                  solver=solver, provenance=provenance)
        return direct, decoupled, sub

    results = np.array(pool.map_ordered(run, range(samples), workers))
    direct, decoupled, sub = results[:, 0], results[:, 1], results[:, 2]

    p_direct = np.count_nonzero(direct < threshold_big) / samples
    p_sub = np.count_nonzero(sub <= threshold_small) / samples
    factor = (float(L) / side) ** d
    se_direct = math.sqrt(p_direct * (1 - p_direct) / samples)
    se_sub = math.sqrt(p_sub * (1 - p_sub) / samples)
    combined = math.sqrt(se_direct ** 2 + (factor * se_sub) ** 2)
    union = factor * p_sub
    decoupling_violations = int(np.count_nonzero(direct < decoupled - 1e-10))

    omega_plus = _omega_plus(density)
    inside = spec.eps_u <= two_scale_eps_threshold(spec, omega_plus, beta, side)
    if not inside:
        log.warning('eps_u = %r is above the two scale threshold %r.', spec.eps_u,
                    two_scale_eps_threshold(spec, omega_plus, beta, side))

    passed = p_direct <= union + 3 * combined and decoupling_violations == 0
    if not passed:
        log.error('Two scale bound violated: P = %r, union bound %r, %s decoupling violations.', p_direct,
                  union, decoupling_violations)
    return TwoScaleResult(
        L=L, l=side, zeta=zeta, beta=beta, M=samples, threshold_L=threshold_big, threshold_l=threshold_small,
        p_direct=p_direct, se_direct=se_direct, p_sub=p_sub, se_sub=se_sub, factor=factor, union_bound=union,
        combined_se=combined, decoupling_violations=decoupling_violations, eps_inside=inside, passed=passed,
    )
