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

"""Coupling constant densities, reproducible sampling of the disorder and the transformed variables."""

import logging
import math

import numpy as np

from .base import ConfigurationError
from .base import IndexMismatchError
from .base import NotApplicableError
from .constants import DENSITY_KINDS
from .constants import DENSITY_PIECEWISE_LINEAR
from .constants import DENSITY_UNIFORM

log = logging.getLogger(__name__)


class DensityModel(object):
    """Base class for the single site distribution of the coupling constants.

    Subclasses are immutable and implement the methods of this class.
    """

    kind = None

    def pdf(self, x):
        """Density at ``x`` (vectorized)."""
        raise NotImplementedError

    def cdf(self, x):
        """Distribution function at ``x`` (vectorized)."""
        raise NotImplementedError

    def ppf(self, u):
        """Inverse of the distribution function for ``u`` in ``(0, 1)`` (vectorized)."""
        raise NotImplementedError

    def support(self):
        """The support as a tuple ``(lower, upper)``."""
        raise NotImplementedError

    def breakpoints(self):
        """Points where the density is not smooth, including the ends of the support."""
        raise NotImplementedError

    def sup_norm(self):
        raise NotImplementedError

    def mean(self):
        raise NotImplementedError

    def f_prime_l1(self):
        """Total variation ``|f'|_L1`` of the density.

        :raises NotApplicableError: If the density is not weakly differentiable.
        """
        raise NotImplementedError

    def scaled(self, factor):
        """The law of ``factor * omega_0``."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def support_length(self):
        lower, upper = self.support()
        return upper - lower

    def __eq__(self, other):
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(repr(self.to_json()))


class PiecewiseLinearDensity(DensityModel):
    """A continuous, compactly supported, piecewise linear density.

    The density vanishes at both ends of its support, so it is in ``W^1_1`` and ``|f'|_L1`` is exactly the sum
    of the absolute increments between breakpoints.

    >>> triangle_density().f_prime_l1()
    4.0

    :param points: A list of ``(x, f(x))`` pairs with strictly increasing ``x``.
    """

    kind = DENSITY_PIECEWISE_LINEAR

    def __init__(self, points):
        points = np.array(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 2:
            raise ConfigurationError('A piecewise linear density needs at least two [x, f] points.')
        if not np.all(np.isfinite(points)):
            raise ConfigurationError('Density points must be finite.')

        x, f = points[:, 0], points[:, 1]
        if np.any(np.diff(x) <= 0):
            raise ConfigurationError('Density breakpoints must be strictly increasing.')
        if np.any(f < 0):
            raise ConfigurationError('Density values must be nonnegative.')
        if f[0] != 0 or f[-1] != 0:
            raise ConfigurationError('Density must vanish at both ends of its support (f in W11).')

        masses = np.diff(x) * (f[:-1] + f[1:]) / 2
        total = math.fsum(masses)
        if abs(total - 1) > 1e-10:
            raise ConfigurationError('Density integrates to %r, not 1.' % total)

        x.setflags(write=False)
        f.setflags(write=False)
        self.x = x
        self.f = f
        self._slopes = np.diff(f) / np.diff(x)
        self._cumulative = np.concatenate([[0.0], np.cumsum(masses)])
        self._total = total

    def __repr__(self):
        return '<PiecewiseLinearDensity: %s points on [%r, %r]>' % (len(self.x), self.x[0], self.x[-1])

    def _segment(self, x):
        return np.clip(np.searchsorted(self.x, x, side='right') - 1, 0, len(self.x) - 2)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.x, self.f, left=0.0, right=0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        i = self._segment(x)
        t = np.clip(x - self.x[i], 0, self.x[i + 1] - self.x[i])
        value = self._cumulative[i] + self.f[i] * t + self._slopes[i] * t ** 2 / 2
        value = np.where(x < self.x[0], 0.0, value)
        return np.clip(value / self._total, 0.0, 1.0)

    def ppf(self, u):
        r_total = np.asarray(u, dtype=float) * self._total
        i = np.clip(np.searchsorted(self._cumulative, r_total, side='right') - 1, 0, len(self.x) - 2)
        r = r_total - self._cumulative[i]
        fi = self.f[i]
        s = self._slopes[i]

        # t solves fi*t + s*t^2/2 = r, written without cancellation for either sign of s
        root = np.sqrt(np.maximum(fi ** 2 + 2 * s * r, 0.0))
        denominator = fi + root
        with np.errstate(divide='ignore', invalid='ignore'):
            t = np.where(denominator > 0, 2 * r / denominator, 0.0)
        return np.clip(self.x[i] + t, self.x[i], self.x[i + 1])

    def support(self):
        return float(self.x[0]), float(self.x[-1])

    def breakpoints(self):
        return self.x.copy()

    def sup_norm(self):
        return float(self.f.max())

    def mean(self):
        a, b = self.x[:-1], self.x[1:]
        fa, fb = self.f[:-1], self.f[1:]
        return math.fsum((b - a) / 6 * (fa * (2 * a + b) + fb * (a + 2 * b))) / self._total

    def f_prime_l1(self):
        return math.fsum(np.abs(np.diff(self.f)))

    def scaled(self, factor):
        if factor == 0:
            raise ConfigurationError('Cannot scale a density by zero.')
        points = np.column_stack([self.x * factor, self.f / abs(factor)])
        if factor < 0:
            points = points[::-1]
        return PiecewiseLinearDensity(points)

    def to_json(self):
        return {
            'kind': self.kind,
            'points': [[float(x), float(f)] for x, f in zip(self.x, self.f)],
        }


class UniformDensity(DensityModel):
    """The uniform density on ``[0, omega_plus]``.

    It has a jump at both ends of its support, so ``|f'|_L1`` is not defined, but ``|supp f| |f|_inf = 1``.

    :param omega_plus: The right end of the support.
    """

    kind = DENSITY_UNIFORM

    def __init__(self, omega_plus=1.0):
        omega_plus = float(omega_plus)
        if not math.isfinite(omega_plus) or omega_plus <= 0:
            raise ConfigurationError('omega_plus must be positive, got %r.' % omega_plus)
        self.omega_plus = omega_plus

    def __repr__(self):
        return '<UniformDensity: [0, %r]>' % self.omega_plus

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= self.omega_plus), 1.0 / self.omega_plus, 0.0)

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float) / self.omega_plus, 0.0, 1.0)

    def ppf(self, u):
        return np.asarray(u, dtype=float) * self.omega_plus

    def support(self):
        return 0.0, self.omega_plus

    def breakpoints(self):
        return np.array([0.0, self.omega_plus])

    def sup_norm(self):
        return 1.0 / self.omega_plus

    def mean(self):
        return self.omega_plus / 2

    def f_prime_l1(self):
        raise NotApplicableError('The uniform density has no W11 derivative.')

    def scaled(self, factor):
        if factor <= 0:
            raise ConfigurationError('A uniform density can only be scaled by a positive factor.')
        return UniformDensity(self.omega_plus * factor)

    def to_json(self):
        return {'kind': self.kind, 'omega_plus': self.omega_plus}


def triangle_density(lower=0.0, upper=1.0):
    """The symmetric triangle density on ``[lower, upper]``."""
    width = upper - lower
    return PiecewiseLinearDensity([[lower, 0.0], [lower + width / 2, 2.0 / width], [upper, 0.0]])


def trapezoid_density(lower, upper, ramp):
    """A symmetric trapezoid on ``[lower, upper]`` rising linearly over ``ramp`` at both ends."""
    if not 0 < 2 * ramp <= upper - lower:
        raise ConfigurationError('ramp must be positive and at most half the support.')
    height = 1.0 / (upper - lower - ramp)
    return PiecewiseLinearDensity([
        [lower, 0.0], [lower + ramp, height], [upper - ramp, height], [upper, 0.0],
    ])


def density_from_json(data, path='model.density'):
    """Load a density from ``{"kind": "piecewise_linear", "points": [[x, f]]}`` or
    ``{"kind": "uniform", "omega_plus": float}``."""

    if isinstance(data, list) or (isinstance(data, dict) and 'points' in data and 'omega_plus' in data):
        raise ConfigurationError('superpositions of uniform and W11 densities are not supported.', path=path)
    if not isinstance(data, dict):
        raise ConfigurationError('must be an object.', path=path)

    kind = data.get('kind')
    if kind not in DENSITY_KINDS:
        raise ConfigurationError('unknown density kind %r (one of %s).' % (kind, ', '.join(DENSITY_KINDS)),
                                 path=path)
    try:
        if kind == DENSITY_UNIFORM:
            return UniformDensity(data['omega_plus'])
        return PiecewiseLinearDensity(data['points'])
    except KeyError as e:
        raise ConfigurationError('missing key %s.' % e, path=path)
    except ConfigurationError as e:
        raise ConfigurationError(e.message, path=path)


def _zigzag(value):
    value = int(value)
    return 2 * value if value >= 0 else -2 * value - 1


def site_uniforms(seed, sample_id, coords):
    """Uniform variates in ``(0, 1)``, one per site, keyed by ``(seed, sample_id, site)``.

    Every variate is derived from its own :py:class:`numpy.random.SeedSequence`, so any single coupling
    constant can be reconstructed without generating its predecessors, and a site has the same variate in
    every box containing it.

    :param coords: Integer array of shape ``(n, d)``.
    """
    coords = np.asarray(coords, dtype=np.int64)
    states = np.empty(len(coords), dtype=np.uint64)
    for i, site in enumerate(coords):
        key = (int(sample_id), ) + tuple(_zigzag(c) for c in site)
        states[i] = np.random.SeedSequence(entropy=int(seed), spawn_key=key).generate_state(1, np.uint64)[0]
    return ((states >> np.uint64(11)).astype(float) + 0.5) * 2.0 ** -53


class DisorderSample(object):
    """One realization of the coupling constants on an extended site set.

    :param site_index: The :py:class:`~wegnerlab.conv_toeplitz.SiteIndex` of the sample.
    :param      omega: The coupling constants, in the order of ``site_index``.
    """

    def __init__(self, site_index, omega, seed=None, sample_id=None):
        omega = np.array(omega, dtype=float)
        if omega.shape != (len(site_index), ):
            raise IndexMismatchError('Got %s coupling constants for %s sites.' % (
                omega.shape, len(site_index)))
        omega.setflags(write=False)
        self.site_index = site_index
        self.omega = omega
        self.seed = seed
        self.sample_id = sample_id

    def __repr__(self):
        return '<DisorderSample: seed=%s, sample_id=%s, %s sites>' % (
            self.seed, self.sample_id, len(self.site_index))

    def restrict(self, sites):
        """The coupling constants at ``sites`` (a :py:class:`~wegnerlab.conv_toeplitz.SiteIndex`)."""
        return self.omega[self.site_index.positions(sites.coords)]

    @property
    def provenance(self):
        return {'seed': self.seed, 'sample_id': self.sample_id}


def sample_omega(density, sites, seed, sample_id):
    """Draw iid coupling constants for every site by inverse transform sampling.

    :rtype: :py:class:`DisorderSample`
    """
    omega = density.ppf(site_uniforms(seed, sample_id, sites.coords))
    return DisorderSample(sites, omega, seed=seed, sample_id=sample_id)


def transform(truncation, sample):
    """The transformed variables ``eta = A omega``."""
    if truncation.site_index != sample.site_index:
        raise IndexMismatchError('Truncation and sample are indexed by different site sets.')
    return truncation.matrix.dot(sample.omega)


def transformed_density_value(density, inverse, eta):
    """The joint density ``|det B| prod_k f((B eta)_k)`` of the transformed variables.

    :param inverse: The inverse ``B`` of the truncated Toeplitz matrix.
    :param     eta: The transformed variables.
    """
    inverse = np.atleast_2d(np.asarray(inverse, dtype=float))
    values = density.pdf(inverse.dot(np.atleast_1d(eta)))
    if np.any(values <= 0):
        return 0.0

    _sign, logdet = np.linalg.slogdet(inverse)
    return float(np.exp(logdet + np.sum(np.log(values))))
