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

"""Command line interface running the experiments of wegnerlab.

Every subcommand reads a configuration file, writes one or more CSV files and a manifest to the output
directory and exits with ``0`` on success, ``1`` on an operational error and ``2`` if a proven bound is
violated.
"""

import argparse
import collections
import logging
import math
import os
import sys

from . import solvers
from .base import ConfigurationError
from .base import NonPositiveMeanError
from .base import NotCertifiableError
from .base import TheoremViolation
from .base import WegnerLabError
from .config import apply_overrides
from .config import config_hash
from .config import load
from .constants import EXIT_ERROR
from .constants import EXIT_OK
from .constants import EXIT_VIOLATION
from .constants import MODE_UNIFORM_DENSITY
from .constants import MODE_VOLUME_FACTOR
from .constants import SUBCOMMANDS
from .conv_toeplitz import ConvolutionVector
from .conv_toeplitz import alpha_star
from .conv_toeplitz import extended_sites
from .conv_toeplitz import neumann_inverse_bound
from .conv_toeplitz import norm_growth_probe
from .disorder import sample_omega
from .hamiltonian import BoxGeometry
from .hamiltonian import alloy_potential
from .hamiltonian import assemble
from .initial_scale import InitialScaleConfig
from .initial_scale import TailRow
from .initial_scale import eps_u_threshold
from .initial_scale import run_tails
from .initial_scale import two_scale_eps_threshold
from .initial_scale import two_scale_probe
from .reporting import RunManifest
from .reporting import write_csv_file
from .spectral import spectral_averaging_check
from .wegner import Experiment
from .wegner import WegnerConfig
from .wegner import WegnerRow
from .wegner import default_energy_range
from .wegner import dos_estimate
from .wegner import energy_grid
from .wegner import free_lattice_dos
from .wegner import h2_probability_check
from .wegner import ids_estimate
from .wegner import lipschitz_check
from .wegner import verify_wegner

log = logging.getLogger(__name__)

WORKERS_ENV = 'WEGNERLAB_WORKERS'
LEVEL_ERROR = 'error'
LEVEL_WARNING = 'warning'

Diagnostic = collections.namedtuple('Diagnostic', ['level', 'path', 'message'])


def _section(data, key):
    value = data.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigurationError('must be an object.', path=key)
    return value


def _write(manifest, out, name, header, rows):
    path = write_csv_file(os.path.join(out, '%s.csv' % name), header, rows)
    manifest.add_output(path)
    return path


def run_wegner(data, out, manifest, workers=1):
    config = WegnerConfig.from_dict(data)
    experiment = Experiment(config, workers=workers)
    report = verify_wegner(config, experiment)

    header = WegnerRow.FIELDS + ('reference_bound', 'continuum_constant', 'config_hash')
    _write(manifest, out, 'wegner', header, [
        row.values() + [row.reference_bound, row.continuum_constant, report.hash] for row in report.rows])
    manifest.samples = config.samples * len(config.sides)
    manifest.summary['cells'] = len(report.rows)
    manifest.summary['violations'] = len(report.violations)

    status = EXIT_OK if report.passed else EXIT_VIOLATION
    etas = config.h2.get('etas')
    if etas:
        energies = config.h2.get('energies', config.energies)
        rows = []
        for side in config.sides:
            for energy in energies:
                for eta in etas:
                    result = h2_probability_check(config, float(energy), float(eta), side, experiment)
                    rows.append([side, energy, eta, config.samples, result.p_hat, result.se, result.bound,
                                 result.passed, report.hash])
                    if not result.passed:
                        status = EXIT_VIOLATION
        _write(manifest, out, 'h2', ('l', 'E', 'eta', 'M', 'p_hat', 'se', 'bound', 'pass', 'config_hash'),
               rows)
    return status


def _grid(config, section):
    lower, upper = default_energy_range(config)
    lower = float(section.get('e_min', lower))
    upper = float(section.get('e_max', upper))
    return energy_grid(lower, upper, float(section.get('spacing', 0.05)))


def _side(config, section, name):
    if 'side' in section:
        return int(section['side'])
    if config.sides:
        return config.sides[0]
    raise ConfigurationError('is required for this experiment.', path='%s.side' % name)


def run_ids(data, out, manifest, workers=1):
    config = WegnerConfig.from_dict(data)
    section = config.ids
    side = _side(config, section, 'ids')
    experiment = Experiment(config, workers=workers)
    curve = ids_estimate(config, _grid(config, section), side, experiment)
    _write(manifest, out, 'ids', ('l', 'E', 'ids', 'se', 'lower', 'upper', 'config_hash'),
           ([side] + list(row) + [experiment.hash] for row in curve.rows()))
    manifest.samples = config.samples

    if not section.get('lipschitz', True):
        return EXIT_OK
    if config.constant_mode in (MODE_VOLUME_FACTOR, MODE_UNIFORM_DENSITY):
        log.warning('No Lipschitz check in %s mode.', config.constant_mode)
        return EXIT_OK

    _bound, constant, _reference = experiment.bound(side, 1.0)
    quotient, passed = lipschitz_check(curve, constant, config.constant_mode)
    manifest.summary.update({'max_quotient': quotient, 'constant': constant, 'lipschitz': passed})
    log.info('Largest IDS difference quotient %r, constant %r', quotient, constant)
    return EXIT_OK if passed else EXIT_VIOLATION


def run_dos(data, out, manifest, workers=1):
    config = WegnerConfig.from_dict(data)
    section = config.dos
    side = _side(config, section, 'dos')
    curve = ids_estimate(config, _grid(config, section), side, Experiment(config, workers=workers))
    rows = dos_estimate(curve)
    free = config.model.d == 1

    _write(manifest, out, 'dos', ('l', 'E', 'dos', 'se', 'free_dos', 'config_hash'), (
        [side, e, value, error, free_lattice_dos(e) if free else None, config.config_hash]
        for e, value, error in rows))
    manifest.samples = config.samples

    if 'reference_energy' in section and rows:
        energy = float(section['reference_energy'])
        e, value, _error = min(rows, key=lambda r: abs(r[0] - energy))
        reference = free_lattice_dos(e)
        manifest.summary['reference'] = {'E': e, 'dos': value, 'free_dos': reference}
        if reference > 0:
            log.info('E=%r: DOS %r, free lattice %r (relative error %.3f)', e, value, reference,
                     abs(value - reference) / reference)
    return EXIT_OK


def load_alpha(path):
    """Load a convolution vector file, either the bare vector or a document with an ``alpha`` key."""
    data = load(path)
    if 'alpha' in data:
        data = data['alpha']
    return ConvolutionVector.from_json(data)


def run_toeplitz(data, out, manifest, alpha=None, sides=None, dimension=None):
    section = _section(data, 'toeplitz')
    if alpha is None:
        model = _section(data, 'model')
        if 'alpha' not in model:
            raise ConfigurationError('is required for this experiment.', path='model.alpha')
        alpha = ConvolutionVector.from_json(model['alpha'], path='model.alpha')
    sides = sides or [int(s) for s in section.get('sides', [])]
    if not sides:
        raise ConfigurationError('is required for this experiment.', path='toeplitz.sides')
    dimension = dimension or section.get('d') or alpha.d
    if dimension != alpha.d:
        raise ConfigurationError('alpha has dimension %s, boxes have %s.' % (alpha.d, dimension),
                                 path='toeplitz.d')

    table = norm_growth_probe(alpha, sides, dimension)
    if not data:
        manifest.config_hash = config_hash(alpha.to_json())

    try:
        certificate = neumann_inverse_bound(alpha)
    except NotCertifiableError:
        certificate = None
        log.info('alpha* = %r >= |alpha_0|, no certificate.', alpha_star(alpha))

    rows = [(side, size, norm, certificate, manifest.config_hash) for side, size, norm in table]
    _write(manifest, out, 'toeplitz', ('l', 'size', 'norm', 'certificate', 'config_hash'), rows)
    manifest.summary.update({'slope_size': table.slope_size, 'slope_side': table.slope_side})
    log.info('Growth exponents: %r against |Lambda+|, %r against l', table.slope_size, table.slope_side)

    if certificate is not None and any(norm > certificate * (1 + 1e-8) for _l, _s, norm in table):
        log.error('A truncated inverse exceeds the Neumann series bound %r.', certificate)
        return EXIT_VIOLATION
    return EXIT_OK


def run_averaging(data, out, manifest, workers=1):
    config = WegnerConfig.from_dict(data)
    section = config.raw.get('averaging') or {}
    systems = int(section.get('systems', 50))
    max_size = int(section.get('max_size', 8))
    interval = section.get('interval', [0.5, 1.5])
    points = int(section.get('quadrature_points', 8))
    if max_size < 1 or len(interval) != 2 or not interval[0] <= interval[1]:
        raise ConfigurationError('needs max_size >= 1 and a sorted interval.', path='averaging')

    model = config.model
    rows, status = [], EXIT_OK
    for system in range(systems):
        box = BoxGeometry(model.d, 1 + system % max_size, model.bc)
        sample = sample_omega(model.density, extended_sites(box, model.alpha), config.seed, system)
        hamiltonian = assemble(box, model.v0, alloy_potential(model.alpha, sample, box))
        site = system % box.volume
        try:
            lhs, bound = spectral_averaging_check(hamiltonian, site, interval, model.density,
                                                  quadrature_points=points)
            passed = True
        except TheoremViolation as e:
            log.error('System %s: %s', system, e)
            lhs, bound, passed = None, (interval[1] - interval[0]) * model.density.sup_norm(), False
            status = EXIT_VIOLATION
        rows.append([system, box.volume, site, lhs, bound, passed, config.config_hash])

    header = ('system', 'size', 'site', 'lhs', 'bound', 'pass', 'config_hash')
    _write(manifest, out, 'averaging', header, rows)
    manifest.samples = systems
    return status


def run_tails_command(data, out, manifest, workers=1):
    config = InitialScaleConfig.from_dict(data)
    report = run_tails(config, workers=workers)
    _write(manifest, out, 'tails', TailRow.FIELDS + ('config_hash', ),
           (row.values() + [report.hash] for row in report.rows))
    manifest.samples = config.samples * len(config.sides)
    manifest.summary.update({
        'c_hat': report.fit.c_hat if report.fit is not None else None,
        'monotone': report.fit.monotone if report.fit is not None else None,
        'violations': report.violations,
        'bracketing_violations': report.bracketing_violations,
        'asserted_sides': sorted(report.asserted),
    })
    return EXIT_OK if report.passed else EXIT_VIOLATION


def run_two_scale(data, out, manifest, workers=1):
    config = InitialScaleConfig.from_dict(data)
    if config.L is None or config.zeta is None:
        raise ConfigurationError('L and zeta are required for this experiment.', path='two_scale')
    result = two_scale_probe(config.spec, config.density, config.L, config.zeta, config.beta,
                             config.two_scale_samples, config.seed, solver=config.solver, workers=workers)
    header = ('L', 'l', 'zeta', 'beta', 'eps_u', 'M', 'p_direct', 'se_direct', 'p_sub', 'se_sub',
              'union_bound', 'decoupling_violations', 'eps_inside', 'pass', 'config_hash')
    _write(manifest, out, 'two_scale', header, [[
        result.L, result.l, result.zeta, result.beta, config.spec.eps_u, result.M, result.p_direct,
        result.se_direct, result.p_sub, result.se_sub, result.union_bound, result.decoupling_violations,
        result.eps_inside, result.passed, config.config_hash,
    ]])
    manifest.samples = result.M
    return EXIT_OK if result.passed else EXIT_VIOLATION


DRIVERS = {
    'wegner': run_wegner,
    'ids': run_ids,
    'dos': run_dos,
    'averaging': run_averaging,
    'tails': run_tails_command,
    'two-scale': run_two_scale,
}


def workers_from_env(workers=None):
    if workers is not None:
        return workers
    value = os.environ.get(WORKERS_ENV)
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        raise ConfigurationError('%s must be an integer, got %r.' % (WORKERS_ENV, value))


def run(subcommand, config_path=None, out='.', overrides=None, seed=None, workers=None, alpha=None,
        sides=None, dimension=None):
    """Run a subcommand.

    :param  subcommand: One of :py:data:`~wegnerlab.constants.SUBCOMMANDS`.
    :param config_path: Path of the configuration file. Only ``toeplitz`` works without one.
    :param         out: The output directory, created if necessary.
    :param   overrides: A list of ``KEY=VALUE`` strings.
    :param        seed: Replaces the seed of the configuration.
    :return: A tuple ``(status, manifest)``.
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigurationError('Unknown subcommand %r.' % subcommand)

    data = load(config_path) if config_path else {}
    data = apply_overrides(data, overrides)
    if seed is not None:
        data['seed'] = seed

    os.makedirs(out, exist_ok=True)
    digest = config_hash(data)
    manifest = RunManifest(subcommand, digest, data.get('seed'))
    log.info('%s: config hash %s', subcommand, digest)

    try:
        solvers.configure(data.get('solvers'))
        if subcommand == 'toeplitz':
            status = run_toeplitz(data, out, manifest, alpha=alpha, sides=sides, dimension=dimension)
        else:
            if not config_path:
                raise ConfigurationError('%s requires --config.' % subcommand)
            status = DRIVERS[subcommand](data, out, manifest, workers=workers_from_env(workers))
    except TheoremViolation as e:
        log.error('%s', e)
        status = EXIT_VIOLATION
    except WegnerLabError as e:
        log.error('%s', e)
        status = EXIT_ERROR

    manifest.finish(status)
    manifest.write(out)
    return status, manifest


def _wegner_diagnostics(data):
    diagnostics = []
    try:
        config = WegnerConfig.from_dict(data)
    except ConfigurationError as e:
        return [Diagnostic(LEVEL_ERROR, e.path or '', e.message)]

    ids = data.get('ids')
    if isinstance(ids, dict) and ids.get('lipschitz', False) and config.constant_mode in (
            MODE_VOLUME_FACTOR, MODE_UNIFORM_DENSITY):
        diagnostics.append(Diagnostic(
            LEVEL_ERROR, 'ids.lipschitz',
            'the Lipschitz check does not apply in %s mode.' % config.constant_mode))
    if config.constant_mode == MODE_VOLUME_FACTOR and alpha_star(config.model.alpha) < abs(
            config.model.alpha.alpha0):
        diagnostics.append(Diagnostic(
            LEVEL_WARNING, 'constant_mode',
            'alpha is certifiable, the certified mode gives a sharper bound.'))
    return diagnostics


def _initial_scale_diagnostics(data):
    try:
        config = InitialScaleConfig.from_dict(data)
    except NonPositiveMeanError as e:
        return [Diagnostic(LEVEL_ERROR, 'eps_u', str(e))]
    except ConfigurationError as e:
        return [Diagnostic(LEVEL_ERROR, e.path or '', e.message)]

    diagnostics = []
    spec = config.spec
    energies = [config.energy_for(side) for side in config.sides] if config.sides else [config.energy]
    for energy in sorted(set(e for e in energies if e is not None)):
        threshold = eps_u_threshold(spec, energy, config.density)
        if spec.eps_u > threshold:
            diagnostics.append(Diagnostic(
                LEVEL_WARNING, 'eps_u',
                'eps_u = %r exceeds E / (8 omega_+ N) = %r at E = %r.' % (spec.eps_u, threshold, energy)))
    if config.L is not None and config.zeta is not None:
        side = int(math.floor(config.L ** (1 - config.zeta / 2) * config.beta ** -0.5 - 1))
        if side < 2:
            diagnostics.append(Diagnostic(LEVEL_ERROR, 'L', 'the subcube side %s is degenerate.' % side))
        else:
            omega_plus = config.density.support()[1]
            threshold = two_scale_eps_threshold(spec, omega_plus, config.beta, min(side, config.L))
            if spec.eps_u > threshold:
                diagnostics.append(Diagnostic(
                    LEVEL_WARNING, 'eps_u', 'eps_u = %r exceeds the two scale threshold %r.' % (
                        spec.eps_u, threshold)))
    return diagnostics


def validate(path, overrides=None):
    """Check a configuration without running anything.

    :return: A list of :py:data:`Diagnostic` tuples. An empty list means the configuration is runnable.
    :raises OSError: If the file cannot be read.
    """
    try:
        data = apply_overrides(load(path), overrides)
    except ConfigurationError as e:
        return [Diagnostic(LEVEL_ERROR, e.path or '', e.message)]

    diagnostics = []
    try:
        solvers.configure(data.get('solvers'))
    except WegnerLabError as e:
        diagnostics.append(Diagnostic(LEVEL_ERROR, 'solvers', str(e)))

    model = data.get('model')
    if isinstance(model, dict) and 'alpha' in model:
        diagnostics += _wegner_diagnostics(data)
    if 'u_plus' in data:
        diagnostics += _initial_scale_diagnostics(data)
    if not diagnostics and not (isinstance(model, dict) and 'alpha' in model) and 'u_plus' not in data:
        diagnostics.append(Diagnostic(LEVEL_ERROR, 'model', 'neither model.alpha nor u_plus is configured.'))
    return diagnostics


def _int_list(value):
    try:
        return [int(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected a comma separated list of integers: %r' % value)


def _u64(value):
    value = int(value)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError('seed must be an unsigned 64 bit integer.')
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog='wegnerlab', description="Numerical checks of Wegner estimates.")
    parser.add_argument('-v', '--verbose', action='store_true', default=False, help="Log debug messages.")
    subparsers = parser.add_subparsers(help='commands', dest='command')

    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help='Run the %s experiment.' % name)
        sub.add_argument('--config', metavar='PATH', required=name != 'toeplitz',
                         help="JSON or YAML configuration file.")
        sub.add_argument('--out', metavar='DIR', default='.', help="Output directory (default: %(default)s).")
        sub.add_argument('--seed', type=_u64, help="Replace the seed of the configuration.")
        sub.add_argument('--workers', type=int, metavar='N',
                         help="Number of worker threads (default: $%s or 1)." % WORKERS_ENV)
        sub.add_argument('--override', action='append', default=[], metavar='KEY=VALUE',
                         help="Override a dotted configuration path, may be given multiple times.")
        if name == 'toeplitz':
            sub.add_argument('--alpha', metavar='PATH', help="Convolution vector file.")
            sub.add_argument('--sides', type=_int_list, help="Comma separated box sides, e.g. 4,8,16.")
            sub.add_argument('--dimension', type=int, help="Box dimension (default: dimension of alpha).")

    validate_parser = subparsers.add_parser('validate', help='Check a configuration file.')
    validate_parser.add_argument('config', metavar='PATH', help="JSON or YAML configuration file.")
    validate_parser.add_argument('--override', action='append', default=[], metavar='KEY=VALUE')
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)-8s %(message)s')

    if args.command is None:
        parser.print_usage()
        return EXIT_ERROR

    if args.command == 'validate':
        try:
            diagnostics = validate(args.config, args.override)
        except OSError as e:
            log.error('%s', e)
            return EXIT_ERROR
        for diagnostic in diagnostics:
            print('%s: %s: %s' % diagnostic)
        return EXIT_ERROR if any(d.level == LEVEL_ERROR for d in diagnostics) else EXIT_OK

    alpha = None
    try:
        if getattr(args, 'alpha', None):
            alpha = load_alpha(args.alpha)
        status, _manifest = run(args.command, args.config, args.out, args.override, seed=args.seed,
                                workers=args.workers, alpha=alpha, sides=getattr(args, 'sides', None),
                                dimension=getattr(args, 'dimension', None))
    except (WegnerLabError, OSError) as e:
        log.error('%s', e)
        return EXIT_ERROR
    return status


if __name__ == '__main__':
    sys.exit(main())
