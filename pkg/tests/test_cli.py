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

import csv
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

from wegnerlab import solvers
from wegnerlab.base import ConfigurationError
from wegnerlab.cli import LEVEL_ERROR
from wegnerlab.cli import LEVEL_WARNING
from wegnerlab.cli import WORKERS_ENV
from wegnerlab.cli import load_alpha
from wegnerlab.cli import main
from wegnerlab.cli import run
from wegnerlab.cli import validate
from wegnerlab.cli import workers_from_env
from wegnerlab.config import config_hash
from wegnerlab.constants import EXIT_ERROR
from wegnerlab.constants import EXIT_OK

from .utils import config_path

SMALL_WEGNER = ['samples=100', 'sides=[16]', 'h2.etas=[0.025]']


class CLITestCase(unittest.TestCase):
    def setUp(self):
        self.out = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.out)
        solvers.configure()

    def read(self, name):
        with open(os.path.join(self.out, name), newline='') as stream:
            return list(csv.DictReader(stream))

    def read_manifest(self, subcommand):
        with open(os.path.join(self.out, '%s-manifest.json' % subcommand)) as stream:
            return json.load(stream)


class RunWegnerTestCase(CLITestCase):
    def test_certified(self):
        status, manifest = run('wegner', config_path('certified_d1.json'), self.out, SMALL_WEGNER)
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(manifest.outputs, ['wegner.csv', 'h2.csv'])

        rows = self.read('wegner.csv')
        self.assertEqual(len(rows), 9)
        self.assertTrue(all(row['pass'] == 'true' for row in rows))
        self.assertTrue(all(row['config_hash'] == manifest.config_hash for row in rows))
        self.assertEqual(len(self.read('h2.csv')), 3)

        data = self.read_manifest('wegner')
        self.assertEqual(data['status'], EXIT_OK)
        self.assertEqual(data['seed'], 20240601)
        self.assertEqual(data['summary'], {'cells': 9, 'violations': 0})
        self.assertEqual(data['samples'], 100)

    def test_determinism(self):
        run('wegner', config_path('certified_d1.json'), self.out, SMALL_WEGNER, workers=1)
        with open(os.path.join(self.out, 'wegner.csv')) as stream:
            first = stream.read()
        _status, manifest = run('wegner', config_path('certified_d1.json'), self.out, SMALL_WEGNER, workers=3)
        with open(os.path.join(self.out, 'wegner.csv')) as stream:
            self.assertEqual(stream.read(), first)

        _status, other = run('wegner', config_path('certified_d1.json'), self.out, SMALL_WEGNER, seed=1)
        self.assertNotEqual(other.config_hash, manifest.config_hash)

    def test_modes(self):
        small = ['samples=100', 'sides=[16]']
        status, _manifest = run('wegner', config_path('uniform_d1.json'), self.out, small)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(all(row['constant'] == '1.0' for row in self.read('wegner.csv')))

        status, _manifest = run('wegner', config_path('volume_factor_d1.json'), self.out, small)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(all(row['reference_bound'] for row in self.read('wegner.csv')))

    def test_errors(self):
        status, manifest = run('wegner', config_path('certified_d1.json'), self.out, ['samples=10'])
        self.assertEqual(status, EXIT_ERROR)
        self.assertEqual(self.read_manifest('wegner')['status'], EXIT_ERROR)
        self.assertEqual(manifest.outputs, [])

        status, _manifest = run('wegner', None, self.out)
        self.assertEqual(status, EXIT_ERROR)

        with self.assertRaisesRegex(ConfigurationError, 'Unknown subcommand'):
            run('anderson', config_path('certified_d1.json'), self.out)

    def test_invalid_solver(self):
        overrides = ['solvers.broken={tol: 1}']
        status, manifest = run('wegner', config_path('certified_d1.json'), self.out, overrides)
        self.assertEqual(status, EXIT_ERROR)
        self.assertEqual(self.read_manifest('wegner')['status'], EXIT_ERROR)
        self.assertEqual(manifest.outputs, [])



class RunIDSTestCase(CLITestCase):
    def test_certified(self):
        overrides = ['samples=100', 'ids.side=16', 'ids.spacing=0.1']
        status, manifest = run('ids', config_path('ids_certified.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(manifest.summary['lipschitz'])
        self.assertAlmostEqual(manifest.summary['constant'], 4 / 0.6)

        rows = self.read('ids.csv')
        self.assertEqual(len(rows), 56)
        self.assertEqual(rows[0]['E'], '-0.5')
        self.assertEqual(rows[-1]['ids'], '1.0')

    def test_uniform(self):
        with self.assertLogs('wegnerlab.cli', level='WARNING') as logs:
            overrides = ['samples=100', 'sides=[8]']
            status, manifest = run('ids', config_path('uniform_d1.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        self.assertNotIn('lipschitz', manifest.summary)
        self.assertEqual(logs.output, ['WARNING:wegnerlab.cli:No Lipschitz check in uniform_density mode.'])


class RunDOSTestCase(CLITestCase):
    def test_free(self):
        status, manifest = run('dos', config_path('dos_free.json'), self.out)
        self.assertEqual(status, EXIT_OK)
        reference = manifest.summary['reference']
        self.assertEqual(reference['E'], 2.0)
        self.assertLess(abs(reference['dos'] - reference['free_dos']), 0.1 * reference['free_dos'])

        rows = self.read('dos.csv')
        self.assertEqual(len(rows), 19)
        self.assertEqual(rows[0]['E'], '0.2')


class RunToeplitzTestCase(CLITestCase):
    def test_alpha_file(self):
        alpha = load_alpha(config_path('step.json'))
        status, manifest = run('toeplitz', None, self.out, alpha=alpha, sides=[4, 8, 16])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(manifest.config_hash, config_hash(alpha.to_json()))

        rows = self.read('toeplitz.csv')
        self.assertEqual([row['l'] for row in rows], ['4', '8', '16'])
        self.assertEqual(rows[0]['certificate'], '')

    def test_config(self):
        overrides = ['toeplitz.sides=[4, 8]']
        status, _manifest = run('toeplitz', config_path('certified_d1.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        rows = self.read('toeplitz.csv')
        self.assertEqual(len(rows), 2)
        self.assertTrue(all(float(row['norm']) <= float(row['certificate']) for row in rows))

    def test_errors(self):
        alpha = load_alpha(config_path('step.json'))
        status, _manifest = run('toeplitz', None, self.out, alpha=alpha, sides=[4], dimension=2)
        self.assertEqual(status, EXIT_ERROR)
        status, _manifest = run('toeplitz', None, self.out, alpha=alpha)
        self.assertEqual(status, EXIT_ERROR)
        status, _manifest = run('toeplitz', None, self.out, sides=[4])
        self.assertEqual(status, EXIT_ERROR)


class RunAveragingTestCase(CLITestCase):
    def test_averaging(self):
        status, manifest = run('averaging', config_path('averaging.json'), self.out, ['averaging.systems=12'])
        self.assertEqual(status, EXIT_OK)
        rows = self.read('averaging.csv')
        self.assertEqual(len(rows), 12)
        self.assertEqual([row['size'] for row in rows[:9]], [str(size) for size in range(1, 9)] + ['1'])
        self.assertTrue(all(float(row['lhs']) <= float(row['bound']) + 1e-4 for row in rows))
        self.assertEqual(manifest.samples, 12)

    def test_uniform(self):
        overrides = ['averaging.systems=6', 'model.density={kind: uniform, omega_plus: 2.0}',
                     'constant_mode=uniform_density']
        status, _manifest = run('averaging', config_path('averaging.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(all(row['bound'] == '0.5' for row in self.read('averaging.csv')))


class RunInitialScaleTestCase(CLITestCase):
    def test_tails(self):
        overrides = ['tails.sides=[4, 6, 8]', 'tails.samples=200']
        status, manifest = run('tails', config_path('tails_d1.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        self.assertEqual([row['l'] for row in self.read('tails.csv')], ['4', '6', '8'])
        self.assertEqual(manifest.summary['bracketing_violations'], 0)
        self.assertEqual(manifest.summary['asserted_sides'], [])

    def test_two_scale(self):
        overrides = ['two_scale.samples=100']
        status, manifest = run('two-scale', config_path('two_scale_d1.json'), self.out, overrides)
        self.assertEqual(status, EXIT_OK)
        (row, ) = self.read('two_scale.csv')
        self.assertEqual(row['l'], '15')
        self.assertEqual(row['pass'], 'true')
        self.assertEqual(manifest.samples, 100)

    def test_missing_scale(self):
        status, _manifest = run('two-scale', config_path('tails_d1.json'), self.out)
        self.assertEqual(status, EXIT_ERROR)


class WorkersTestCase(unittest.TestCase):
    def test_env(self):
        with mock.patch.dict(os.environ, {WORKERS_ENV: '3'}):
            self.assertEqual(workers_from_env(), 3)
            self.assertEqual(workers_from_env(2), 2)
        with mock.patch.dict(os.environ, {WORKERS_ENV: '0'}):
            self.assertEqual(workers_from_env(), 1)
        with mock.patch.dict(os.environ, {WORKERS_ENV: 'many'}):
            with self.assertRaisesRegex(ConfigurationError, 'must be an integer'):
                workers_from_env()
        with mock.patch.dict(os.environ, clear=True):
            self.assertEqual(workers_from_env(), 1)


class ValidateTestCase(unittest.TestCase):
    def tearDown(self):
        solvers.configure()

    def test_shipped(self):
        for name in ('certified_d1.json', 'uniform_d1.json', 'volume_factor_d1.json', 'ids_certified.json',
                     'dos_free.json', 'averaging.json', 'tails_d1.json', 'two_scale_d1.json'):
            self.assertEqual(validate(config_path(name)), [], name)

    def test_wegner(self):
        (diagnostic, ) = validate(config_path('uniform_d1.json'), ['ids.lipschitz=true'])
        self.assertEqual(diagnostic.level, LEVEL_ERROR)
        self.assertEqual(diagnostic.path, 'ids.lipschitz')

        (diagnostic, ) = validate(config_path('certified_d1.json'), ['constant_mode=volume_factor'])
        self.assertEqual(diagnostic.level, LEVEL_WARNING)
        self.assertEqual(diagnostic.path, 'constant_mode')

        (diagnostic, ) = validate(config_path('certified_d1.json'), ['samples=10'])
        self.assertEqual(diagnostic, (LEVEL_ERROR, 'samples', 'at least 100 samples are required.'))

        (diagnostic, ) = validate(config_path('certified_d1.json'), ['solvers.fast={tol: 1}'])
        self.assertEqual(diagnostic.path, 'solvers')

    def test_initial_scale(self):
        minus = 'u_minus={d: 1, entries: [{k: [1], alpha: 1.0}]}'
        (diagnostic, ) = validate(config_path('tails_d1.json'), [minus, 'eps_u=0.5'])
        self.assertEqual(diagnostic.level, LEVEL_WARNING)
        self.assertEqual(diagnostic.path, 'eps_u')

        (diagnostic, ) = validate(config_path('tails_d1.json'), [minus, 'eps_u=1.0'])
        self.assertEqual(diagnostic.level, LEVEL_ERROR)
        self.assertEqual(diagnostic.path, 'eps_u')

        (diagnostic, ) = validate(config_path('two_scale_d1.json'), ['L=4', 'zeta=0.9', 'beta=10'])
        self.assertEqual((diagnostic.level, diagnostic.path), (LEVEL_ERROR, 'L'))

    def test_nothing_configured(self):
        (diagnostic, ) = validate(config_path('step.json'))
        self.assertEqual((diagnostic.level, diagnostic.path), (LEVEL_ERROR, 'model'))


class MainTestCase(unittest.TestCase):
    def setUp(self):
        self.out = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.out)
        solvers.configure()

    def test_validate(self):
        with mock.patch('builtins.print') as printed:
            self.assertEqual(main(['validate', config_path('certified_d1.json')]), EXIT_OK)
        printed.assert_not_called()

        with mock.patch('builtins.print') as printed:
            status = main(['validate', config_path('certified_d1.json'), '--override', 'samples=10'])
        self.assertEqual(status, EXIT_ERROR)
        printed.assert_called_once_with('error: samples: at least 100 samples are required.')

        self.assertEqual(main(['validate', os.path.join(self.out, 'missing.json')]), EXIT_ERROR)

    def test_toeplitz(self):
        argv = ['toeplitz', '--alpha', config_path('step.json'), '--sides', '4,8', '--out', self.out]
        self.assertEqual(main(argv), EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.out, 'toeplitz-manifest.json')))

    def test_errors(self):
        with mock.patch('sys.stdout'):
            self.assertEqual(main([]), EXIT_ERROR)
        argv = ['wegner', '--config', os.path.join(self.out, 'missing.json'), '--out', self.out]
        self.assertEqual(main(argv), EXIT_ERROR)

        with mock.patch('sys.stderr'):
            with self.assertRaises(SystemExit):
                main(['toeplitz', '--sides', 'four'])
            with self.assertRaises(SystemExit):
                main(['wegner', '--config', config_path('certified_d1.json'), '--seed', '-1'])
