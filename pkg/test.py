#!/usr/bin/env python3
#
# This file is part of wegnerlab.
#
# wegnerlab is free software: you can redistribute it and/or modify it under the terms of the GNU General
# Public License as published by the Free Software Foundation, either version 3 of the License, or (at your
# option) any later version.
#
# wegnerlab is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the
# implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU General Public License
# for more details.
#
# You should have received a copy of the GNU General Public License along with wegnerlab.  If not, see
# <http://www.gnu.org/licenses/>.

import argparse
import json
import os
import subprocess
import sys
import time
import unittest
import warnings

import coverage

parser = argparse.ArgumentParser(description="Run the test-suite.")
subparsers = parser.add_subparsers(help='commands', dest='command')
subparsers.add_parser('test', help='Run the test suite.')
acceptance_parser = subparsers.add_parser('acceptance', help='Run all shipped configurations at full size.')
acceptance_parser.add_argument('--out', default=os.path.join('docs', '_build', 'acceptance'),
                               help="Output directory (default: %(default)s).")
acceptance_parser.add_argument('--workers', type=int, default=os.cpu_count() or 1,
                               help="Number of worker threads (default: %(default)s).")
subparsers.add_parser('code-quality', help='Test code quality using flake8 and isort.')
args = parser.parse_args()

ACCEPTANCE = [
    ('wegner', ['--config', os.path.join('config', 'certified_d1.json')]),
    ('wegner', ['--config', os.path.join('config', 'uniform_d1.json')]),
    ('wegner', ['--config', os.path.join('config', 'volume_factor_d1.json')]),
    ('ids', ['--config', os.path.join('config', 'ids_certified.json')]),
    ('dos', ['--config', os.path.join('config', 'dos_free.json')]),
    ('toeplitz', ['--alpha', os.path.join('config', 'step.json'), '--sides', '4,8,16,32,64']),
    ('toeplitz', ['--config', os.path.join('config', 'certified_d1.json'), '--override',
                  'toeplitz.sides=[4, 8, 16, 32, 64]']),
    ('averaging', ['--config', os.path.join('config', 'averaging.json')]),
    ('tails', ['--config', os.path.join('config', 'tails_d1.json')]),
    ('two-scale', ['--config', os.path.join('config', 'two_scale_d1.json')]),
]


def error(msg, status=1):
    print(msg)
    sys.exit(status)


def ok(msg='OK.'):
    print(msg)


def run_acceptance(subcommand, argv, out, workers):
    out = os.path.join(out, '%s-%s' % (subcommand, len(os.listdir(out)) if os.path.exists(out) else 0))
    cmd = [sys.executable, '-m', 'wegnerlab', subcommand, '--out', out, '--workers', str(workers)] + argv
    print('+ %s' % ' '.join(cmd))
    start = time.time()
    proc = subprocess.run(cmd)
    if proc.returncode != 0:
        error('%s exited with status %s.' % (subcommand, proc.returncode), status=proc.returncode)

    with open(os.path.join(out, '%s-manifest.json' % subcommand)) as stream:
        manifest = json.load(stream)
    ok('%s: %s in %.1fs, outputs: %s' % (subcommand, manifest['config_hash'][:12], time.time() - start,
                                         ', '.join(manifest['outputs'][subcommand])))


if args.command == 'code-quality':
    files = ['wegnerlab', 'setup.py', 'test.py', 'tests']
    isort = ['isort', '--check-only', '--diff', '-rc'] + files
    print(' '.join(isort))
    subprocess.run(isort, check=True)

    flake8 = ['flake8'] + files
    print(' '.join(flake8))
    subprocess.run(flake8, check=True)

    # every shipped configuration must validate without diagnostics
    from wegnerlab.cli import validate
    config_dir = 'config'
    for name in sorted(os.listdir(config_dir)):
        if not name.endswith('.json') or name == 'step.json':
            continue
        diagnostics = validate(os.path.join(config_dir, name))
        if diagnostics:
            error('%s: %s' % (name, '; '.join('%s: %s: %s' % d for d in diagnostics)))
    ok('All configurations validate.')
elif args.command == 'acceptance':
    os.makedirs(args.out, exist_ok=True)
    for subcommand, argv in ACCEPTANCE:
        run_acceptance(subcommand, argv, args.out, args.workers)
elif args.command == 'test':
    rootdir = os.path.dirname(os.path.realpath(__file__))
    report_dir = os.path.join(rootdir, 'docs', '_build', 'coverage')
    cov = coverage.Coverage(cover_pylib=False, branch=True, source=['wegnerlab'],
                            omit=['wegnerlab/__main__.py'])
    cov.start()

    warnings.filterwarnings("error", category=DeprecationWarning, module="wegnerlab")
    suite = unittest.defaultTestLoader.discover('tests', top_level_dir=rootdir)
    result = unittest.TextTestRunner(verbosity=1).run(suite)

    cov.stop()
    cov.save()
    total_coverage = cov.html_report(directory=report_dir)
    print('Test coverage: %.2f%%' % total_coverage)
    if not result.wasSuccessful():
        sys.exit(1)
else:
    parser.print_usage()
