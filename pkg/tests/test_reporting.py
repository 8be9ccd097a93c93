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

import doctest
import io
import json
import os
import tempfile
import unittest

from freezegun import freeze_time

from wegnerlab import pool
from wegnerlab.reporting import RunManifest
from wegnerlab.reporting import write_csv
from wegnerlab.reporting import write_csv_file

from .utils import CompatDoctestChecker


class CSVTestCase(unittest.TestCase):
    def test_write(self):
        stream = io.StringIO()
        count = write_csv(stream, ('l', 'E', 'pass', 'note'), [(16, 0.1, True, None), (32, 2.0, False, 'x')])
        self.assertEqual(count, 2)
        self.assertEqual(stream.getvalue(), 'l,E,pass,note\n16,0.1,true,\n32,2.0,false,x\n')

    def test_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_csv_file(os.path.join(directory, 'rows.csv'), ('a', ), [(1, ), (2, )])
            with open(path) as stream:
                self.assertEqual(stream.read(), 'a\n1\n2\n')


class RunManifestTestCase(unittest.TestCase):
    def test_manifest(self):
        with freeze_time('2024-06-01 12:00:00'):
            manifest = RunManifest('wegner', config_hash='abc', seed=7)
        manifest.add_output('/some/where/wegner.csv')
        manifest.samples = 2000
        manifest.finish(0)

        data = manifest.to_json()
        self.assertEqual(data['started'], '2024-06-01T12:00:00+00:00')
        self.assertEqual(data['outputs'], {'wegner': ['wegner.csv']})
        self.assertEqual(data['status'], 0)
        self.assertEqual(data['seed'], 7)
        self.assertEqual(data['config_hash'], 'abc')
        self.assertGreaterEqual(data['wall_time'], 0)

        with tempfile.TemporaryDirectory() as directory:
            path = manifest.write(directory)
            self.assertEqual(os.path.basename(path), 'wegner-manifest.json')
            with open(path) as stream:
                self.assertEqual(json.load(stream)['samples'], 2000)


class PoolTestCase(unittest.TestCase):
    def test_order(self):
        items = list(range(50))
        self.assertEqual(pool.map_ordered(lambda i: i * i, items), [i * i for i in items])
        self.assertEqual(pool.map_ordered(lambda i: i * i, items, workers=4), [i * i for i in items])
        self.assertEqual(pool.map_ordered(str, [], workers=4), [])


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite('wegnerlab.reporting', checker=CompatDoctestChecker()))
    return tests
