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

"""CSV output and run manifests."""

import csv
import json
import logging
import os
import time
from datetime import datetime

import pytz

from . import VERSION

log = logging.getLogger(__name__)


def format_value(value):
    """Format a value for CSV output.

    Floats use their shortest round-trip representation, so equal values always give equal text.

    >>> format_value(0.1), format_value(True), format_value(None), format_value(3)
    ('0.1', 'true', '', '3')
    """
    if value is None:
        return ''
    if hasattr(value, 'dtype'):  # numpy scalars, np.float64 is also a float
        value = value.item()
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(stream, header, rows):
    """Write a header row and data rows to an open text stream."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_value(v) for v in row])
        count += 1
    return count


def write_csv_file(path, header, rows):
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        count = write_csv(stream, header, rows)
    log.info('Wrote %s rows to %s', count, path)
    return path


class RunManifest(object):
    """Provenance of one command line run.

    :param subcommand: The subcommand that was run.
    :param config_hash: The hash of the effective configuration.
    :param       seed: The seed of the run.
    """

    def __init__(self, subcommand, config_hash=None, seed=None):
        self.subcommand = subcommand
        self.config_hash = config_hash
        self.seed = seed
        self.version = '.'.join(str(v) for v in VERSION)
        self.outputs = []
        self.samples = 0
        self.summary = {}
        self.status = None
        self.started = datetime.now(pytz.utc)
        self._clock = time.time()
        self.wall_time = None

    def add_output(self, path):
        self.outputs.append(os.path.basename(path))

    def finish(self, status):
        self.status = status
        self.wall_time = time.time() - self._clock

    def to_json(self):
        return {
            'subcommand': self.subcommand,
            'config_hash': self.config_hash,
            'version': self.version,
            'seed': self.seed,
            'outputs': {self.subcommand: list(self.outputs)},
            'samples': self.samples,
            'started': self.started.isoformat(),
            'wall_time': self.wall_time,
            'status': self.status,
            'summary': self.summary,
        }

    def write(self, directory):
        path = os.path.join(directory, '%s-manifest.json' % self.subcommand)
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump(self.to_json(), stream, indent=4, sort_keys=True, ensure_ascii=False)
            stream.write('\n')
        return path
