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
import os
import re

NUMPY_SCALAR = re.compile(r'np\.(?:float|int|uint|bool_?)\d*\(([^()]*)\)')

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config')


def config_path(name):
    """Path of a shipped configuration file."""
    return os.path.join(CONFIG_DIR, name)


class CompatDoctestChecker(doctest.OutputChecker):
    """OutputChecker that ignores the numpy>=2 repr of scalars, e.g. ``np.float64(0.4)``."""

    def check_output(self, want, got, optionflags):
        got = NUMPY_SCALAR.sub(r'\1', got)
        return doctest.OutputChecker.check_output(self, want, got, optionflags)
