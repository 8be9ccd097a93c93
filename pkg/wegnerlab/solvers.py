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

"""Access to eigensolver backends by alias.

Solvers are configured in a settings dictionary mapping an alias to a dotted path of the solver class and its
keyword arguments::

    >>> SOLVERS['default']
    {'BACKEND': 'wegnerlab.dense.DenseSolver'}

Instances are created on first use and cached per thread, so no solver instance is ever shared between
concurrently running solves.
"""

import copy
import logging
from importlib import import_module
from threading import local

from .base import InvalidSolverError

log = logging.getLogger(__name__)

DEFAULT_SOLVER_ALIAS = 'default'
DEFAULT_SOLVERS = {
    'default': {
        'BACKEND': 'wegnerlab.dense.DenseSolver',
    },
    'sparse': {
        'BACKEND': 'wegnerlab.sparse.SparseSolver',
    },
    'reference': {
        'BACKEND': 'wegnerlab.reference.ReferenceSolver',
    },
}
SOLVERS = copy.deepcopy(DEFAULT_SOLVERS)

__all__ = [
    'configure', 'get_solver', 'solvers', 'DEFAULT_SOLVER_ALIAS', 'SOLVERS',
]


def _get_solver(alias, **kwargs):
    try:
        conf = SOLVERS[alias]
        params = conf.copy()
        params.update(kwargs)
        path = params.pop('BACKEND')

        mod_path, cls_name = path.rsplit('.', 1)
        mod = import_module(mod_path)
        solver_cls = getattr(mod, cls_name)
    except (KeyError, AttributeError, ImportError, ValueError) as e:
        raise InvalidSolverError("Could not find solver '%s': %s" % (alias, e))
    return solver_cls(**params)


class SolverHandler(object):
    """Manage access to solver instances.

    Ensures only one instance of each alias exists per thread.
    """
    def __init__(self):
        self._solvers = local()
        self._generation = 0

    def __getitem__(self, alias):
        cache = getattr(self._solvers, 'solvers', None)
        if cache is None or getattr(self._solvers, 'generation', None) != self._generation:
            cache = self._solvers.solvers = {}
            self._solvers.generation = self._generation

        if alias in cache:
            return cache[alias]

        if alias not in SOLVERS:
            raise InvalidSolverError("Could not find config for '%s' in SOLVERS" % alias)

        solver = _get_solver(alias)
        cache[alias] = solver
        return solver

    def reset(self):
        """Drop cached instances in all threads."""
        self._generation += 1

    def all(self):
        return getattr(self._solvers, 'solvers', {}).values()


solvers = SolverHandler()


def get_solver(alias=DEFAULT_SOLVER_ALIAS):
    """Get the solver instance configured for ``alias`` in the current thread."""
    return solvers[alias]


def configure(settings=None):
    """Replace the solver configuration.

    The aliases of the default configuration are always present unless ``settings`` overrides them.

    :param settings: A dict mapping aliases to solver configurations, e.g. the ``solvers`` key of a
                     configuration file.
    """
    SOLVERS.clear()
    SOLVERS.update(copy.deepcopy(DEFAULT_SOLVERS))
    for alias, conf in (settings or {}).items():
        if not isinstance(conf, dict) or 'BACKEND' not in conf:
            raise InvalidSolverError("Solver '%s' must define a BACKEND." % alias)
        SOLVERS[alias] = dict(conf)
    solvers.reset()
    log.debug('Configured solvers: %s', ', '.join(sorted(SOLVERS)))
