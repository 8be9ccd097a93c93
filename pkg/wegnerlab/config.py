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

"""Loading configuration files, applying command line overrides and hashing the result."""

import copy
import hashlib
import json
import logging

import yaml

from .base import ConfigurationError

log = logging.getLogger(__name__)


def load(path):
    """Load a JSON or YAML configuration file.

    :raises ConfigurationError: If the file cannot be parsed or is not a mapping.
    """
    with open(path, encoding='utf-8') as stream:
        try:
            data = yaml.load(stream, Loader=yaml.SafeLoader)
        except yaml.YAMLError as e:
            raise ConfigurationError('%s: cannot parse configuration: %s' % (path, e))

    if not isinstance(data, dict):
        raise ConfigurationError('%s: configuration must be a mapping.' % path)
    log.debug('Loaded configuration from %s', path)
    return data


def parse_override(override):
    """Split ``KEY=VALUE`` into the dotted path and the YAML-parsed value.

    >>> parse_override('model.density.omega_plus=2')
    (['model', 'density', 'omega_plus'], 2)
    >>> parse_override('sides=[8, 16]')
    (['sides'], [8, 16])
    """
    if '=' not in override:
        raise ConfigurationError('Override %r is not of the form KEY=VALUE.' % override)
    key, value = override.split('=', 1)
    path = [part for part in key.strip().split('.') if part]
    if not path:
        raise ConfigurationError('Override %r has an empty key.' % override)
    try:
        value = yaml.load(value, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        raise ConfigurationError('Cannot parse value of override %r: %s' % (override, e))
    return path, value


def apply_overrides(data, overrides):
    """Return a copy of ``data`` with ``KEY=VALUE`` overrides applied.

    Intermediate mappings are created as needed. Numeric path components index into lists.
    """
    data = copy.deepcopy(data)
    for override in overrides or []:
        path, value = parse_override(override)
        node = data
        for depth, part in enumerate(path[:-1]):
            node = _child(node, part, '.'.join(path[:depth + 1]))
        _set(node, path[-1], value, '.'.join(path))
        log.debug('Override %s = %r', '.'.join(path), value)
    return data


def _child(node, part, dotted):
    if isinstance(node, list):
        try:
            return node[int(part)]
        except (ValueError, IndexError):
            raise ConfigurationError('no such list element.', path=dotted)
    if not isinstance(node, dict):
        raise ConfigurationError('cannot descend into a scalar.', path=dotted)
    return node.setdefault(part, {})


def _set(node, part, value, dotted):
    if isinstance(node, list):
        try:
            node[int(part)] = value
        except (ValueError, IndexError):
            raise ConfigurationError('no such list element.', path=dotted)
    elif isinstance(node, dict):
        node[part] = value
    else:
        raise ConfigurationError('cannot set a key on a scalar.', path=dotted)


def _numbers(value):
    # 2000 and 2000.0 must hash alike
    if isinstance(value, dict):
        return {k: _numbers(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_numbers(v) for v in value]
    if isinstance(value, float) and value.is_integer() and abs(value) < 2 ** 53:
        return int(value)
    return value


def canonical_json(data):
    """Serialize ``data`` with sorted keys and without whitespace.

    Integral floats are written as integers.

    >>> canonical_json({'b': 1, 'a': [0.5, 2.0]})
    '{"a":[0.5,2],"b":1}'
    """
    try:
        return json.dumps(_numbers(data), sort_keys=True, separators=(',', ':'), allow_nan=False,
                          ensure_ascii=False)
    except (TypeError, ValueError) as e:
        raise ConfigurationError('configuration cannot be serialized: %s' % e)


def config_hash(data):
    """SHA-256 hex digest of the canonical JSON of ``data``."""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()
