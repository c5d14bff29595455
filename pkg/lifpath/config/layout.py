# Copyright (C) 2019, 2020, 2021, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import yaml
from pathlib import Path

from .schema import ConfigAccessor, ConfigSchema


class ConfigLayout(ConfigAccessor):

    '''
    The root of a lifpath configuration.  Values come from schema defaults, then from YAML files loaded with :meth:`load_yaml`, then from explicit attribute assignment::

        layout = ConfigLayout()
        layout.load_yaml(open("run.yml"))
        layout.infer.mode = "moving"

    Values are resolved when read, so ``{key}`` substitutions in strings see the final overrides.
    '''

    def __init__(self):
        self._overrides = {}
        super().__init__(self, "")

    def _load(self, d, into, prefix):
        for k, v in d.items():
            full_key = prefix + k
            if full_key in ConfigSchema._schemas:
                if not isinstance(v, dict):
                    raise ValueError("{} should be a dictionary".format(full_key))
                self._load(v, ConfigSchema._schemas[full_key], full_key + ".")
            else:
                if k not in into:
                    raise AttributeError("{} is not a config attribute".format(full_key))
                if isinstance(v, dict):
                    raise ValueError(f"{full_key} cannot be set to a dictionary")
                self._overrides[full_key] = v

    def load_yaml(self, y, *, path=None):
        '''
        Load overrides from *y*, an open file or a YAML string.

        :param path: Where relative ``include`` entries are resolved from when *y* has no ``name``.
        '''
        if path:
            base_path = Path(path).parent
        else:
            base_path = Path(getattr(y, 'name', '.')).parent
        d = yaml.safe_load(y)
        if d is None:
            return
        if not isinstance(d, dict):
            raise ValueError('configuration must be a mapping')
        if 'include' in d:
            for include in d['include']:
                include = base_path.joinpath(include)
                with include.open("rt") as include_file:
                    self.load_yaml(include_file)
            del d['include']
        self._load(d, self._schema, "")

    def copy(self):
        "A new layout with the same overrides"
        result = ConfigLayout()
        result._overrides.update(self._overrides)
        return result


__all__ = ['ConfigLayout']
