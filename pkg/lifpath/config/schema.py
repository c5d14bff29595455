# Copyright (C) 2019, 2020, 2022, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import dataclasses
import inspect
import typing
from pathlib import Path


class ConfigResolutionFailed(ValueError):

    def __init__(self, k, val):
        self.config_key = k
        self.config_val = val
        super().__init__(f'Resolution of {k} with value `{val}` failed')


@dataclasses.dataclass(frozen=True)
class ConfigItem:

    '''
    One key of a configuration schema.  *name* is the dotted key, for example ``infer.epsilon``.
    '''

    name: str
    type: type
    default: typing.Any = None

    def resolve(self, layout):
        "The value of this key under the overrides of *layout*, coerced to its type"
        value = layout._overrides.get(self.name, self.default)
        if value is None:
            return None
        try:
            if hasattr(self.type, 'coerce'):
                return self.type.coerce(value, layout)
            return self.type(value)
        except (TypeError, ValueError, KeyError, AttributeError):
            raise ConfigResolutionFailed(self.name, value) from None


def _item_type(name, declared):
    from .types import ConfigBool, ConfigString
    if not isinstance(declared, type):
        raise TypeError(f'{name} must be declared with a type, not {declared!r}')
    return {bool: ConfigBool, str: ConfigString}.get(declared, declared)


class ConfigSchemaMeta(type):

    #: section name (``""`` for the root) to ``{key: ConfigItem}``
    _schemas = {}

    def __new__(mcls, name, bases, namespace, *, prefix, **kwargs):
        cls = super().__new__(mcls, name, bases, namespace, **kwargs)
        section = prefix.rstrip('.')
        cls._schema = mcls._schemas.setdefault(section, {})
        declared = inspect.get_annotations(cls, eval_str=True)
        for k in declared:
            if k.startswith('_'):
                continue
            default = namespace.get(k)
            if isinstance(default, dict):
                raise TypeError(f'{k}: use a subsection rather than a dict default')
            if k in cls._schema:
                raise TypeError(f'{section}.{k} is already defined')
            full = f'{section}.{k}' if section else k
            cls._schema[k] = ConfigItem(full, _item_type(full, declared[k]), default)
        return cls

    def subsections(cls, prefix):
        "Names of the sections directly below *prefix* (``''`` or ending in a period)"
        found = []
        for section in cls._schemas:
            if not section or not section.startswith(prefix) or section == prefix.rstrip('.'):
                continue
            head = section[len(prefix):].partition('.')[0]
            if head not in found:
                found.append(head)
        return found

    def __repr__(cls):
        return f'<{cls.__name__}: { {k: v.default for k, v in cls._schema.items()} }>'


class ConfigSchema(metaclass=ConfigSchemaMeta, prefix=""):
    '''
    Declares configuration keys.  Each annotated class attribute becomes a key of the section named by *prefix*; its value is the default::

        class InferConfig(ConfigSchema, prefix="infer"):

            #: Stop when L* improves by less than this
            epsilon: float = 1e-12

            mode: str = "fixed"

    A key declared without a default resolves to ``None`` unless a layout overrides it.  ``bool`` and ``str`` keys become :class:`~lifpath.config.ConfigBool` and :class:`~lifpath.config.ConfigString`.
    '''


def _plain(value):
    "*value* as something YAML and JSON can hold"
    from .types import ConfigBool
    if value is None or isinstance(value, (bool, ConfigBool)):
        return value
    for t in (float, int, str):
        if isinstance(value, t):
            return t(value)
    if isinstance(value, (tuple, list)):
        return list(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f'{value!r} ({type(value).__name__}) cannot be saved in a configuration snapshot')


class ConfigAccessor:

    '''
    Attribute access to one section of a :class:`~lifpath.config.ConfigLayout`.

    Reading an attribute resolves the override or the schema default; a subsection returns another accessor.  Setting an attribute records an override on the underlying layout.
    '''

    def __init__(self, layout, prefix):
        section = prefix.rstrip('.')
        if section not in ConfigSchema._schemas:
            raise KeyError(f'{section} is not a configuration section')
        self._layout = layout
        self._prefix = section + '.' if section else ''
        self._schema = ConfigSchema._schemas[section]

    def __getattr__(self, k):
        if k.startswith('_'):
            raise AttributeError(k)
        item = self._schema.get(k)
        if item is not None:
            return item.resolve(self._layout)
        if self._prefix + k in ConfigSchema._schemas:
            return ConfigAccessor(self._layout, self._prefix + k)
        raise AttributeError(f'{self._prefix}{k} is not a configuration key')

    def __setattr__(self, k, v):
        if k.startswith('_'):
            return super().__setattr__(k, v)
        if k not in self._schema:
            raise AttributeError(f'{self._prefix}{k} is not a configuration key')
        if isinstance(v, dict):
            raise ValueError(f'{self._prefix}{k} cannot be set to a dictionary')
        self._layout._overrides[self._prefix + k] = v

    def _dictify(self, include_defaults=False):
        '''
        The section as nested dicts, for the run manifest.

        :param include_defaults: also include keys that still have their default.
        '''
        d = {}
        for k, item in self._schema.items():
            try:
                value = getattr(self, k)
            except ConfigResolutionFailed:
                value = '<resolution failed>'
            if include_defaults or item.name in self._layout._overrides:
                d[k] = _plain(value)
        for k in ConfigSchema.subsections(self._prefix):
            section = getattr(self, k)._dictify(include_defaults=include_defaults)
            if section or include_defaults:
                d[k] = section
        return d

    def __getstate__(self):
        return self._dictify(True)

    def __repr__(self):
        return f'<{self.__class__.__name__} overrides: {self._dictify()}>'
