# Copyright (C) 2019, 2020, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import functools
import os.path


def _lookup(layout, key):
    try:
        return functools.reduce(getattr, key.split('.'), layout)
    except AttributeError:
        raise AttributeError(f'Unable to find {key}') from None


class ConfigString(str):

    '''A string that substitutes ``{key}`` with the value of that config key, for example ``{infer.mode}``.

    A backslash makes the next character literal.  Environment variables are expanded first.
    '''

    @classmethod
    def substitute(cls, text, layout):
        out = []
        i = 0
        while i < len(text):
            c = text[i]
            if c == '\\':
                out.append(text[i + 1:i + 2])
                i += 2
            elif c == '{':
                end = text.find('}', i)
                if end < 0:
                    raise ValueError(f"Missing right brace in `{text}'")
                out.append(str(_lookup(layout, text[i + 1:end])))
                i = end + 1
            elif c == '}':
                raise ValueError(f"Unbalanced closing brace in `{text}'")
            else:
                out.append(c)
                i += 1
        return ''.join(out)

    @classmethod
    def coerce(cls, value, layout):
        return cls.substitute(os.path.expandvars(str(value)), layout)


class ConfigBool:

    "Used instead of bool so that YAML strings such as ``no`` resolve sensibly"

    def __new__(cls, val):
        if isinstance(val, str):
            return val.strip().lower() in ('1', 'true', 'yes', 'on')
        return bool(val)
