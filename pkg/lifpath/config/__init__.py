# Copyright (C) 2018, 2019, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Typed, layered configuration.  Sections are declared with :class:`ConfigSchema` in :mod:`lifpath.config.base`; a :class:`ConfigLayout` holds the overrides loaded from YAML or set as attributes.
'''

from .schema import ConfigSchema, ConfigItem, ConfigAccessor, ConfigResolutionFailed
from .layout import ConfigLayout
from .types import ConfigString, ConfigBool
from . import base


__all__ = ('ConfigSchema', 'ConfigItem', 'ConfigLayout', 'ConfigAccessor',
           'ConfigResolutionFailed', 'ConfigString', 'ConfigBool')
