# Copyright (C) 2018, 2019, 2020, 2021, 2023, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import lifpath.config

__version__ = "0.1"

__all__ = ['__version__']

from .utils import memoproperty
__all__ += ['memoproperty']

from .config import ConfigLayout, ConfigSchema
__all__ += ['ConfigLayout', 'ConfigSchema']

from .core import *
__all__ += lifpath.core.__all__

from .optpath import *
__all__ += lifpath.optpath.__all__

from .derivatives import *
__all__ += lifpath.derivatives.__all__

from .specfun import *
__all__ += lifpath.specfun.__all__

from .mthreshold import *
__all__ += lifpath.mthreshold.__all__

from .simulate import *
__all__ += lifpath.simulate.__all__

from .infer import *
__all__ += lifpath.infer.__all__

from .analysis import *
__all__ += lifpath.analysis.__all__

from .files import *
__all__ += lifpath.files.__all__

from . import oracle
