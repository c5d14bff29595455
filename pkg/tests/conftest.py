# Copyright (C) 2018, 2019, 2020, 2021, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest

from lifpath import ModelParams, Recording

pytest_plugins = ('lifpath.pytest_plugin',)


@pytest.fixture()
def unit_params():
    ''':returns: a single perfect integrator with C = V_th = 1 and no input
'''
    return ModelParams(capacitance=1.0, conductance=0.0, threshold=1.0, noise_std=1.0,
                       currents=np.zeros(2), couplings=np.zeros((2, 2)))


def two_neuron_recording(post, pre, duration):
    return Recording(2, float(duration), (np.asarray(post, dtype=float), np.asarray(pre, dtype=float)))
