# Copyright (C) 2018, 2019, 2020, 2021, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import argparse

import numpy as np
import pytest
import yaml

from .config import ConfigLayout
from .core import ModelParams


@pytest.fixture(scope='session')
def test_parameters(pytestconfig):
    try:
        return pytestconfig.lifpath_test_parameters
    except AttributeError:
        pytest.skip("Test parameters not specified")


@pytest.fixture()
def config_layout():
    return ConfigLayout()


@pytest.fixture()
def rng():
    ''':returns: a numpy Generator with a fixed seed
'''
    return np.random.default_rng(20260101)


@pytest.fixture(scope='session')
def small_network():
    '''
    :returns: ``(params, recording)`` for three noisy perfect integrators with one excitatory and one inhibitory link.
'''
    from .simulate import simulate_network
    params = ModelParams(capacitance=1.0, conductance=0.0, threshold=1.0, noise_std=0.05,
                         currents=np.array([10.0, 12.0, 8.0]),
                         couplings=np.array([[0.0, 0.2, 0.0],
                                             [0.0, 0.0, -0.2],
                                             [0.0, 0.0, 0.0]]))
    return params, simulate_network(params, 20.0, seed=1, dt=1e-4)


def pytest_addoption(parser):
    group = parser.getgroup("Lifpath", "Lifpath test options")
    group.addoption('--test-parameters', '--test-params',
                    metavar='file',
                    type=argparse.FileType('rt'),
                    help="YAML test parameters made available through the test_parameters fixture")
    group.addoption('--run-slow',
                    action='store_true',
                    help='Also run the Monte-Carlo and reproduction tests marked slow')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long Monte-Carlo or reproduction check; needs --run-slow')
    test_params_yaml = config.getoption('test_parameters')
    if test_params_yaml:
        config.lifpath_test_parameters = yaml.safe_load(test_params_yaml)
        test_params_yaml.close()


def pytest_collection_modifyitems(config, items):
    if config.getoption('run_slow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --run-slow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)
