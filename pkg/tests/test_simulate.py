# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest

from lifpath.core import InvalidParams, ModelParams
from lifpath.simulate import *

# a binary fraction keeps the deterministic integrations exact
DT = 1 / 1024


def network(currents, couplings=None, conductance=0.0, noise_std=0.0, **kwargs):
    currents = np.asarray(currents, dtype=float)
    if couplings is None:
        couplings = np.zeros((currents.size, currents.size))
    return ModelParams(capacitance=1.0, conductance=conductance, threshold=1.0, noise_std=noise_std,
                       currents=currents, couplings=couplings, **kwargs)


def test_noiseless_perfect_integrator():
    rec = simulate_network(network([2.0]), 1.9, dt=DT)
    np.testing.assert_array_equal(rec.trains[0], [0.5, 1.0, 1.5])
    assert rec.duration == 1.9


def test_noiseless_leaky_period():
    for integrator in ('exact', 'rk4'):
        rec = simulate_network(network([2.0], conductance=1.0), 3.0, dt=1e-4, integrator=integrator)
        np.testing.assert_allclose(np.diff(rec.trains[0]), np.log(2.0), atol=2e-4)


def test_coupling_is_delivered():
    # two kicks of 0.5 from neuron 0 make neuron 1 fire on the step after the second
    couplings = np.array([[0.0, 0.0], [0.5, 0.0]])
    rec = simulate_network(network([2.0, 0.0], couplings), 1.9, dt=DT)
    np.testing.assert_array_equal(rec.trains[1], [1025 * DT])


def test_transmission_delay():
    couplings = np.array([[0.0, 0.0], [1.0, 0.0]])
    rec = simulate_network(network([2.0, 0.0], couplings, tau_d=100 * DT), 0.9, dt=DT)
    np.testing.assert_array_equal(rec.trains[1], [613 * DT])


def test_refractory_period():
    rec = simulate_network(network([2.0], tau_r=0.1), 1.9, dt=DT)
    np.testing.assert_array_equal(rec.trains[0], np.array([512, 1126, 1740]) * DT)


def test_seed_determinism():
    params = network([1.5, 1.2], np.array([[0.0, 0.1], [-0.1, 0.0]]), conductance=1.0, noise_std=0.3)
    first = simulate_network(params, 2.0, seed=5, dt=1e-4)
    second = simulate_network(params, 2.0, seed=5, dt=1e-4)
    other = simulate_network(params, 2.0, seed=6, dt=1e-4)
    for a, b in zip(first.trains, second.trains):
        np.testing.assert_array_equal(a, b)
    assert any(a.size != b.size or np.any(a != b) for a, b in zip(first.trains, other.trains))


def test_saturation():
    with pytest.raises(SimulationSaturated) as excinfo:
        simulate_network(network([100.0]), 1.0, dt=1e-3, max_rate=10)
    assert excinfo.value.neuron == 0
    assert excinfo.value.count == 11


def test_invalid_arguments():
    with pytest.raises(InvalidParams):
        simulate_network(network([1.0]), 1.0, dt=0.0)
    with pytest.raises(InvalidParams):
        simulate_network(network([1.0]), -1.0)
    with pytest.raises(InvalidParams):
        simulate_network(network([1.0]), 1.0, integrator='euler')


def test_options_defaults():
    options = SimulationOptions()
    assert options.dt == 1e-5
    assert options.integrator == 'exact'


def test_random_network():
    couplings = random_network(NetworkSpec(60, 0.2, 0.3, seed=2))
    assert couplings.shape == (60, 60)
    assert np.all(np.diag(couplings) == 0)
    assert np.all(np.abs(couplings) <= 0.3)
    fraction = np.count_nonzero(couplings) / (60 * 59)
    assert fraction == pytest.approx(0.2, abs=0.03)
    np.testing.assert_array_equal(couplings, random_network(NetworkSpec(60, 0.2, 0.3, seed=2)))


def test_random_network_dale():
    couplings = random_network(NetworkSpec(30, 0.5, 0.3, mode='dale', seed=1))
    for column in couplings.T:
        signs = np.sign(column[column != 0])
        if signs.size:
            assert np.all(signs == signs[0])


@pytest.mark.parametrize('kwargs', [
    dict(connection_fraction=1.5),
    dict(max_amplitude=-0.1),
    dict(mode='sparse'),
])
def test_network_spec_validation(kwargs):
    values = dict(neuron_count=5, connection_fraction=0.2, max_amplitude=0.1)
    values.update(kwargs)
    with pytest.raises(InvalidParams):
        NetworkSpec(**values)


def test_conditioned_paths():
    params = network([0.8], conductance=1.0, noise_std=0.5)
    paths = isi_conditioned_paths(params, 0.8, band=(1.0, 3.0), trials=1000, seed=3, dt=0.01)
    assert 0 < paths.accepted <= 1000
    assert paths.trials == 1000
    assert paths.times.shape == paths.potential.shape == paths.noise.shape
    assert paths.times[-1] <= 2.0
    assert paths.potential[0] == 0.0
    # both intervals of every kept realization lie in the band
    assert paths.intervals.shape == (paths.accepted, 2)
    assert np.all((paths.intervals >= 1.0) & (paths.intervals <= 3.0))


def test_conditioned_paths_need_two_intervals():
    # without noise the first interval is 0.25; an inhibitory kick stretches the second out of the band
    params = network([4.0], conductance=0.0, noise_std=0.0)
    paths = isi_conditioned_paths(params, 4.0, input_times=[0.4], input_amplitudes=[-1.0],
                                  band=(0.2, 0.3), trials=10, dt=0.001)
    assert paths.accepted == 0
    assert paths.intervals.shape == (0, 2)
    steady = isi_conditioned_paths(params, 4.0, band=(0.2, 0.3), trials=10, dt=0.001)
    assert steady.accepted == 10
