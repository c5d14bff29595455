# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest

from lifpath.core import IsiProblem, ModelParams
from lifpath.infer import infer_neuron
from lifpath.optpath import path_log_weight, solve_isi
from lifpath.oracle import *
from lifpath.specfun import OuSpec, survival_probability
from conftest import two_neuron_recording


def single_params(conductance=0.0, current=0.0, noise_std=1.0):
    return ModelParams(capacitance=1.0, conductance=conductance, threshold=1.0, noise_std=noise_std,
                       currents=np.array([current]), couplings=np.zeros((1, 1)))


def problem(t_end=2.0, times=(), amplitudes=()):
    return IsiProblem(neuron=0, index=0, t_start=0.0, t_end=t_end,
                      times=np.array(times, dtype=float), amplitudes=np.array(amplitudes, dtype=float))


def test_grid_path_free_interval():
    grid = grid_optimal_path(problem(), single_params(current=0.2), nodes=200)
    # eta = 1/2 - 0.2 throughout
    assert grid.objective == pytest.approx(0.5 * 2.0 * 0.3 ** 2, rel=1e-10)
    np.testing.assert_allclose(grid.potential, grid.times / 2.0, atol=1e-12)


def test_grid_path_matches_active_contact():
    params = single_params()
    isi = problem(times=[1.0], amplitudes=[-1.2])
    grid = grid_optimal_path(isi, params, nodes=2000)
    fast = solve_isi(isi, params)
    assert grid.objective == pytest.approx(-path_log_weight(fast), rel=1e-8)
    assert grid.objective == pytest.approx(1.22, rel=1e-8)
    assert np.all(grid.potential <= 1.0)


def test_grid_path_matches_passive_contact():
    params = single_params(conductance=1.0, current=2.0)
    isi = problem(t_end=3.0)
    grid = grid_optimal_path(isi, params, nodes=1000)
    fast = solve_isi(isi, params)
    assert fast.passive_contact_count == 1
    assert grid.objective == pytest.approx(-path_log_weight(fast), rel=1e-3)
    # the grid path rides the threshold through the contact
    contact = fast.segments[1]
    inside = (grid.times > contact.start + 0.1) & (grid.times < contact.end - 0.1)
    np.testing.assert_allclose(grid.potential[inside], 1.0, atol=1e-6)


def test_grid_path_not_converged():
    # the unconstrained first round overshoots the threshold, so one round cannot settle
    isi = problem(times=[1.0], amplitudes=[-1.2])
    with pytest.raises(GridNotConverged) as excinfo:
        grid_optimal_path(isi, single_params(), nodes=200, max_rounds=1)
    assert excinfo.value.rounds == 1


def test_grid_path_settles_at_default_tolerance():
    isi = problem(times=[0.4, 1.0, 1.5], amplitudes=[0.3, -1.2, 0.5])
    grid = grid_optimal_path(isi, single_params(conductance=0.5, current=0.8), nodes=10000)
    assert 1 <= grid.rounds < 200
    assert np.all(grid.potential <= 1.0 + 1e-12)


@pytest.mark.slow
def test_grid_path_random_intervals(rng):
    for conductance in (0.0, 0.5, 1.2):
        for _ in range(5):
            m = rng.integers(0, 9)
            times = np.sort(rng.uniform(0.05, 1.95, m))
            isi = problem(times=times, amplitudes=rng.uniform(-0.6, 0.6, m))
            params = single_params(conductance=conductance, current=rng.uniform(0.2, 1.5))
            grid = grid_optimal_path(isi, params, nodes=4000)
            fast = -path_log_weight(solve_isi(isi, params))
            assert grid.objective == pytest.approx(fast, rel=1e-2, abs=1e-3)


def test_mc_survival_matches_series():
    spec = OuSpec(conductance=1.0, capacitance=1.0, noise_std=0.4, current=0.8, threshold=1.0)
    estimate, error = mc_survival(1.5, 0.0, spec, n_paths=10000, seed=4)
    assert 0 < error < 0.01
    assert estimate == pytest.approx(survival_probability(1.5, 0.0, spec), abs=4 * error + 0.01)
    assert mc_survival(1.5, 0.0, spec, n_paths=10000, seed=4) == (estimate, error)
    assert mc_survival(1.5, 1.0, spec) == (0.0, 0.0)


def test_fourier_bridge_variance_closed_form():
    # the odd sine terms sum to sigma_bar^2 tanh(rho / 2) / 2
    for rho in (0.1, 1.0, 10.0):
        assert fourier_bridge_variance(rho, 1.0, 0.3) == pytest.approx(0.09 * np.tanh(rho / 2) / 2, rel=1e-3)


@pytest.mark.parametrize('delta', [0.1, 1.0, 10.0])
def test_bridge_variance_matches_fourier(delta):
    params = ModelParams(capacitance=1.0, conductance=1.0, threshold=1.0, noise_std=0.3,
                         currents=np.array([0.5]), couplings=np.zeros((1, 1)))
    sampled = mc_bridge_variance(delta, params, seed=2)
    assert sampled == pytest.approx(fourier_bridge_variance(delta, params.tau, 0.3), rel=0.05)


def test_bridge_variance_perfect_integrator():
    params = single_params(noise_std=0.3)
    # the Brownian bridge has s^2 delta / 4 at its middle
    assert mc_bridge_variance(2.0, params, seed=2) == pytest.approx(0.09 * 2.0 / 4, rel=0.05)


def coupled():
    rec = two_neuron_recording([0.0, 1.0, 2.0, 3.0], [0.3, 1.6, 2.2], 3.0)
    params = ModelParams(capacitance=1.0, conductance=0.5, threshold=1.0, noise_std=1.0,
                         currents=np.array([1.2, 0.0]), couplings=np.array([[0.0, -0.3], [0.0, 0.0]]))
    return rec, params


def test_grid_search_bounded_by_inference():
    rec, params = coupled()
    result = infer_neuron(rec, 0, params)
    grid = {0: result.current + np.linspace(-0.2, 0.2, 11),
            1: result.couplings[1] + np.linspace(-0.2, 0.2, 11)}
    found = grid_search_mle(rec, 0, params, grid)
    assert found.values.shape == (11, 11)
    assert found.slots == (0, 1)
    assert found.value <= result.log_likelihood + 1e-9
    assert found.value == pytest.approx(found.values.max())


def test_grid_search_one_axis():
    rec, params = coupled()
    result = infer_neuron(rec, 0, params, fixed={1: -0.3})
    step = 0.01
    found = grid_search_mle(rec, 0, params, {0: result.current + step * np.arange(-10.3, 10)})
    assert abs(found.point[0] - result.current) <= step
    assert found.point[1] == -0.3


def test_grid_search_limits():
    rec, params = coupled()
    with pytest.raises(ValueError):
        grid_search_mle(rec, 0, params, {0: [1.0], 1: [0.0], 2: [0.0], 3: [0.0]})
