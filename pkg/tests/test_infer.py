# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest
import scipy.stats

from lifpath.analysis import coupling_correlation, inference_errors
from lifpath.bench import synthetic_uncoupled
from lifpath.core import InvalidParams, ModelParams, Recording
from lifpath.infer import *
from lifpath.mthreshold import cost_energy
from lifpath.simulate import NetworkSpec, random_network, simulate_network
from conftest import two_neuron_recording

REGULAR = np.arange(11) * 0.5


def leaky_params(currents=(0.0, 0.0), couplings=None):
    if couplings is None:
        couplings = np.zeros((2, 2))
    return ModelParams(capacitance=1.0, conductance=1.0, threshold=1.0, noise_std=1.0,
                       currents=np.array(currents), couplings=couplings)


def coupled():
    rec = two_neuron_recording([0.0, 1.0, 2.0, 3.0], [0.3, 1.6, 2.2], 3.0)
    params = ModelParams(capacitance=1.0, conductance=0.5, threshold=1.0, noise_std=1.0,
                         currents=np.array([1.2, 0.0]), couplings=np.array([[0.0, -0.3], [0.0, 0.0]]))
    return rec, params


def test_options_validation():
    with pytest.raises(InvalidParams):
        InferenceOptions(mode='adaptive')
    with pytest.raises(InvalidParams):
        InferenceOptions(epsilon=0.0)
    with pytest.raises(InvalidParams):
        InferenceOptions(prior_jmin=1.0, prior_jmax=-1.0, prior_weight=1.0)
    assert not InferenceOptions(prior_jmin=1.0, prior_jmax=-1.0).prior_enabled


def test_regular_perfect_integrator(unit_params):
    rec = two_neuron_recording(REGULAR, [], 5.0)
    result = infer_neuron(rec, 0, unit_params)
    assert result.converged
    # C V_th over the interval
    assert result.current == pytest.approx(2.0, rel=1e-9)
    assert result.log_likelihood == pytest.approx(0.0, abs=1e-12)
    assert result.tau_v == pytest.approx(0.5)
    assert result.hessian[0, 0] == pytest.approx(-20.0)
    assert result.error_bars[0] == pytest.approx(1 / np.sqrt(20.0))
    assert result.current_error == pytest.approx(2 / np.sqrt(20.0))
    # nothing ever arrives from neuron 1
    assert result.error_bars[1] == np.inf
    assert result.couplings[0] == 0.0


def test_regular_leaky():
    rec = two_neuron_recording(REGULAR, [], 5.0)
    result = infer_neuron(rec, 0, leaky_params())
    assert result.converged
    assert result.current == pytest.approx(1 / -np.expm1(-0.5), rel=1e-6)
    assert result.tau_v == 1.0
    assert result.passive_contacts == 0


def test_log_likelihood(unit_params):
    rec = two_neuron_recording(REGULAR, [], 5.0)
    params = unit_params.replace(currents=np.array([1.0, 0.0]))
    total, terms = log_likelihood(rec, params)
    # ten intervals of -1/2 (2 - 1)^2 0.5
    assert total == pytest.approx(-2.5)
    np.testing.assert_allclose(terms, [-2.5, 0.0])
    total, terms = log_likelihood(rec, params, neurons=[1])
    assert total == 0.0


def test_gradient_hessian_matches_finite_differences():
    rec, params = coupled()
    found = gradient_hessian(rec, 0, params)
    assert found.value == pytest.approx(log_likelihood(rec, params, neurons=[0])[0])
    step = 1e-6

    def value(current, coupling):
        changed = params.with_neuron(0, current, [0.0, coupling])
        return log_likelihood(rec, changed, neurons=[0])[0]

    d_current = (value(1.2 + step, -0.3) - value(1.2 - step, -0.3)) / (2 * step)
    d_coupling = (value(1.2, -0.3 + step) - value(1.2, -0.3 - step)) / (2 * step)
    np.testing.assert_allclose(found.gradient, [d_current, d_coupling], rtol=1e-5, atol=1e-7)

    def gradient(current, coupling):
        return gradient_hessian(rec, 0, params.with_neuron(0, current, [0.0, coupling])).gradient

    column_current = (gradient(1.2 + step, -0.3) - gradient(1.2 - step, -0.3)) / (2 * step)
    column_coupling = (gradient(1.2, -0.3 + step) - gradient(1.2, -0.3 - step)) / (2 * step)
    expected = np.array([column_current, column_coupling]).T
    np.testing.assert_allclose(found.hessian, expected, rtol=1e-4, atol=1e-6)
    assert np.all(np.linalg.eigvalsh(found.hessian) <= 1e-9)


def test_infer_coupled_neuron():
    rec, params = coupled()
    result = infer_neuron(rec, 0, params)
    assert result.converged
    check = gradient_hessian(rec, 0, params.with_neuron(0, result.current, result.couplings))
    assert check.value == pytest.approx(result.log_likelihood)
    assert np.linalg.norm(check.gradient) < 1e-5
    for offset in ([0.01, 0.0], [0.0, 0.01], [-0.01, 0.01]):
        nearby = params.with_neuron(0, result.current + offset[0], [0.0, result.couplings[1] + offset[1]])
        assert log_likelihood(rec, nearby, neurons=[0])[0] <= result.log_likelihood + 1e-12


def test_fixed_slot():
    rec, params = coupled()
    result = infer_neuron(rec, 0, params, fixed={1: 0.0})
    assert result.couplings[1] == 0.0
    assert result.converged


def test_prior_bounds_couplings():
    rec, params = coupled()
    free = infer_neuron(rec, 0, params)
    options = InferenceOptions(prior_jmin=-0.01, prior_jmax=0.01, prior_weight=1e6)
    bounded = infer_neuron(rec, 0, params, options)
    assert abs(bounded.couplings[1]) < 0.02
    assert bounded.objective <= bounded.log_likelihood + 1e-12
    assert bounded.log_likelihood <= free.log_likelihood + 1e-9


def test_no_intervals(unit_params):
    rec = two_neuron_recording(REGULAR, [1.0], 5.0)
    result = infer_neuron(rec, 1, unit_params)
    assert result.converged
    assert 'no_intervals' in result.flags
    assert np.all(np.isinf(result.error_bars))


def test_moving_threshold_needs_leak(unit_params):
    rec = two_neuron_recording(REGULAR, [], 5.0)
    with pytest.raises(InvalidParams):
        infer_neuron(rec, 0, unit_params, InferenceOptions(mode='moving'))


def test_moving_threshold_mode():
    rec = two_neuron_recording(REGULAR, [], 5.0)
    moving = infer_neuron(rec, 0, leaky_params(), InferenceOptions(mode='moving', sigma=0.3, max_iters=5))
    assert 1 <= moving.iterations <= 5
    assert np.isfinite(moving.current)
    assert moving.tau_v == 1.0


def test_infer_all_and_result():
    rec, params = coupled()
    result = infer_all(rec, params)
    assert set(result.neurons) == {0, 1}
    assert result.currents.shape == (2,)
    assert result.couplings.shape == (2, 2)
    assert result.couplings[0, 0] == 0.0
    assert result.log_likelihood == pytest.approx(sum(r.log_likelihood for r in result.neurons.values()))
    partial = infer_all(rec, params, neurons=[1])
    assert np.isnan(partial.currents[0])
    assert np.all(np.isnan(partial.couplings[0]))


def test_infer_all_in_processes():
    rec, params = coupled()
    serial = infer_all(rec, params)
    parallel = infer_all(rec, params, InferenceOptions(threads=2))
    np.testing.assert_allclose(parallel.currents, serial.currents)
    np.testing.assert_allclose(parallel.couplings, serial.couplings)


def test_infer_all_records_failures(unit_params):
    rec = two_neuron_recording(REGULAR, [], 5.0)
    # the perfect integrator cannot carry a moving threshold
    result = infer_all(rec, unit_params, InferenceOptions(mode='moving'))
    assert set(result.failures) == {0, 1}
    assert not result.converged


@pytest.mark.slow
def test_small_network_recovery(small_network):
    params, rec = small_network
    result = infer_all(rec, params)
    assert result.converged
    np.testing.assert_allclose(result.currents, params.currents, rtol=0.05)
    assert result.couplings[0, 1] > 0.1
    assert result.couplings[1, 2] < -0.1
    assert abs(result.couplings[0, 2]) < 0.1


def test_gain_stop_with_gradient_above_tolerance():
    rec, params = coupled()
    result = infer_neuron(rec, 0, params, InferenceOptions(epsilon=1e6, gradient_tolerance=-1.0))
    assert result.converged
    assert result.iterations == 1
    assert 'stopped_on_gain' in result.flags


def test_objective_concave_along_random_directions(rng):
    rec, params = coupled()
    origin = np.array([1.2, -0.3])
    steps = np.linspace(-1.0, 1.0, 9)
    for _ in range(5):
        direction = rng.standard_normal(2)
        direction /= np.linalg.norm(direction)
        values = []
        for t in steps:
            current, coupling = origin + t * direction
            trial = params.with_neuron(0, current, [0.0, coupling])
            values.append(log_likelihood(rec, trial, neurons=[0])[0])
        values = np.array(values)
        second = values[:-2] - 2 * values[1:-1] + values[2:]
        assert np.all(second <= 1e-9 * (1 + np.max(np.abs(values))))


def test_hessian_negative_at_random_points(rng):
    rec, params = coupled()
    for current, coupling in zip(rng.uniform(0.5, 2.0, 5), rng.uniform(-0.8, 0.4, 5)):
        local = gradient_hessian(rec, 0, params.with_neuron(0, current, [0.0, coupling]))
        assert np.all(np.linalg.eigvalsh(local.hessian) <= 1e-9 * np.max(np.abs(local.hessian)))


def test_result_independent_of_start():
    rec, params = coupled()
    origin = infer_neuron(rec, 0, params)
    far = infer_neuron(rec, 0, params, start=[3.0, 0.6])
    assert origin.converged and far.converged
    assert far.current == pytest.approx(origin.current, rel=1e-6)
    np.testing.assert_allclose(far.couplings, origin.couplings, atol=1e-6)
    assert far.log_likelihood == pytest.approx(origin.log_likelihood, rel=1e-9, abs=1e-9)


def three_neuron_recording():
    trains = (np.array([0.0, 1.0, 2.1, 3.0]),
              np.array([0.3, 1.6, 2.2, 3.5]),
              np.array([0.5, 0.9, 1.9, 2.8, 3.9]))
    params = ModelParams(capacitance=1.0, conductance=0.5, threshold=1.0, noise_std=1.0,
                         currents=np.zeros(3), couplings=np.zeros((3, 3)))
    return Recording(3, 4.0, trains), params


def test_infer_all_relabel_invariant():
    rec, params = three_neuron_recording()
    permutation = [2, 0, 1]
    original = infer_all(rec, params)
    relabeled = infer_all(rec.relabeled(permutation), params)
    assert set(relabeled.failures) == {permutation.index(i) for i in original.failures}
    np.testing.assert_allclose(relabeled.currents, original.currents[permutation], rtol=1e-6)
    np.testing.assert_allclose(relabeled.couplings, original.couplings[np.ix_(permutation, permutation)],
                               rtol=1e-6, atol=1e-8)


def test_neurons_decouple():
    rec, params = three_neuron_recording()
    params = params.replace(currents=np.array([1.5, 1.0, 2.0]),
                            couplings=np.array([[0.0, 0.2, -0.1], [0.3, 0.0, 0.0], [0.0, -0.2, 0.0]]))
    total, terms = log_likelihood(rec, params)
    assert total == pytest.approx(terms.sum())
    # the rows of the other neurons do not enter the term of neuron 0
    _, changed = log_likelihood(rec, params.with_neuron(1, 0.4, [0.7, 0.0, 0.5]))
    assert changed[0] == terms[0]
    assert changed[1] != terms[1]
    joint = infer_all(rec, params)
    alone = infer_neuron(rec, 2, params.with_neuron(0, 9.0, [0.0, 0.9, 0.9]))
    assert joint.neurons[2].current == pytest.approx(alone.current)
    np.testing.assert_allclose(joint.neurons[2].couplings, alone.couplings)


def moving_threshold_recording():
    return two_neuron_recording(REGULAR, [0.2, 1.3, 2.4, 3.1, 4.4], 5.0)


def test_full_survival_moving_threshold_is_fixed():
    rec = moving_threshold_recording()
    fixed = infer_neuron(rec, 0, leaky_params(), InferenceOptions(sigma=0.3))
    moving = infer_neuron(rec, 0, leaky_params(), InferenceOptions(mode='moving', sigma=0.3, survival_level=1.0))
    assert 'threshold_fallback' not in moving.flags
    assert moving.current == pytest.approx(fixed.current, rel=1e-6)
    np.testing.assert_allclose(moving.couplings, fixed.couplings, atol=1e-6)


def cost_energy_penalty(rec, result, sigma):
    params = leaky_params()
    rates = rec.rates.copy()
    rates[0] = 0.0
    current_e = result.current + rates @ result.couplings
    intervals = rec.trains[0].size - 1
    return sigma ** 2 * intervals * cost_energy(current_e, 0.5, params, sigma, **InferenceOptions().series)


def test_cost_energy_objective():
    rec = moving_threshold_recording()
    penalties = []
    for sigma in (0.3, 0.1):
        result = infer_neuron(rec, 0, leaky_params(), InferenceOptions(cost_energy=True, sigma=sigma))
        assert np.isfinite(result.current)
        penalty = result.log_likelihood - result.objective
        assert penalty == pytest.approx(cost_energy_penalty(rec, result, sigma), rel=1e-9, abs=1e-12)
        penalties.append(abs(penalty))
    # the penalty vanishes with the noise
    assert penalties[1] < penalties[0]


def test_windowed_rates_match_global_on_stationary_trains():
    rec = moving_threshold_recording()
    base = InferenceOptions(cost_energy=True, sigma=0.3, tau=50.0)
    global_rates = infer_neuron(rec, 0, leaky_params(), base)
    windowed = infer_neuron(rec, 0, leaky_params(), base.replace(windowed_rates=True))
    assert global_rates.converged and windowed.converged
    assert windowed.current == pytest.approx(global_rates.current, rel=1e-2)
    np.testing.assert_allclose(windowed.couplings, global_rates.couplings, atol=1e-2)
    # without a term that uses the effective current the rates do not matter
    plain = infer_neuron(rec, 0, leaky_params(), InferenceOptions(windowed_rates=True, tau=50.0))
    reference = infer_neuron(rec, 0, leaky_params(), InferenceOptions(tau=50.0))
    assert plain.current == reference.current


@pytest.mark.slow
@pytest.mark.parametrize('noise_std, limit_currents, limit_couplings', [
    (0.004, 1e-2, 2e-3),
    (0.4, None, None),
])
def test_uncoupled_reproduction(noise_std, limit_currents, limit_couplings):
    params = ModelParams(capacitance=1.0, conductance=0.0, threshold=1.0, noise_std=noise_std,
                         currents=np.linspace(0.8, 1.2, 40), couplings=np.zeros((40, 40)))
    rec = synthetic_uncoupled(40, 4e4, params, seed=3)
    result = infer_all(rec, params)
    assert not result.failures
    errors = inference_errors(params, result.currents, result.couplings, rec.rates)
    if limit_currents is not None:
        assert errors.currents <= limit_currents
        assert errors.couplings <= limit_couplings
    assert errors.effective_currents <= 3e-2


@pytest.mark.slow
def test_coupling_error_scaling():
    params = ModelParams(capacitance=1.0, conductance=0.0, threshold=1.0, noise_std=0.1,
                         currents=np.linspace(0.8, 1.2, 10), couplings=np.zeros((10, 10)))
    sizes = [1e3, 1e4, 1e5]
    errors = []
    for spikes in sizes:
        rec = synthetic_uncoupled(10, spikes, params, seed=11)
        result = infer_all(rec, params)
        errors.append(inference_errors(params, result.currents, result.couplings).couplings)
    fit = scipy.stats.linregress(np.log(sizes), np.log(errors))
    assert -0.6 <= fit.slope <= -0.4


@pytest.mark.slow
def test_coupled_network_fidelity():
    n = 20
    couplings = random_network(NetworkSpec(n, 0.2, 0.2, seed=4))
    currents = 10.0 * (1 + 0.2 * np.random.default_rng(4).uniform(-1, 1, n))
    # g V_th / I near 0.1 and r near 0.03
    params = ModelParams(capacitance=1.0, conductance=1.0, threshold=1.0, noise_std=0.095,
                         currents=currents, couplings=couplings)
    rec = simulate_network(params, 100.0, seed=4, dt=1e-4)
    result = infer_all(rec, params)
    assert not result.failures
    assert coupling_correlation(params.couplings, result.couplings) >= 0.9
    mask = ~np.eye(n, dtype=bool)
    fit = scipy.stats.linregress(params.couplings[mask], result.couplings[mask])
    assert 0.85 <= fit.slope <= 1.1


@pytest.mark.slow
def test_moving_threshold_recovers_subthreshold_coupling():
    # both neurons below threshold on average; neuron 1 excites neuron 0
    params = ModelParams(capacitance=1.0, conductance=1.0, threshold=1.0, noise_std=0.25,
                         currents=np.array([1 / 1.5, 0.5]), couplings=np.array([[0.0, 0.1], [0.0, 0.0]]))
    rec = simulate_network(params, 2e4, seed=8, dt=5e-3)
    fixed = infer_neuron(rec, 0, params)
    moving = infer_neuron(rec, 0, params, InferenceOptions(mode='moving'))
    assert 'threshold_fallback' not in moving.flags
    assert moving.couplings[1] > 0
    assert moving.couplings[1] > fixed.couplings[1]
