# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Forward simulation of the noisy leaky integrate-and-fire network, used to produce synthetic recordings with a known ground truth.

Potentials advance on a time grid.  With the default ``exact`` integrator each step draws from the exact Ornstein-Uhlenbeck transition; ``rk4`` takes a fourth order Runge-Kutta step of the drift and adds Euler noise.  A neuron spikes at the first grid time where its potential reaches threshold, is reset to zero and held there for the refractory time; its postsynaptic jumps arrive one step later plus the propagation delay.
'''

from __future__ import annotations
import dataclasses
import logging
import math

import numpy as np

from .core import InvalidParams, ModelParams, Recording

__all__ = []

logger = logging.getLogger('lifpath.simulate')

#: noise is drawn for this many steps at a time
CHUNK = 4096


class SimulationSaturated(RuntimeError):

    def __init__(self, neuron, time, count):
        self.neuron = neuron
        self.time = time
        self.count = count
        super().__init__(f'neuron {neuron} fired {count} spikes by t={time:g}; runaway firing')


__all__ += ['SimulationSaturated']


@dataclasses.dataclass(frozen=True)
class NetworkSpec:

    neuron_count: int
    connection_fraction: float
    max_amplitude: float
    #: ``uniform`` for signed uniform amplitudes, ``dale`` for one sign per presynaptic neuron
    mode: str = 'uniform'
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.connection_fraction <= 1:
            raise InvalidParams('connection fraction must lie in [0, 1]', field='connection_fraction')
        if self.max_amplitude < 0:
            raise InvalidParams('max amplitude must be non-negative', field='max_amplitude')
        if self.mode not in ('uniform', 'dale'):
            raise InvalidParams(f'unknown network mode {self.mode}', field='mode')


def random_network(spec: NetworkSpec):
    '''
    Coupling matrix ``J[post, pre]`` with each oriented link kept independently with probability *connection_fraction*.
    '''
    rng = np.random.default_rng(spec.seed)
    n = spec.neuron_count
    present = rng.random((n, n)) < spec.connection_fraction
    np.fill_diagonal(present, False)
    if spec.mode == 'uniform':
        amplitudes = rng.uniform(-spec.max_amplitude, spec.max_amplitude, (n, n))
    else:
        signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        amplitudes = rng.uniform(0, spec.max_amplitude, (n, n)) * signs[None, :]
    return np.where(present, amplitudes, 0.0)


__all__ += ['NetworkSpec', 'random_network']


@dataclasses.dataclass(frozen=True)
class SimulationOptions:

    dt: float = 1e-5
    #: spikes per neuron per second beyond which the run is aborted
    max_rate: float = 1e4
    integrator: str = 'exact'

    @classmethod
    def from_config(cls, layout):
        simulate = layout.simulate
        return cls(dt=simulate.dt, max_rate=simulate.max_rate, integrator=simulate.integrator)


__all__ += ['SimulationOptions']


class _Stepper:

    "Advance potentials by one grid step with zero input"

    def __init__(self, params: ModelParams, dt, integrator):
        C, g = params.capacitance, params.conductance
        self.currents = params.currents
        self.integrator = integrator
        self.dt = dt
        self.C, self.g = C, g
        if integrator == 'exact':
            self.decay = math.exp(-g * dt / C)
            self.gain = dt / C if g == 0 else -math.expm1(-g * dt / C) / g
            variance = (params.noise_std ** 2 * dt / C ** 2 if g == 0
                        else params.noise_std ** 2 * -math.expm1(-2 * g * dt / C) / (2 * g * C))
        elif integrator == 'rk4':
            variance = params.noise_std ** 2 * dt / C ** 2
        else:
            raise InvalidParams(f'unknown integrator {integrator}', field='integrator')
        self.spread = math.sqrt(variance)

    def drift(self, v):
        return (self.currents - self.g * v) / self.C

    def __call__(self, v, noise):
        if self.integrator == 'exact':
            return v * self.decay + self.currents * self.gain + self.spread * noise
        h = self.dt
        k1 = self.drift(v)
        k2 = self.drift(v + h / 2 * k1)
        k3 = self.drift(v + h / 2 * k2)
        k4 = self.drift(v + h * k3)
        return v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4) + self.spread * noise


def simulate_network(params: ModelParams, duration, seed=0, dt=1e-5, *,
                     max_rate=1e4, integrator='exact') -> Recording:
    '''
    Simulate the network for *duration* seconds.

    :raises SimulationSaturated: when some neuron exceeds *max_rate* spikes per second.
    '''
    if not (dt > 0 and np.isfinite(dt)):
        raise InvalidParams(f'time step must be positive, not {dt}', field='dt')
    if not (duration > 0 and np.isfinite(duration)):
        raise InvalidParams(f'duration must be positive, not {duration}', field='duration')
    n = params.neuron_count
    rng = np.random.default_rng(seed)
    step = _Stepper(params, dt, integrator)
    steps = int(math.floor(duration / dt + 1e-9))
    delay = int(round(params.tau_d / dt))
    hold = int(round(params.tau_r / dt))
    jumps = params.couplings / params.capacitance
    cap = max_rate * duration

    v = np.zeros(n)
    held_until = np.full(n, -1)
    arriving = {}
    counts = np.zeros(n, dtype=int)
    spike_steps = []
    spike_neurons = []
    noise = np.empty((0, n))
    for k in range(steps):
        row = k % CHUNK
        if row == 0:
            noise = rng.standard_normal((CHUNK, n))
        v = step(v, noise[row])
        incoming = arriving.pop(k, None)
        if incoming is not None:
            v += incoming
        held = held_until >= k
        v[held] = 0.0
        fired = np.flatnonzero(v >= params.threshold)
        if fired.size == 0:
            continue
        v[fired] = 0.0
        held_until[fired] = k + hold
        counts[fired] += 1
        spike_steps.extend([k + 1] * fired.size)
        spike_neurons.extend(fired.tolist())
        target = k + 1 + delay
        arriving[target] = arriving.get(target, 0.0) + jumps[:, fired].sum(axis=1)
        worst = int(np.argmax(counts))
        if counts[worst] > cap:
            raise SimulationSaturated(worst, (k + 1) * dt, int(counts[worst]))
    times = np.array(spike_steps, dtype=float) * dt
    rec = Recording.from_events(np.array(spike_neurons, dtype=int), times,
                                neuron_count=n, duration=float(duration))
    logger.info('simulated %d neurons for %gs: %d spikes', n, duration, rec.spike_count)
    return rec


__all__ += ['simulate_network']


@dataclasses.dataclass(frozen=True, eq=False)
class ConditionedPaths:

    '''
    Averages over the realizations whose first two intervals both fell in the band.

    The potential is reset after the first spike, so the averaged paths cover both intervals.
    '''

    times: np.ndarray
    potential: np.ndarray
    noise: np.ndarray
    accepted: int
    trials: int
    #: ``(accepted, 2)`` first and second interval of every accepted realization
    intervals: np.ndarray


def isi_conditioned_paths(params: ModelParams, current, input_times=(), input_amplitudes=(), *,
                          band=None, trials=10000, seed=0, dt=None, batch=500):
    '''
    Rejection sampling of a single neuron started at reset, keeping the realizations that spike twice with both intervals in *band*.

    :param band: ``(low, high)`` in seconds; defaults to ``[1.99, 2.01] tau``.
    :return: :class:`ConditionedPaths` sampled on ``[0, 2 low]``.
    '''
    C, g = params.capacitance, params.conductance
    tau = params.tau
    if band is None:
        band = (1.99 * tau, 2.01 * tau)
    low, high = band
    if dt is None:
        dt = (tau if np.isfinite(tau) else high) / 1000
    steps = int(math.ceil(2 * high / dt))
    keep = int(math.floor(2 * low / dt)) + 1
    input_steps = np.floor(np.asarray(input_times, dtype=float) / dt).astype(int)
    input_jumps = np.asarray(input_amplitudes, dtype=float) / C
    kicks = np.zeros(steps)
    np.add.at(kicks, input_steps[input_steps < steps], input_jumps[input_steps < steps])
    spread = params.noise_std * math.sqrt(dt) / C
    rng = np.random.default_rng(seed)
    potential_sum = np.zeros(keep)
    noise_sum = np.zeros(keep)
    intervals = []
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        v = np.zeros(size)
        spikes = np.zeros(size, dtype=int)
        first = np.full(size, np.inf)
        second = np.full(size, np.inf)
        path = np.zeros((size, keep))
        xi = np.zeros((size, keep))
        for k in range(steps):
            draw = rng.standard_normal(size)
            if k < keep:
                path[:, k] = v
                xi[:, k] = draw * params.noise_std / math.sqrt(dt)
            v = v + ((current - g * v) * dt) / C + spread * draw + kicks[k]
            crossed = (spikes < 2) & (v >= params.threshold)
            if not crossed.any():
                continue
            now = (k + 1) * dt
            second[crossed & (spikes == 1)] = now
            first[crossed & (spikes == 0)] = now
            spikes[crossed] += 1
            v[crossed] = 0.0
        first_isi, second_isi = first, second - first
        chosen = ((first_isi >= low) & (first_isi <= high)
                  & (second_isi >= low) & (second_isi <= high))
        intervals.append(np.column_stack([first_isi[chosen], second_isi[chosen]]))
        potential_sum += path[chosen].sum(axis=0)
        noise_sum += xi[chosen].sum(axis=0)
        done += size
    intervals = np.concatenate(intervals)
    accepted = intervals.shape[0]
    logger.info('conditioned paths: %d of %d realizations accepted', accepted, trials)
    scale = max(accepted, 1)
    return ConditionedPaths(np.arange(keep) * dt, potential_sum / scale, noise_sum / scale,
                            accepted, trials, intervals)


__all__ += ['ConditionedPaths', 'isi_conditioned_paths']
